"""Fixed-step closed-loop landing simulator.

Physics runs at ``sim.dt_physics``; perception, filtering, control and the
deck controller run every ``sim.dt_control``; retargeting and the deck-lag
monitor run every ``sim.replan_period``. All randomness comes from one
seeded generator drawn in a fixed order, so a run is a pure function of its
config.

Phases of a cooperative run: ``acquire`` (hover while the filter
collects observations, deck in visual-servo mode), ``approach`` (track the
quintic towards the predicted rendezvous, deck tilting to the planned
pitch), then touchdown adjudication.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import ekf as ekf_mod
from .config import ScenarioConfig, validate
from .controller import ControlCommand, control, feedforward_rates, tracking_accel
from .errors import CooplandError, ValidationError
from .geometry import E3, GRAVITY, PlanarState, PlatformState, QuadState, expm_so3, pitch_of
from .minjerk import generate_3d
from .servo import (incidence_angle, interaction_jacobians, off_axis_angle, project, servo_rate,
                    cooperative_tilt_rate, target_in_camera)
from .terminal import BoundaryCondition2D, solve_terminal_plan, verify_plan

OUTCOMES = ("landed", "window_missed", "diverged", "timeout")
TRACE_HEADER = ("t", "px", "py", "pz", "vx", "vy", "vz", "pitch_deg", "deck_pitch_deg", "phase", "thrust", "alpha")


# ---------------------------------------------------------------- physics

def step_quad(state: QuadState, cmd: ControlCommand, dt: float, tau_lag: float = 0.03,
              g: float = GRAVITY) -> QuadState:
    """Advance the point-mass-plus-attitude surrogate by ``dt``.

    Thrust acts along the attitude at the start of the step; the body rate
    relaxes exactly towards the command and the attitude advances by the
    exponential of the mean rate over the step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    R = state.attitude
    acc = cmd.collective_accel * R[:, 2] - g * E3
    p = state.position + state.velocity * dt + 0.5 * acc * dt * dt
    v = state.velocity + acc * dt
    w_cmd = np.asarray(cmd.body_rate_cmd, dtype=float)
    decay = math.exp(-dt / tau_lag)
    w = w_cmd + (state.body_rate - w_cmd) * decay
    # exact integral of the exponential relaxation over the step
    w_mean = w_cmd + (state.body_rate - w_cmd) * (tau_lag / dt) * (1.0 - decay)
    R_new = R @ expm_so3(w_mean * dt)
    # re-orthonormalise to hold the rotation tolerance over long runs
    u, _, vt = np.linalg.svd(R_new)
    return QuadState(p, v, u @ vt, w)


class DelayLine:
    """FIFO of deck rate commands; output lags input by ``round(tau / dt)`` ticks."""

    def __init__(self, tau: float, dt: float):
        self.depth = int(round(tau / dt))
        self.dt = dt
        self.queue: deque[float] = deque([0.0] * self.depth)

    def push(self, cmd: float) -> float:
        if self.depth == 0:
            return cmd
        self.queue.append(cmd)
        return self.queue.popleft()

    def pending(self) -> float:
        """Pitch change still in flight (before rate clamping)."""
        return math.fsum(self.queue) * self.dt


def step_platform(state: PlatformState, rate_cmd: float, dt: float, line: DelayLine,
                  omega_plat: float, phi_max: float) -> PlatformState:
    """Advance the base along its velocity and the deck through the delay line."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    rate = max(-omega_plat, min(omega_plat, line.push(rate_cmd)))
    phi = state.deck_pitch + rate * dt
    if abs(phi) > phi_max:
        phi = math.copysign(phi_max, phi)
        rate = (phi - state.deck_pitch) / dt
    return PlatformState(state.base_position + state.base_velocity * dt, state.base_velocity, phi, rate)


# ------------------------------------------------------------ perception

@dataclass(frozen=True)
class Measurements:
    z_b: np.ndarray | None
    z_p: np.ndarray | None
    R_b: np.ndarray | None
    R_p: np.ndarray | None
    visible_b: bool
    visible_p: bool
    pixel: np.ndarray | None  # tag image point in the quad camera


@dataclass
class Sensors:
    cfg: ScenarioConfig
    quad_cam: object = None
    plat_cam: object = None
    noise: object = None

    def __post_init__(self):
        self.quad_cam = self.cfg.quad_camera()
        self.plat_cam = self.cfg.platform_camera()
        self.noise = self.cfg.noise_params()

    def tag_position(self, plat: PlatformState) -> np.ndarray:
        return plat.base_position + plat.deck_rotation() @ np.array([self.cfg.deck.tag_offset, 0.0, 0.0])


def synthesize_measurements(quad: QuadState, plat: PlatformState, sensors: Sensors, rng,
                            platform_side: bool = True) -> Measurements:
    """Noisy relative-position observations plus visibility flags.

    Both observations are the deck centre relative to the quadrotor in world
    coordinates. Six standard normals are drawn every call, visible or not,
    so the random stream does not depend on the geometry.
    """
    cam = sensors.cfg.camera
    draws = rng.standard_normal(6)
    rel = plat.base_position - quad.position
    tag = sensors.tag_position(plat)

    R_qc = quad.attitude @ sensors.quad_cam.R_mount
    X_c = target_in_camera(R_qc, plat.deck_rotation(), np.array([sensors.cfg.deck.tag_offset, 0, 0]),
                           plat.base_position, quad.position)
    vis_b = bool(X_c[2] > cam.min_depth
                 and incidence_angle(quad.position, tag, plat.deck_normal()) <= cam.max_incidence
                 and off_axis_angle(R_qc, quad.position, tag) <= cam.fov)
    z_b = R_b = pixel = None
    if vis_b:
        R_b = ekf_mod.cov_quad_obs(float(X_c[2]), quad.body_rate, R_qc, sensors.noise)
        z_b = rel + _chol(R_b) @ draws[:3]
        pixel = project(sensors.quad_cam, X_c)

    R_pc = sensors.plat_cam.R_mount
    depth_p = float(R_pc[:, 2] @ (quad.position - plat.base_position))
    vis_p = bool(platform_side and depth_p > cam.min_depth
                 and off_axis_angle(R_pc, plat.base_position, quad.position) <= cam.fov)
    z_p = R_p = None
    if vis_p:
        a_p = np.zeros(3)  # constant-velocity base
        R_p = ekf_mod.cov_platform_obs(depth_p, a_p, R_pc, sensors.noise)
        z_p = rel + _chol(R_p) @ draws[3:]
    return Measurements(z_b, z_p, R_b, R_p, vis_b, vis_p, pixel)


def _chol(C) -> np.ndarray:
    return np.linalg.cholesky(C + 1e-15 * np.eye(3))


# --------------------------------------------------------------- reports

@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def add(self, t, quad: QuadState, plat: PlatformState, phase: str, thrust: float, alpha: float):
        self.rows.append((t, *quad.position, *quad.velocity, math.degrees(pitch_of(quad.attitude)),
                          math.degrees(plat.deck_pitch), phase, thrust, alpha))

    def to_csv(self) -> str:
        out = [",".join(TRACE_HEADER)]
        for r in self.rows:
            out.append(",".join(r[9] if i == 9 else _fmt(r[i]) for i in range(len(TRACE_HEADER))))
        return "\n".join(out) + "\n"


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.6f}"


@dataclass
class LandingReport:
    outcome: str
    strategy: str
    speed: float
    landing_time: float  # s from first plan commit to touchdown
    pitch_error_deg: float
    touchdown_offset: float
    tangential_speed: float
    replan_count: int
    desired_pitch_deg: float  # planned deck pitch of the final plan
    quad_pitch_deg: float  # quad pitch at touchdown
    deck_pitch_deg: float
    touchdown_x: float
    height_gap: float
    reason: str
    t_end: float
    max_speed: float = 0.0
    max_accel_cmd: float = 0.0
    plan_violations: list = field(default_factory=list)
    events: list = field(default_factory=list)
    trace: Trace = field(default_factory=Trace, repr=False)

    def summary(self) -> dict:
        """Structured record without the trace; floats rounded for stable output."""
        keys = ("outcome", "strategy", "speed", "landing_time", "desired_pitch_deg", "quad_pitch_deg",
                "deck_pitch_deg", "pitch_error_deg", "touchdown_offset", "tangential_speed", "height_gap",
                "touchdown_x", "replan_count", "reason", "t_end", "max_speed", "max_accel_cmd")
        out = {}
        for k in keys:
            v = getattr(self, k)
            if isinstance(v, float):
                v = None if math.isnan(v) else round(v, 6)
            out[k] = v
        out["plan_violations"] = sum(len(v) for v in self.plan_violations)
        out["events"] = [list(e) for e in self.events]
        return out


# ------------------------------------------------------------ simulation

class _Run:
    """Mutable state of one run; only :func:`run_scenario` drives it."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        s = cfg.scenario
        self.strategy = s.strategy
        self.rng = np.random.default_rng(s.seed)
        self.sensors = Sensors(cfg)
        self.noise = self.sensors.noise
        self.params = cfg.ocp_params()
        self.gains = cfg.controller_gains(hover=self.strategy == "hover_then_descend")
        self.dt = cfg.sim.dt_physics
        self.n_sub = int(round(cfg.sim.dt_control / self.dt))
        self.n_check = int(round(cfg.sim.replan_period / cfg.sim.dt_control))
        self.plat = PlatformState(np.zeros(3), np.array([s.speed, 0.0, 0.0]), 0.0, 0.0)
        self.quad = QuadState.at(np.asarray(s.offset, dtype=float))
        self.line = DelayLine(cfg.deck.tau_delay, self.dt)
        self.est: ekf_mod.EkfEstimate | None = None
        self.n_updates = 0
        self.alpha = math.nan
        self.phase = "acquire"
        self.hold = self.quad.position.copy()
        self.trace = Trace()
        self.events: list = []
        self.t = 0.0
        self.tick = 0
        self.t_commit = None
        self.plan = None
        self.traj = None
        self.seg_start = 0.0
        self.sched = None  # (t0, phi0, phi_target)
        self.deck_mode = "servo" if self.strategy == "cooperative" else "hold"
        self.deck_cmd = 0.0
        self.replans = 0
        self.violations: list = []
        self.max_speed = 0.0
        self.max_accel = 0.0
        self.thrust = GRAVITY
        self.cmd = ControlCommand(GRAVITY, np.zeros(3))
        self.aligned_since = None
        self.descent = None  # (t0, z0)
        self.last_plan_try = -math.inf
        self.report: LandingReport | None = None

    # -- estimation
    def perceive(self, dt: float):
        meas = synthesize_measurements(self.quad, self.plat, self.sensors, self.rng,
                                       platform_side=self.strategy != "unilateral")
        self.meas = meas
        u = (self.quad.velocity, self.plat.base_velocity)
        if self.est is not None:
            self.est = ekf_mod.predict(self.est, u, dt, self.noise)
        z_b, z_p = meas.z_b, meas.z_p
        if z_b is None and z_p is None:
            self.alpha = math.nan
            return
        if self.est is None:
            z, R = (z_b, meas.R_b) if z_b is not None else (z_p, meas.R_p)
            P = np.zeros((6, 6))
            P[:3, :3] = self.cfg.ekf.init_sigma**2 * np.eye(3)
            P[3:, 3:] = P[:3, :3] + R
            self.est = ekf_mod.EkfEstimate(np.concatenate([self.quad.position, self.quad.position + z]), P)
            self.n_updates = 1
            self.alpha = 1.0 if z_b is not None else 0.0
            return
        res = ekf_mod.update(self.est, z_b, z_p, meas.R_b, meas.R_p, mode=self.cfg.ekf.mode, gate=self.cfg.ekf.gate)
        self.est = res.estimate
        self.alpha = res.alpha
        self.n_updates += int(res.accepted)

    def rendezvous(self) -> np.ndarray:
        """Deck centre in the quad's odometry frame from the filtered relative position."""
        return self.quad.position + self.est.relative

    # -- planning
    def aim_point(self) -> np.ndarray:
        return self.rendezvous() + np.array([0.0, 0.0, self.cfg.touchdown.approach_height])

    def make_plan(self, phi_start: float, p0, v0, a0):
        flat = self.strategy == "unilateral"
        target = self.aim_point()
        vp = self.plat.base_velocity
        bc = BoundaryCondition2D(PlanarState(p0[0], p0[2], v0[0], v0[2], a0[0], a0[2]),
                                 (target[0], target[2]), (vp[0], vp[2]), moving=True)
        plan = solve_terminal_plan(bc, self.params, self.cfg.ocp.n_knots, phi_start=phi_start, flat_terminal=flat)
        self.violations.append(verify_plan(plan, bc, self.params))
        traj = generate_3d(p0, v0, a0, target + vp * plan.T_f, vp, plan.a_opt, plan.T_f)
        return plan, traj

    def commit(self):
        p0, v0 = self.quad.position.copy(), self.quad.velocity.copy()
        a0 = self.cmd.collective_accel * self.quad.attitude[:, 2] - GRAVITY * E3
        try:
            plan, traj = self.make_plan(self.deck_prediction(), p0, v0, a0)
        except (CooplandError, ValueError) as exc:
            self.events.append((round(self.t, 6), "plan_failed", type(exc).__name__))
            return False
        self.plan, self.traj = plan, traj
        self.seg_start = self.t
        self.t_commit = self.t
        self.phase = "approach"
        self.events.append((round(self.t, 6), "commit", round(math.degrees(plan.phi_opt), 6)))
        if self.strategy == "cooperative":
            self.deck_mode = "cooperative"
            self.events.append((round(self.t, 6), "deck_mode", "cooperative"))
            self.sched = (self.t, plan.phi_start, plan.phi_opt)
        return True

    def reference(self):
        tau = min(max(self.t - self.seg_start, 0.0), self.traj.T_f)
        p, v, a, _ = self.traj.sample(tau)
        # rates are taken one lag constant ahead to cancel the rate response lag
        lead = min(tau + self.cfg.quad.rate_lag, self.traj.T_f)
        return p, v, a, feedforward_rates(self.traj, lead)

    def time_to_go(self) -> float:
        return self.seg_start + self.traj.T_f - self.t

    def retarget(self):
        """Fresh quintic from the current reference to the refreshed rendezvous point."""
        T_rem = self.time_to_go()
        p, v, a, _ = self.reference()
        vp = self.plat.base_velocity
        pf = self.aim_point() + vp * T_rem
        self.traj = generate_3d(p, v, a, pf, vp, self.plan.a_opt, T_rem)
        self.seg_start = self.t

    def deck_lag(self) -> float:
        """How far the deck trails the rate-limited schedule towards the plan pitch.

        The schedule starts from the pitch the deck will reach once the
        commands already in its delay line have executed, so it is only
        defined from ``tau_delay`` after the plan was issued.
        """
        t0, phi0, target = self.sched
        d = target - phi0
        p = self.params
        if d == 0 or self.t < t0 + p.tau_delay:
            return 0.0
        prog = min(abs(d), p.omega_plat * (self.t - t0 - p.tau_delay))
        expected = phi0 + math.copysign(prog, d)
        return (expected - self.plat.deck_pitch) * math.copysign(1.0, d)

    def replan(self):
        p0, v0, a0, _ = self.reference()
        phi_now = self.deck_prediction()
        try:
            plan, traj = self.make_plan(phi_now, p0, v0, a0)
        except (CooplandError, ValueError) as exc:
            self.events.append((round(self.t, 6), "replan_failed", type(exc).__name__))
            return
        self.plan, self.traj = plan, traj
        self.seg_start = self.t
        self.replans += 1
        self.sched = (self.t, phi_now, plan.phi_opt)
        self.events.append((round(self.t, 6), "replan", round(math.degrees(plan.phi_opt), 6)))

    # -- deck controller
    def deck_prediction(self) -> float:
        """Deck pitch once the commands in its own delay line have executed."""
        phi = self.plat.deck_pitch + self.line.pending()
        return max(-self.cfg.deck.phi_max, min(self.cfg.deck.phi_max, phi))

    def deck_command(self) -> float:
        cfg = self.cfg
        if self.deck_mode == "cooperative":
            phi_pred = self.deck_prediction()
            return cooperative_tilt_rate(phi_pred, self.plan.phi_opt, cfg.deck.omega_plat,
                                         cfg.sim.dt_control, cfg.deck.phi_max)
        if self.deck_mode == "servo" and self.meas.visible_b:
            R_qc = self.quad.attitude @ self.sensors.quad_cam.R_mount
            X_p = np.array([cfg.deck.tag_offset, 0.0, 0.0])
            X_c = target_in_camera(R_qc, self.plat.deck_rotation(), X_p, self.plat.base_position, self.quad.position)
            jac = interaction_jacobians(self.sensors.quad_cam, R_qc, self.plat.deck_rotation(), X_p, X_c)
            e = self.meas.pixel - np.array([cfg.servo.u_d, cfg.servo.v_d])
            try:
                w = servo_rate(e, jac, self.plat.base_velocity - self.quad.velocity, self.quad.body_rate,
                               cfg.servo.K_p, cfg.servo.damping, cfg.deck.omega_plat, axis=1)
            except CooplandError:
                return 0.0
            return float(w[1])
        return 0.0

    def deck_input(self) -> float:
        inj = self.cfg.scenario.actuation_delay_injection
        if inj > 0 and self.t_commit is not None and self.t < self.t_commit + inj:
            return 0.0
        return self.deck_cmd

    # -- flight
    def flight_command(self):
        g = self.gains
        if self.phase == "approach":
            p_ref, v_ref, a_ref, w_ref = self.reference()
        elif self.phase in ("align", "descend"):
            vp = self.plat.base_velocity
            p_ref = self.rendezvous() + np.array([0.0, 0.0, self.cfg.scenario.offset[2]])
            v_ref = vp.copy()
            if self.phase == "descend":
                t0, h0 = self.descent
                h = h0 - self.cfg.hover.descent_rate * (self.t - t0)
                p_ref[2] = self.rendezvous()[2] + h
                v_ref[2] = -self.cfg.hover.descent_rate
            a_ref, w_ref = np.zeros(3), np.zeros(3)
        else:
            p_ref, v_ref, a_ref, w_ref = self.hold, np.zeros(3), np.zeros(3), np.zeros(3)
        a_des = tracking_accel(self.quad.position, self.quad.velocity, p_ref, v_ref, a_ref, g)
        self.max_accel = max(self.max_accel, float(np.linalg.norm(a_des))) if self.phase != "acquire" else self.max_accel
        try:
            cmd, _ = control(self.quad.attitude, self.quad.velocity, a_des, w_ref, g)
        except CooplandError:
            cmd = ControlCommand(0.0, np.zeros(3))
        self.cmd = cmd

    # -- touchdown
    def contact_geometry(self):
        n = self.plat.deck_normal()
        rel = self.quad.position - self.plat.base_position
        gap = float(n @ rel)
        lateral = float(np.linalg.norm(rel - gap * n))
        dv = self.quad.velocity - self.plat.base_velocity
        tangential = float(np.linalg.norm(dv - (dv @ n) * n))
        return gap, lateral, tangential

    def adjudicate(self, reason: str):
        td = self.cfg.touchdown
        gap, lateral, tangential = self.contact_geometry()
        pitch_q = pitch_of(self.quad.attitude)
        err = abs(pitch_q - self.plat.deck_pitch)
        x = float(self.quad.position[0])
        s = self.cfg.scenario
        in_window = s.window_start <= x <= s.window_end
        ok = (gap <= td.max_height_gap and lateral <= td.max_lateral_offset
              and err <= td.max_pitch_error and tangential <= td.max_tangential_speed)
        if not in_window:
            outcome = "window_missed"
        elif ok:
            outcome = "landed"
        else:
            outcome = "diverged"
        failed = []
        if gap > td.max_height_gap:
            failed.append("height_gap")
        if lateral > td.max_lateral_offset:
            failed.append("lateral_offset")
        if err > td.max_pitch_error:
            failed.append("pitch_error")
        if tangential > td.max_tangential_speed:
            failed.append("tangential_speed")
        if not in_window:
            failed.append("outside_window")
        why = reason if not failed else reason + ":" + "+".join(failed)
        self.finish(outcome, why, gap, lateral, tangential, err, x)

    def finish(self, outcome, reason, gap=math.nan, lateral=math.nan, tangential=math.nan, err=math.nan,
               x=math.nan):
        landing_time = self.t - self.t_commit if (self.t_commit is not None and not math.isnan(gap)) else math.nan
        self.report = LandingReport(
            outcome=outcome, strategy=self.strategy, speed=float(self.cfg.scenario.speed),
            landing_time=landing_time, pitch_error_deg=math.degrees(err), touchdown_offset=lateral,
            tangential_speed=tangential, replan_count=self.replans,
            desired_pitch_deg=math.degrees(self.plan.phi_opt) if self.plan is not None else math.nan,
            quad_pitch_deg=math.degrees(pitch_of(self.quad.attitude)),
            deck_pitch_deg=math.degrees(self.plat.deck_pitch), touchdown_x=x, height_gap=gap,
            reason=reason, t_end=self.t, max_speed=self.max_speed, max_accel_cmd=self.max_accel,
            plan_violations=self.violations, events=self.events, trace=self.trace)

    # -- main loop
    def control_tick(self):
        cfg = self.cfg
        self.perceive(cfg.sim.dt_control)
        check = self.tick % self.n_check == 0
        if self.phase == "acquire" and self.n_updates >= cfg.acquire.min_updates:
            if self.strategy == "hover_then_descend":
                self.t_commit = self.t
                self.phase = "align"
                self.events.append((round(self.t, 6), "commit", 0.0))
            elif self.t - self.last_plan_try >= 1.0:
                self.last_plan_try = self.t
                self.commit()
        elif self.phase == "approach" and check:
            ttg = self.time_to_go()
            if ttg >= cfg.replan.min_time_to_go:
                if (self.strategy == "cooperative" and self.deck_lag() > cfg.replan.lag_threshold
                        and self.replans < cfg.replan.max_replans):
                    self.replan()
                elif cfg.replan.retarget and ttg >= cfg.replan.retarget_min_time_to_go:
                    self.retarget()
        elif self.phase == "align":
            rel = self.rendezvous() + np.array([0.0, 0.0, cfg.scenario.offset[2]]) - self.quad.position
            dv = self.plat.base_velocity - self.quad.velocity
            if np.linalg.norm(rel[:2]) <= cfg.hover.align_pos and np.linalg.norm(dv[:2]) <= cfg.hover.align_vel:
                if self.aligned_since is None:
                    self.aligned_since = self.t
                elif self.t - self.aligned_since >= cfg.hover.align_hold - 1e-9:
                    self.phase = "descend"
                    self.descent = (self.t, float(self.quad.position[2] - self.rendezvous()[2]))
                    self.events.append((round(self.t, 6), "descend", 0.0))
            else:
                self.aligned_since = None
        self.flight_command()
        self.deck_cmd = self.deck_command()
        self.trace.add(round(self.t, 9), self.quad, self.plat, self.phase, self.cmd.collective_accel, self.alpha)

    def run(self) -> LandingReport:
        cfg = self.cfg
        s = cfg.scenario
        n_steps = int(round(s.t_max / self.dt))
        for k in range(n_steps + 1):
            self.t = k * self.dt
            if k % self.n_sub == 0:
                self.control_tick()
                self.tick += 1
                if self.report is not None:
                    return self.report
            if self.plat.base_position[0] > s.window_end and self.phase in ("acquire", "align"):
                self.finish("window_missed", "window_passed")
                return self.report
            cmd_rate = self.deck_input()
            self.quad = step_quad(self.quad, self.cmd, self.dt, cfg.quad.rate_lag)
            self.plat = step_platform(self.plat, cmd_rate, self.dt, self.line, cfg.deck.omega_plat, cfg.deck.phi_max)
            self.t = (k + 1) * self.dt
            if self.phase != "acquire":
                self.max_speed = max(self.max_speed, float(np.linalg.norm(self.quad.velocity)))
                gap, _, _ = self.contact_geometry()
                if gap <= 0.0:
                    self.adjudicate("contact")
                    return self.report
                if self.phase == "approach" and self.time_to_go() <= 1e-9:
                    self.adjudicate("trajectory_end")
                    return self.report
                if self.plat.base_position[0] > s.window_end and self.quad.position[0] > s.window_end:
                    self.finish("window_missed", "window_passed")
                    return self.report
        self.finish("timeout", "t_max")
        return self.report


def run_scenario(cfg: ScenarioConfig) -> LandingReport:
    """Run one scenario with the strategy named in the config.

    Invalid configs raise :class:`ValidationError`; everything that can go
    wrong during the run is reported in the outcome.
    """
    validate(cfg)
    return _Run(cfg).run()


def run_baseline_hover(cfg: ScenarioConfig) -> LandingReport:
    if cfg.scenario.strategy != "hover_then_descend":
        raise ValidationError("scenario.strategy", "hover baseline needs strategy hover_then_descend")
    return run_scenario(cfg)


def run_baseline_unilateral(cfg: ScenarioConfig) -> LandingReport:
    if cfg.scenario.strategy != "unilateral":
        raise ValidationError("scenario.strategy", "unilateral baseline needs strategy unilateral")
    return run_scenario(cfg)


def scenario_for(cfg: ScenarioConfig, strategy: str | None = None, speed: float | None = None,
                 offset=None, seed: int | None = None) -> ScenarioConfig:
    """Copy of ``cfg`` with the common scenario fields overridden."""
    vals = {}
    if strategy is not None:
        vals["scenario.strategy"] = strategy
    if speed is not None:
        vals["scenario.speed"] = float(speed)
    if offset is not None:
        vals["scenario.offset"] = tuple(float(v) for v in offset)
    if seed is not None:
        vals["scenario.seed"] = int(seed)
    return cfg.with_values(**vals) if vals else cfg
