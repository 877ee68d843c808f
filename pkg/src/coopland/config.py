"""Scenario configuration and its flat ``section.key = value`` text format.

Every key has a documented default; an empty file gives the default
scenario. Angles accept a ``deg`` suffix and angular rates ``deg/s``;
without a suffix they are radians. Vectors are comma separated.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerGains
from .ekf import GATE_CHI2_3, NoiseParams
from .errors import ParseError, ValidationError
from .geometry import GRAVITY, OcpParams
from .servo import CameraModel, down_camera_mount, up_camera_mount

STRATEGIES = ("cooperative", "unilateral", "hover_then_descend")
EKF_MODES = ("fused", "sequential")


@dataclass(frozen=True)
class ScenarioSection:
    strategy: str = "cooperative"
    speed: float = 0.8  # platform speed along +x, m/s
    offset: tuple[float, float, float] = (-5.0, 0.0, 5.0)  # quad start relative to the deck, m
    seed: int = 0
    t_max: float = 60.0  # s
    window_start: float = -10.0  # along-track landing window, m
    window_end: float = 60.0
    actuation_delay_injection: float = 0.0  # s the deck ignores commands after the first commit


@dataclass(frozen=True)
class SimSection:
    dt_physics: float = 0.001
    dt_control: float = 0.01
    replan_period: float = 0.1


@dataclass(frozen=True)
class QuadSection:
    v_max: float = 5.0
    a_max: float = 5.0
    rate_lag: float = 0.03  # body-rate response time constant, s


@dataclass(frozen=True)
class OcpSection:
    w_a: float = 1.0
    w_j: float = 0.05
    w_T: float = 10.0
    n_knots: int = 20


@dataclass(frozen=True)
class DeckSection:
    phi_max: float = math.radians(35.0)
    omega_plat: float = math.radians(40.0)
    tau_delay: float = 0.2
    tag_offset: float = 0.15  # tag position along the deck x axis, m


@dataclass(frozen=True)
class ControllerSection:
    k_R: float = 6.0
    k_h: float = 0.0
    k_x: float = 4.0
    k_v: float = 4.0
    rate_limit_xy: float = 6.0
    rate_limit_z: float = 3.0


@dataclass(frozen=True)
class NoiseSection:
    sigma_pix: float = 0.01
    k_z: float = 2e-4
    k_vib: float = 0.005
    rho_scale: float = 0.005
    q: float = 0.01  # process noise per axis, m^2/s


@dataclass(frozen=True)
class EkfSection:
    mode: str = "fused"
    gate: float = GATE_CHI2_3
    init_sigma: float = 0.1  # prior std of the quad position, m


@dataclass(frozen=True)
class CameraSection:
    fx: float = 400.0
    fy: float = 400.0
    cx: float = 320.0
    cy: float = 240.0
    quad_tilt: float = math.radians(30.0)  # forward tilt of the downward camera
    platform_tilt: float = math.radians(30.0)  # backward tilt of the upward camera
    fov: float = math.radians(70.0)  # half angle
    max_incidence: float = math.radians(65.0)
    min_depth: float = 0.05


@dataclass(frozen=True)
class ServoSection:
    K_p: float = 1.0
    damping: float = 1e-3
    u_d: float = 320.0  # desired tag image point, px
    v_d: float = 240.0


@dataclass(frozen=True)
class AcquireSection:
    min_updates: int = 10


@dataclass(frozen=True)
class ReplanSection:
    lag_threshold: float = math.radians(2.0)
    min_time_to_go: float = 0.3  # monitor and retargeting stop this close to touchdown, s
    max_replans: int = 40
    retarget: bool = True
    retarget_min_time_to_go: float = 1.0  # s


@dataclass(frozen=True)
class TouchdownSection:
    max_height_gap: float = 0.05
    max_lateral_offset: float = 0.29
    max_pitch_error: float = math.radians(1.5)
    max_tangential_speed: float = 0.3
    approach_height: float = 0.02  # aim point above the deck centre, m


@dataclass(frozen=True)
class HoverSection:
    k_x: float = 0.5
    k_v: float = 1.0
    align_pos: float = 0.1
    align_vel: float = 0.1
    align_hold: float = 1.0
    descent_rate: float = 0.4


SECTIONS = {
    "scenario": ScenarioSection, "sim": SimSection, "quad": QuadSection, "ocp": OcpSection,
    "deck": DeckSection, "controller": ControllerSection, "noise": NoiseSection, "ekf": EkfSection,
    "camera": CameraSection, "servo": ServoSection, "acquire": AcquireSection,
    "replan": ReplanSection, "touchdown": TouchdownSection, "hover": HoverSection,
}

# keys stored in radians and written back in degrees
ANGLE_KEYS = {"deck.phi_max", "camera.quad_tilt", "camera.platform_tilt", "camera.fov",
              "camera.max_incidence", "replan.lag_threshold", "touchdown.max_pitch_error"}
RATE_KEYS = {"deck.omega_plat"}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    sim: SimSection = field(default_factory=SimSection)
    quad: QuadSection = field(default_factory=QuadSection)
    ocp: OcpSection = field(default_factory=OcpSection)
    deck: DeckSection = field(default_factory=DeckSection)
    controller: ControllerSection = field(default_factory=ControllerSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    ekf: EkfSection = field(default_factory=EkfSection)
    camera: CameraSection = field(default_factory=CameraSection)
    servo: ServoSection = field(default_factory=ServoSection)
    acquire: AcquireSection = field(default_factory=AcquireSection)
    replan: ReplanSection = field(default_factory=ReplanSection)
    touchdown: TouchdownSection = field(default_factory=TouchdownSection)
    hover: HoverSection = field(default_factory=HoverSection)

    def with_values(self, **dotted) -> "ScenarioConfig":
        """Copy with dotted keys replaced, e.g. ``with_values(**{"scenario.speed": 1.0})``."""
        cfg = self
        for key, value in dotted.items():
            sec, name = _split_key(key)
            cfg = dataclasses.replace(cfg, **{sec: dataclasses.replace(getattr(cfg, sec), **{name: value})})
        return validate(cfg)

    def get(self, key: str):
        sec, name = _split_key(key)
        return getattr(getattr(self, sec), name)

    # builders for the library parameter records
    def ocp_params(self) -> OcpParams:
        return OcpParams(w_a=self.ocp.w_a, w_j=self.ocp.w_j, w_T=self.ocp.w_T, v_max=self.quad.v_max,
                         a_max=self.quad.a_max, phi_max=self.deck.phi_max,
                         omega_plat=self.deck.omega_plat, tau_delay=self.deck.tau_delay, g=GRAVITY)

    def controller_gains(self, hover: bool = False) -> ControllerGains:
        c = self.controller
        k_x, k_v = (self.hover.k_x, self.hover.k_v) if hover else (c.k_x, c.k_v)
        return ControllerGains(k_R=c.k_R, k_h=c.k_h, k_x=k_x, k_v=k_v,
                               rate_limit=(c.rate_limit_xy, c.rate_limit_xy, c.rate_limit_z),
                               a_max=self.quad.a_max)

    def noise_params(self) -> NoiseParams:
        n = self.noise
        return NoiseParams(n.sigma_pix, n.k_z, n.k_vib, n.rho_scale, n.q * np.eye(6))

    def quad_camera(self) -> CameraModel:
        c = self.camera
        return CameraModel(c.fx, c.fy, c.cx, c.cy, down_camera_mount(c.quad_tilt), "quad")

    def platform_camera(self) -> CameraModel:
        c = self.camera
        return CameraModel(c.fx, c.fy, c.cx, c.cy, up_camera_mount(c.platform_tilt), "platform")


def _split_key(key: str) -> tuple[str, str]:
    sec, _, name = key.partition(".")
    if sec not in SECTIONS or not name or name not in {f.name for f in dataclasses.fields(SECTIONS[sec])}:
        raise ValidationError(key, "unknown key")
    return sec, name


def all_keys() -> list[str]:
    return [f"{s}.{f.name}" for s, cls in SECTIONS.items() for f in dataclasses.fields(cls)]


def _field_type(key: str):
    sec, name = _split_key(key)
    return type(getattr(SECTIONS[sec](), name))


def _parse_value(key: str, text: str, line: int):
    kind = _field_type(key)
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(text)
            return low in ("true", "yes", "1")
        if kind is int:
            return int(text)
        if kind is str:
            return text
        if kind is tuple:
            parts = [float(p) for p in text.strip("()[] ").split(",")]
            if len(parts) != 3:
                raise ValueError(text)
            return tuple(parts)
        if key in RATE_KEYS and text.endswith("deg/s"):
            return math.radians(float(text[:-5]))
        if key in ANGLE_KEYS | RATE_KEYS and text.endswith("deg"):
            return math.radians(float(text[:-3]))
        return float(text)
    except ValueError:
        raise ParseError(line, f"cannot read {text!r} as a value for {key}") from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse the flat dotted-key format; unknown or repeated keys are rejected."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, "expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            _split_key(key)
        except ValidationError:
            raise ParseError(lineno, f"unknown key {key!r}") from None
        if key in values:
            raise ParseError(lineno, f"duplicate key {key!r}")
        values[key] = _parse_value(key, val, lineno)
    return ScenarioConfig().with_values(**values) if values else validate(ScenarioConfig())


def _format_value(key: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        # radians are written exactly; the degree value is only a comment
        if key in RATE_KEYS:
            return f"{value!r}  # {math.degrees(value):.6g} deg/s"
        if key in ANGLE_KEYS:
            return f"{value!r}  # {math.degrees(value):.6g} deg"
        return repr(value)
    return str(value)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Every key in the flat format; ``parse_config`` reads it back exactly."""
    lines = []
    for sec in SECTIONS:
        lines.append(f"# {sec}")
        for f in dataclasses.fields(SECTIONS[sec]):
            key = f"{sec}.{f.name}"
            lines.append(f"{key} = {_format_value(key, cfg.get(key))}")
    return "\n".join(lines) + "\n"


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every documented invariant; raises :class:`ValidationError`."""
    s = cfg.scenario

    def need(ok: bool, key: str, reason: str):
        if not ok:
            raise ValidationError(key, reason)

    need(s.strategy in STRATEGIES, "scenario.strategy", f"must be one of {STRATEGIES}")
    need(s.speed >= 0 and math.isfinite(s.speed), "scenario.speed", "must be finite and >= 0")
    need(all(math.isfinite(v) for v in s.offset), "scenario.offset", "must be finite")
    need(s.offset[2] > 0, "scenario.offset", "quadrotor must start above the deck")
    need(s.t_max > 0, "scenario.t_max", "must be positive")
    need(s.window_start < s.window_end, "scenario.window_start", "window start must be below its end")
    need(s.actuation_delay_injection >= 0, "scenario.actuation_delay_injection", "must be >= 0")
    need(cfg.sim.dt_physics > 0, "sim.dt_physics", "must be positive")
    need(cfg.sim.dt_physics <= cfg.sim.dt_control, "sim.dt_physics", "must not exceed sim.dt_control")
    ratio = cfg.sim.dt_control / cfg.sim.dt_physics
    need(abs(ratio - round(ratio)) < 1e-9, "sim.dt_control", "must be a multiple of sim.dt_physics")
    need(cfg.sim.replan_period >= cfg.sim.dt_control, "sim.replan_period", "must be >= sim.dt_control")
    need(cfg.quad.v_max > 0, "quad.v_max", "must be positive")
    need(cfg.quad.a_max > 0, "quad.a_max", "must be positive")
    need(cfg.quad.rate_lag > 0, "quad.rate_lag", "must be positive")
    need(cfg.ocp.w_j > 0, "ocp.w_j", "must be positive")
    need(cfg.ocp.w_a >= 0, "ocp.w_a", "must be >= 0")
    need(cfg.ocp.w_T >= 0, "ocp.w_T", "must be >= 0")
    need(cfg.ocp.n_knots >= 8, "ocp.n_knots", "must be >= 8")
    need(0 < cfg.deck.phi_max < math.pi / 2, "deck.phi_max", "must lie in (0, 90deg)")
    need(cfg.deck.omega_plat > 0, "deck.omega_plat", "must be positive")
    need(cfg.deck.tau_delay >= 0, "deck.tau_delay", "must be >= 0")
    need(cfg.controller.k_R > 0, "controller.k_R", "must be positive")
    for key in ("controller.k_h", "controller.k_x", "controller.k_v", "hover.k_x", "hover.k_v"):
        need(cfg.get(key) >= 0, key, "must be >= 0")
    for key in ("controller.rate_limit_xy", "controller.rate_limit_z"):
        need(cfg.get(key) > 0, key, "must be positive")
    for key in ("noise.sigma_pix", "noise.k_z", "noise.k_vib", "noise.rho_scale", "noise.q"):
        need(cfg.get(key) >= 0, key, "must be >= 0")
    need(cfg.ekf.mode in EKF_MODES, "ekf.mode", f"must be one of {EKF_MODES}")
    need(cfg.ekf.gate > 0, "ekf.gate", "must be positive")
    need(cfg.ekf.init_sigma > 0, "ekf.init_sigma", "must be positive")
    need(cfg.camera.fx > 0 and cfg.camera.fy > 0, "camera.fx", "focal lengths must be positive")
    need(0 < cfg.camera.fov < math.pi / 2, "camera.fov", "must lie in (0, 90deg)")
    need(0 < cfg.camera.max_incidence <= math.pi / 2, "camera.max_incidence", "must lie in (0, 90deg]")
    need(cfg.servo.K_p > 0, "servo.K_p", "must be positive")
    need(cfg.servo.damping >= 0, "servo.damping", "must be >= 0")
    need(cfg.acquire.min_updates >= 1, "acquire.min_updates", "must be >= 1")
    need(cfg.replan.lag_threshold > 0, "replan.lag_threshold", "must be positive")
    need(cfg.replan.max_replans >= 0, "replan.max_replans", "must be >= 0")
    for key in ("touchdown.max_height_gap", "touchdown.max_lateral_offset",
                "touchdown.max_pitch_error", "touchdown.max_tangential_speed",
                "hover.align_pos", "hover.align_vel", "hover.descent_rate"):
        need(cfg.get(key) > 0, key, "must be positive")
    need(0 <= cfg.touchdown.approach_height < cfg.touchdown.max_height_gap, "touchdown.approach_height",
         "must lie in [0, touchdown.max_height_gap)")
    need(cfg.hover.align_hold >= 0, "hover.align_hold", "must be >= 0")
    return cfg
