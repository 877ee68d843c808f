"""Terminal-attitude planning in the longitudinal (x, z) plane.

For a fixed horizon the problem is a convex QCQP: a triple integrator per
axis with piecewise-constant jerk, a quadrature of the acceleration/jerk
running cost, per-knot velocity and acceleration disks and a linear bound on
the terminal tilt. An outer one-dimensional search picks the horizon,
trading the running cost against ``w_T * T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .errors import Infeasible, InvertedThrust, NoFeasibleHorizon, SolverFailure
from .geometry import OcpParams, PlanarState

TILT_FLOOR = 1e-3  # lower bound on a_z(T) + g, m/s^2
CONSTRAINT_TOL = 1e-6


@dataclass(frozen=True)
class BoundaryCondition2D:
    initial: PlanarState
    terminal_position: tuple[float, float]
    terminal_velocity: tuple[float, float]
    # the rendezvous point advances at terminal_velocity (a moving deck)
    moving: bool = False

    def terminal_position_at(self, T: float) -> tuple[float, float]:
        if not self.moving:
            return self.terminal_position
        return (self.terminal_position[0] + self.terminal_velocity[0] * T,
                self.terminal_position[1] + self.terminal_velocity[1] * T)

    def validate(self, params: OcpParams) -> "BoundaryCondition2D":
        vals = [*self.terminal_position, *self.terminal_velocity]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("boundary condition must be finite")
        if math.hypot(*self.terminal_velocity) > params.v_max + 1e-12:
            raise ValueError("terminal velocity exceeds v_max")
        return self


@dataclass
class HorizonSolution:
    """Optimal discretised trajectory for one fixed horizon."""

    T: float
    cost: float  # running cost only
    times: np.ndarray  # (N+1,)
    states: np.ndarray  # (N+1, 6) p_x, p_z, v_x, v_z, a_x, a_z
    jerks: np.ndarray  # (N, 2)
    iterations: int = 0
    method: str = "kkt"
    warm: tuple | None = field(default=None, repr=False)  # solver (x, y) for warm starts


@dataclass
class TerminalPlan:
    a_opt: tuple[float, float]
    T_f: float
    phi_opt: float
    cost: float  # running cost + w_T * T_f
    times: np.ndarray
    states: np.ndarray
    jerks: np.ndarray
    running_cost: float = 0.0
    phi_start: float = 0.0  # deck pitch when the plan is committed
    flat_terminal: bool = False
    evaluated: dict = field(default_factory=dict, repr=False)

    @property
    def discretized_states(self):
        """List of ``(t, PlanarState, (j_x, j_z))``; the last knot has no jerk."""
        out = []
        for k, t in enumerate(self.times):
            u = tuple(self.jerks[k]) if k < len(self.jerks) else (0.0, 0.0)
            out.append((float(t), PlanarState(*map(float, self.states[k])), u))
        return out


def tilt_from_accel(a_x: float, a_z: float, g: float = 9.81) -> float:
    """Pitch of the thrust direction needed for acceleration (a_x, a_z)."""
    if a_z + g <= 0:
        raise InvertedThrust(f"a_z + g = {a_z + g} <= 0")
    return math.atan2(a_x, a_z + g)


def _trap_weights(N):
    w = np.ones(N + 1)
    w[0] = w[-1] = 0.5
    return w


class FixedHorizonProblem:
    """Transcription of the fixed-horizon problem into a :class:`convex.ConeProgram`.

    Decision vector: the six states at every knot followed by the two jerks
    of every interval. Dynamics are equality rows, so the cost is diagonal
    and every inequality acts on a single knot.
    """

    def __init__(self, bc: BoundaryCondition2D, T: float, params: OcpParams, n_knots: int,
                 flat_terminal: bool = False):
        if not T > 0:
            raise ValueError("horizon must be positive")
        if n_knots < 8:
            raise ValueError("n_knots must be at least 8")
        self.bc, self.T, self.params, self.flat = bc, float(T), params, flat_terminal
        N = n_knots - 1
        self.N = N
        h = self.T / N
        self.h = h
        ns = 6 * (N + 1)
        nv = ns + 2 * N
        self.ns = ns

        def sidx(k, comp):  # comp: 0..5 = p_x, p_z, v_x, v_z, a_x, a_z
            return 6 * k + comp

        def jidx(k, ax):
            return ns + 2 * k + ax

        # objective: w_a * trapezoid(|a|^2) + w_j * h * |j|^2 (diagonal)
        diag = np.zeros(nv)
        w = _trap_weights(N) * h * params.w_a
        for k in range(N + 1):
            diag[sidx(k, 4)] = diag[sidx(k, 5)] = 2.0 * w[k]
        diag[ns:] = 2.0 * params.w_j * h
        P = np.diag(diag)
        q = np.zeros(nv)

        A_eq, b_eq = [], []

        def eq_row(coefs, rhs):
            r = np.zeros(nv)
            for i, c in coefs:
                r[i] += c
            A_eq.append(r)
            b_eq.append(rhs)

        x0 = bc.initial.as_array()
        for c in range(6):
            eq_row([(sidx(0, c), 1.0)], x0[c])
        for k in range(N):
            for ax in (0, 1):
                p0, v0, a0 = sidx(k, ax), sidx(k, 2 + ax), sidx(k, 4 + ax)
                p1, v1, a1 = sidx(k + 1, ax), sidx(k + 1, 2 + ax), sidx(k + 1, 4 + ax)
                j = jidx(k, ax)
                eq_row([(p1, 1.0), (p0, -1.0), (v0, -h), (a0, -0.5 * h * h), (j, -h**3 / 6.0)], 0.0)
                eq_row([(v1, 1.0), (v0, -1.0), (a0, -h), (j, -0.5 * h * h)], 0.0)
                eq_row([(a1, 1.0), (a0, -1.0), (j, -h)], 0.0)
        (xf, zf), (vxf, vzf) = bc.terminal_position_at(self.T), bc.terminal_velocity
        for c, val in ((0, xf), (1, zf), (2, vxf), (3, vzf)):
            eq_row([(sidx(N, c), 1.0)], val)
        if flat_terminal:
            eq_row([(sidx(N, 4), 1.0)], 0.0)

        # a_x - tan*a_z <= tan*g ; -a_x - tan*a_z <= tan*g ; a_z >= floor - g
        tan_m = math.tan(params.phi_max)
        g = params.g
        A_box = np.zeros((3, nv))
        A_box[0, sidx(N, 4)], A_box[0, sidx(N, 5)] = 1.0, -tan_m
        A_box[1, sidx(N, 4)], A_box[1, sidx(N, 5)] = -1.0, -tan_m
        A_box[2, sidx(N, 5)] = 1.0
        lo = np.array([-np.inf, -np.inf, TILT_FLOOR - g])
        hi = np.array([tan_m * g, tan_m * g, np.inf])

        disk_rows, radii = [], []
        for comp, lim in ((2, params.v_max), (4, params.a_max)):
            for k in range(1, N + 1):
                for ax in (0, 1):
                    r = np.zeros(nv)
                    r[sidx(k, comp + ax)] = 1.0
                    disk_rows.append(r)
                radii.append(lim)
        self.program = convex.ConeProgram(
            P=P, q=q,
            A_eq=np.array(A_eq), b_eq=np.array(b_eq),
            A_box=A_box, lo=lo, hi=hi,
            A_disk=np.array(disk_rows), centers=np.zeros((len(radii), 2)), radii=np.array(radii),
        )

    def states_of(self, x) -> np.ndarray:
        return np.asarray(x[:self.ns]).reshape(self.N + 1, 6).copy()

    def jerks_of(self, x) -> np.ndarray:
        return np.asarray(x[self.ns:]).reshape(self.N, 2).copy()

    def running_cost(self, states, jerks) -> float:
        return running_cost(states, jerks, self.h, self.params)


def running_cost(states, jerks, h, params: OcpParams) -> float:
    """Trapezoidal acceleration term plus exact piecewise-constant jerk term."""
    a2 = states[:, 4] ** 2 + states[:, 5] ** 2
    w = _trap_weights(len(states) - 1)
    return float(params.w_a * h * (w @ a2) + params.w_j * h * (jerks ** 2).sum())


def solve_fixed_horizon(bc: BoundaryCondition2D, T: float, params: OcpParams, n_knots: int = 20,
                        *, flat_terminal: bool = False, max_iter: int = 5000, warm=None) -> HorizonSolution:
    """Optimal trajectory for horizon ``T``.

    The equality-constrained optimum is tried first; when it already meets
    every inequality it is the solution of the convex problem. Otherwise the
    splitting solver runs.

    Raises
    ------
    Infeasible
        When the solver certifies infeasibility.
    SolverFailure
        When the iteration cap is reached.
    """
    prob = FixedHorizonProblem(bc, T, params, n_knots, flat_terminal)
    prog = prob.program
    x = convex.solve_equality_qp(prog)
    method, iters, duals = "kkt", 0, None
    if prog.max_violation(x) > 1e-9:
        x0, y0 = warm if warm is not None else (x, None)
        res = convex.solve(prog, max_iter=max_iter, x0=x0, y0=y0)
        if res.status == "infeasible":
            raise Infeasible(f"no trajectory for T={T:.4f}")
        if res.status != "solved":
            raise SolverFailure(f"no convergence in {max_iter} iterations for T={T:.4f}")
        x, method, iters = res.x, "admm+polish" if res.polished else "admm", res.iterations
        duals = res.y
    N = prob.N
    jerks = prob.jerks_of(x)
    states = prob.states_of(x)
    return HorizonSolution(prob.T, prob.running_cost(states, jerks), np.linspace(0, prob.T, N + 1),
                           states, jerks, iters, method,
                           (x, duals) if duals is not None else None)


def required_duration(phi_opt: float, params: OcpParams, phi_start: float = 0.0) -> float:
    """Shortest horizon that lets the deck reach ``phi_opt`` from ``phi_start``."""
    return abs(phi_opt - phi_start) / params.omega_plat + params.tau_delay


def _plan_from(sol: HorizonSolution, params, phi_start, flat, evaluated) -> TerminalPlan:
    ax, az = sol.states[-1, 4], sol.states[-1, 5]
    phi = 0.0 if flat else tilt_from_accel(ax, az, params.g)
    return TerminalPlan((float(ax), float(az)), sol.T, phi, sol.cost + params.w_T * sol.T,
                        sol.times, sol.states, sol.jerks, sol.cost, phi_start, flat, evaluated)


def solve_terminal_plan(bc: BoundaryCondition2D, params: OcpParams, n_knots: int = 20, *,
                        phi_start: float = 0.0, flat_terminal: bool = False,
                        grid_step: float = 0.25, span: float = 10.0, refine_tol: float = 1e-2,
                        max_rounds: int = 10, min_horizon: float = 0.1) -> TerminalPlan:
    """Horizon search wrapped around :func:`solve_fixed_horizon`.

    The actuation-time bound depends on the tilt of the solution, so the
    lower end of the search bracket is tightened and the search re-run until
    it moves by less than 1 ms (at most ``max_rounds`` rounds). Among all
    evaluated horizons that satisfy their own actuation bound, the cheapest
    total cost wins; ties within 1e-6 go to the shortest horizon.

    ``phi_start`` is the current deck pitch (zero for a fresh plan);
    ``flat_terminal`` pins the terminal tilt to zero.
    """
    bc.validate(params)
    cache: dict[float, HorizonSolution | None] = {}

    def evaluate(T: float) -> float:
        key = round(T, 9)
        if key not in cache:
            near = [k for k, v in cache.items() if v is not None and v.warm is not None]
            warm = cache[min(near, key=lambda k: abs(k - T))].warm if near else None
            try:
                sol = solve_fixed_horizon(bc, T, params, n_knots, flat_terminal=flat_terminal, warm=warm)
                cache[key] = sol
            except (Infeasible, SolverFailure):
                cache[key] = None
        sol = cache[key]
        if sol is None:
            return math.inf
        return sol.cost + params.w_T * sol.T

    def consistent(sol: HorizonSolution) -> bool:
        if flat_terminal:
            phi = 0.0
        else:
            phi = math.atan2(sol.states[-1, 4], sol.states[-1, 5] + params.g)
        return sol.T >= required_duration(phi, params, phi_start) - 1e-12

    def search(t_lo: float):
        grid = t_lo + grid_step * np.arange(int(round(span / grid_step)) + 1)
        grid = grid[grid >= min_horizon]
        # scan from the long end; once a feasible horizon has been followed by
        # an infeasible one, shorter horizons are taken as infeasible too
        vals = np.full(len(grid), math.inf)
        seen_feasible = False
        for k in range(len(grid) - 1, -1, -1):
            vals[k] = evaluate(grid[k])
            if math.isfinite(vals[k]):
                seen_feasible = True
            elif seen_feasible:
                break
        if not np.isfinite(vals).any():
            return None
        i = int(np.argmin(vals))
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, len(grid) - 1)]
        invphi = (math.sqrt(5) - 1) / 2
        c_, d_ = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = evaluate(c_), evaluate(d_)
        while b - a > refine_tol:
            if fc <= fd:
                b, d_, fd = d_, c_, fc
                c_ = b - invphi * (b - a)
                fc = evaluate(c_)
            else:
                a, c_, fc = c_, d_, fd
                d_ = a + invphi * (b - a)
                fd = evaluate(d_)
        return best_consistent()

    def best_consistent():
        best, best_val = None, math.inf
        for key in sorted(cache):
            sol = cache[key]
            if sol is None or not consistent(sol):
                continue
            val = sol.cost + params.w_T * sol.T
            if val < best_val - 1e-6:
                best, best_val = sol, val
        return best

    # tilt unknown before the first solve: start from zero deck travel
    t_lo = max(required_duration(0.0 if flat_terminal else phi_start, params, phi_start), min_horizon)
    best = None
    for _ in range(max_rounds):
        best = search(t_lo)
        if best is None:
            break
        phi = 0.0 if flat_terminal else math.atan2(best.states[-1, 4], best.states[-1, 5] + params.g)
        t_new = max(t_lo, required_duration(phi, params, phi_start))
        if abs(t_new - t_lo) <= 1e-3:
            break
        t_lo = t_new
    if best is None:
        raise NoFeasibleHorizon("no feasible horizon in the search bracket")
    return _plan_from(best, params, phi_start, flat_terminal, cache)


def verify_plan(plan: TerminalPlan, bc: BoundaryCondition2D, params: OcpParams,
                tol: float = CONSTRAINT_TOL) -> list[str]:
    """Independent re-check of every constraint; returns violation messages."""
    out = []
    st, jk, t = np.asarray(plan.states), np.asarray(plan.jerks), np.asarray(plan.times)
    N = len(jk)
    if len(st) != N + 1 or len(t) != N + 1:
        return ["shape: states, jerks and times disagree"]
    h = plan.T_f / N
    if np.abs(np.diff(t) - h).max() > 1e-9 or abs(t[-1] - plan.T_f) > 1e-9:
        out.append("grid: knots are not uniform on [0, T_f]")
    # dynamics: exact integration of piecewise-constant jerk
    for ax in (0, 1):
        p, v, a = st[:-1, ax], st[:-1, 2 + ax], st[:-1, 4 + ax]
        j = jk[:, ax]
        err = max(
            np.abs(st[1:, ax] - (p + v * h + a * h * h / 2 + j * h**3 / 6)).max(),
            np.abs(st[1:, 2 + ax] - (v + a * h + j * h * h / 2)).max(),
            np.abs(st[1:, 4 + ax] - (a + j * h)).max(),
        )
        if err > tol:
            out.append(f"dynamics: axis {'xz'[ax]} integration mismatch {err:.3g}")
    if np.abs(st[0] - bc.initial.as_array()).max() > tol:
        out.append("initial_state: first knot differs from the initial state")
    xf, zf = bc.terminal_position_at(plan.T_f)
    if max(abs(st[-1, 0] - xf), abs(st[-1, 1] - zf)) > tol:
        out.append("terminal_position: final knot misses the rendezvous point")
    if max(abs(st[-1, 2] - bc.terminal_velocity[0]), abs(st[-1, 3] - bc.terminal_velocity[1])) > tol:
        out.append("terminal_velocity: final knot misses the rendezvous velocity")
    vn = np.hypot(st[1:, 2], st[1:, 3])
    if vn.max() > params.v_max + tol:
        out.append(f"velocity_limit: |v| reaches {vn.max():.6f} > {params.v_max}")
    an = np.hypot(st[1:, 4], st[1:, 5])
    if an.max() > params.a_max + tol:
        out.append(f"acceleration_limit: |a| reaches {an.max():.6f} > {params.a_max}")
    ax_f, az_f = plan.a_opt
    if az_f + params.g <= 0:
        out.append("terminal_tilt: inverted thrust at touchdown")
    else:
        ratio = abs(ax_f / (az_f + params.g))
        bound = 0.0 if plan.flat_terminal else math.tan(params.phi_max)
        if ratio > bound + tol:
            out.append(f"terminal_tilt: |a_x/(a_z+g)| = {ratio:.6f} exceeds {bound:.6f}")
        phi = 0.0 if plan.flat_terminal else math.atan2(ax_f, az_f + params.g)
        if abs(phi - plan.phi_opt) > 1e-9:
            out.append("terminal_tilt: phi_opt inconsistent with terminal acceleration")
    if abs(st[-1, 4] - ax_f) > tol or abs(st[-1, 5] - az_f) > tol:
        out.append("terminal_tilt: a_opt differs from the final knot")
    t_req = required_duration(plan.phi_opt, params, plan.phi_start)
    if plan.T_f < t_req - 1e-12:
        out.append(f"actuation_time: T_f = {plan.T_f:.4f} < {t_req:.4f}")
    return out
