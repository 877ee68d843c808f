"""Closed-form minimum-jerk quintics, one per axis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHorizon, OutOfDomain

COND_LIMIT = 1e12


@dataclass(frozen=True)
class QuinticAxis:
    """p(t) = sum(c[i] * t**i) on [0, T]."""

    c: tuple[float, float, float, float, float, float]
    T: float

    def eval(self, t: float) -> tuple[float, float, float, float]:
        c0, c1, c2, c3, c4, c5 = self.c
        p = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))))
        v = c1 + t * (2 * c2 + t * (3 * c3 + t * (4 * c4 + t * 5 * c5)))
        a = 2 * c2 + t * (6 * c3 + t * (12 * c4 + t * 20 * c5))
        j = 6 * c3 + t * (24 * c4 + t * 60 * c5)
        return p, v, a, j

    def jerk_cost(self) -> float:
        # jerk = A + B t + C t^2, integrated squared in closed form
        _, _, _, c3, c4, c5 = self.c
        A, B, C, T = 6 * c3, 24 * c4, 60 * c5, self.T
        return (A * A * T + A * B * T**2 + (B * B + 2 * A * C) * T**3 / 3
                + B * C * T**4 / 2 + C * C * T**5 / 5)


def _system_condition(T: float) -> float:
    m = np.array([[T**3, T**4, T**5],
                  [3 * T**2, 4 * T**3, 5 * T**4],
                  [6 * T, 12 * T**2, 20 * T**3]])
    return float(np.linalg.cond(m))


def solve_axis(p0, v0, a0, pf, vf, af, T) -> QuinticAxis:
    """Minimum-jerk quintic meeting position/velocity/acceleration at both ends.

    The terminal 3x3 system is inverted in closed form in normalised time
    ``tau = t / T`` and the coefficients are rescaled afterwards.
    """
    if not T > 0:
        raise DegenerateHorizon(f"horizon must be positive, got {T}")
    if _system_condition(T) > COND_LIMIT:
        raise DegenerateHorizon(f"boundary system ill-conditioned for T={T}")
    # residuals in normalised units
    dp = pf - (p0 + v0 * T + 0.5 * a0 * T * T)
    dv = (vf - (v0 + a0 * T)) * T
    da = (af - a0) * T * T
    d3 = 10.0 * dp - 4.0 * dv + 0.5 * da
    d4 = -15.0 * dp + 7.0 * dv - da
    d5 = 6.0 * dp - 3.0 * dv + 0.5 * da
    c = (float(p0), float(v0), 0.5 * a0, d3 / T**3, d4 / T**4, d5 / T**5)
    return QuinticAxis(tuple(float(x) for x in c), float(T))


@dataclass(frozen=True)
class QuinticTrajectory:
    axes: tuple[QuinticAxis, QuinticAxis, QuinticAxis]
    T_f: float
    terminal: np.ndarray  # 3x3, rows p, v, a at T_f

    def sample(self, t: float):
        """Position, velocity, acceleration, jerk at time ``t``."""
        if t < -1e-12 or t > self.T_f + 1e-12:
            raise OutOfDomain(f"t={t} outside [0, {self.T_f}]")
        t = min(max(t, 0.0), self.T_f)
        out = np.array([ax.eval(t) for ax in self.axes]).T
        return out[0], out[1], out[2], out[3]

    def jerk_cost(self) -> float:
        return sum(ax.jerk_cost() for ax in self.axes)


def generate_3d(p0, v0, a0, pf, vf, a_opt_xz, T_f) -> QuinticTrajectory:
    """Three decoupled quintics; the lateral terminal acceleration is zero.

    ``a_opt_xz`` is the terminal (x, z) acceleration from the terminal planner.
    """
    p0, v0, a0, pf, vf = (np.asarray(x, dtype=float).reshape(3) for x in (p0, v0, a0, pf, vf))
    af = np.array([a_opt_xz[0], 0.0, a_opt_xz[1]], dtype=float)
    axes = tuple(solve_axis(p0[k], v0[k], a0[k], pf[k], vf[k], af[k], T_f) for k in range(3))
    return QuinticTrajectory(axes, float(T_f), np.vstack([pf, vf, af]))


def jerk_cost(traj: QuinticTrajectory) -> float:
    return traj.jerk_cost()
