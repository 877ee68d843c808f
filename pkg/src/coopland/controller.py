"""Geometric tracking controller producing collective thrust and body rates.

The outer loop turns a reference point (position, velocity, acceleration)
into a desired acceleration with PD feedback. The inner loop maps that
acceleration to a desired attitude, a collective thrust along the current
body z axis, and a body-rate command made of proportional attitude
feedback plus a flatness-based feedforward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FreeFallSingularity, GimbalDegeneracy
from .geometry import E3, GRAVITY, vee


@dataclass(frozen=True)
class ControlCommand:
    collective_accel: float  # mass-normalised thrust, m/s^2
    body_rate_cmd: np.ndarray  # rad/s, body frame

    def __post_init__(self):
        if not np.isfinite(self.collective_accel) or self.collective_accel < 0:
            raise ValueError("collective_accel must be finite and nonnegative")
        if not np.all(np.isfinite(self.body_rate_cmd)):
            raise ValueError("body_rate_cmd must be finite")


@dataclass(frozen=True)
class ControllerGains:
    k_R: float = 6.0  # attitude error to rate, 1/s
    k_h: float = 0.0  # horizontal drag compensation, 1/m
    rate_limit: tuple[float, float, float] = (6.0, 6.0, 3.0)
    k_x: float = 4.0  # position feedback, 1/s^2
    k_v: float = 4.0  # velocity feedback, 1/s
    a_max: float | None = None  # clamp on the commanded acceleration norm

    def __post_init__(self):
        if self.k_R <= 0:
            raise ValueError("k_R must be positive")
        if self.k_h < 0 or self.k_x < 0 or self.k_v < 0:
            raise ValueError("k_h, k_x and k_v must be nonnegative")
        if any(r <= 0 for r in self.rate_limit):
            raise ValueError("rate limits must be positive")


def attitude_error(R, R_d) -> np.ndarray:
    """e_R = 0.5 * vee(R_d^T R - R^T R_d)."""
    R = np.asarray(R, dtype=float)
    R_d = np.asarray(R_d, dtype=float)
    M = R_d.T @ R - R.T @ R_d
    return 0.5 * vee(0.5 * (M - M.T))


def desired_attitude(a_des, yaw_des: float = 0.0, g: float = GRAVITY) -> np.ndarray:
    """Attitude whose z axis points along the required thrust ``a_des + g e3``.

    The body x axis is the yaw heading projected onto the plane normal to
    body z.
    """
    f = np.asarray(a_des, dtype=float) + g * E3
    nf = np.linalg.norm(f)
    if nf <= 1e-6:
        raise FreeFallSingularity("a_des + g e3 vanishes; thrust direction undefined")
    b3 = f / nf
    heading = np.array([np.cos(yaw_des), np.sin(yaw_des), 0.0])
    b1 = heading - (heading @ b3) * b3
    n1 = np.linalg.norm(b1)
    if n1 <= 1e-6:
        raise GimbalDegeneracy("yaw heading is parallel to the thrust axis")
    b1 /= n1
    b2 = np.cross(b3, b1)
    return np.column_stack([b1, b2, b3])


def thrust_command(a_des, v_b, R, gains: ControllerGains, g: float = GRAVITY) -> float:
    """Collective acceleration along the current body z axis, clamped at zero."""
    R = np.asarray(R, dtype=float)
    e1, e2, e3 = R[:, 0], R[:, 1], R[:, 2]
    c = (np.asarray(a_des, dtype=float) + g * E3) @ e3
    c -= gains.k_h * float(np.asarray(v_b, dtype=float) @ (e1 + e2)) ** 2
    return max(float(c), 0.0)


def rate_command(e_R, omega_ref, gains: ControllerGains) -> np.ndarray:
    """Proportional attitude feedback plus feedforward, clamped per axis."""
    w = -gains.k_R * np.asarray(e_R, dtype=float) + np.asarray(omega_ref, dtype=float)
    lim = np.asarray(gains.rate_limit, dtype=float)
    return np.clip(w, -lim, lim)


def feedforward_rates(traj, t: float, yaw=0.0, h: float = 1e-4, g: float = GRAVITY) -> np.ndarray:
    """Body rates along the reference from a central difference of R_d.

    ``yaw`` is a constant or a callable of time. Near the ends of the
    horizon the difference becomes one-sided.
    """
    traj.sample(t)  # domain check
    yaw_at = yaw if callable(yaw) else (lambda _t: yaw)
    t0 = max(t - h, 0.0)
    t1 = min(t + h, traj.T_f)
    R0 = desired_attitude(traj.sample(t0)[2], yaw_at(t0), g)
    R1 = desired_attitude(traj.sample(t1)[2], yaw_at(t1), g)
    R = desired_attitude(traj.sample(t)[2], yaw_at(t), g)
    M = R.T @ (R1 - R0) / (t1 - t0)
    return vee(0.5 * (M - M.T))


def tracking_accel(p, v, p_ref, v_ref, a_ref, gains: ControllerGains) -> np.ndarray:
    """Reference acceleration plus PD feedback, optionally norm-clamped."""
    a = (np.asarray(a_ref, dtype=float) + gains.k_x * (np.asarray(p_ref, dtype=float) - p)
         + gains.k_v * (np.asarray(v_ref, dtype=float) - v))
    if gains.a_max is not None:
        n = np.linalg.norm(a)
        if n > gains.a_max:
            a *= gains.a_max / n
    return a


def control(R, v_b, a_des, omega_ref, gains: ControllerGains, yaw_des: float = 0.0,
            g: float = GRAVITY) -> tuple[ControlCommand, np.ndarray]:
    """One controller tick; returns the command and the desired attitude."""
    R_d = desired_attitude(a_des, yaw_des, g)
    e_R = attitude_error(R, R_d)
    cmd = ControlCommand(thrust_command(a_des, v_b, R, gains, g), rate_command(e_R, omega_ref, gains))
    return cmd, R_d
