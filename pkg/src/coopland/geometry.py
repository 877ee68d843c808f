"""Shared value types and rotation utilities.

World frame is x forward (direction of platform travel), y left, z up, with
gravity along -z. Rotations are plain 3x3 numpy arrays mapping body
coordinates to world coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GRAVITY = 9.81
ORTHO_TOL = 1e-9
SKEW_TOL = 1e-9

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite vector {a}")
    return a


def hat(v) -> np.ndarray:
    """Skew-symmetric matrix with ``hat(v) @ w == cross(v, w)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m) -> np.ndarray:
    """Inverse of :func:`hat`. Rejects matrices that are not antisymmetric."""
    m = np.asarray(m, dtype=float)
    if np.linalg.norm(m + m.T) > SKEW_TOL:
        raise ValueError("vee() needs an antisymmetric matrix")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def is_rotation(r, tol: float = ORTHO_TOL) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    return bool(np.abs(r.T @ r - np.eye(3)).max() <= tol and abs(np.linalg.det(r) - 1.0) <= tol)


def rotation(r) -> np.ndarray:
    """Validate and return ``r`` as a rotation matrix."""
    r = np.array(r, dtype=float)
    if not is_rotation(r):
        raise ValueError("matrix is not a proper rotation within 1e-9")
    return r


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def expm_so3(w) -> np.ndarray:
    """Rodrigues formula for ``exp(hat(w))``."""
    wx, wy, wz = w
    theta = math.sqrt(wx * wx + wy * wy + wz * wz)
    k = hat(w)
    if theta < 1e-8:
        return np.eye(3) + k + 0.5 * (k @ k)
    return np.eye(3) + (math.sin(theta) / theta) * k + ((1.0 - math.cos(theta)) / theta**2) * (k @ k)


def logm_so3(r) -> np.ndarray:
    """Rotation vector of ``r`` (angle below pi)."""
    r = np.asarray(r, dtype=float)
    c = max(-1.0, min(1.0, 0.5 * (np.trace(r) - 1.0)))
    theta = math.acos(c)
    skew = 0.5 * (r - r.T)
    w = np.array([skew[2, 1], skew[0, 2], skew[1, 0]])
    if theta < 1e-8:
        return w
    return w * (theta / math.sin(theta))


def pitch_of(r) -> float:
    """Tilt of the body z axis in the x-z plane, as a rotation about +y."""
    return math.atan2(r[0, 2], r[2, 2])


@dataclass(frozen=True)
class PlanarState:
    """Longitudinal-plane state used by the terminal planner."""

    p_bx: float
    p_bz: float
    v_bx: float = 0.0
    v_bz: float = 0.0
    a_bx: float = 0.0
    a_bz: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in self.as_array()):
            raise ValueError("PlanarState must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_bx, self.p_bz, self.v_bx, self.v_bz, self.a_bx, self.a_bz])

    def axis(self, k: int) -> tuple[float, float, float]:
        """(p, v, a) along axis 0 (x) or 1 (z)."""
        if k == 0:
            return self.p_bx, self.v_bx, self.a_bx
        return self.p_bz, self.v_bz, self.a_bz


@dataclass(frozen=True)
class QuadState:
    position: np.ndarray
    velocity: np.ndarray
    attitude: np.ndarray = field(default_factory=lambda: np.eye(3))
    body_rate: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @classmethod
    def at(cls, position, velocity=(0.0, 0.0, 0.0)) -> "QuadState":
        return cls(vec3(position), vec3(velocity), np.eye(3), np.zeros(3))

    def validate(self) -> "QuadState":
        vec3(self.position)
        vec3(self.velocity)
        vec3(self.body_rate)
        rotation(self.attitude)
        return self


@dataclass(frozen=True)
class PlatformState:
    base_position: np.ndarray
    base_velocity: np.ndarray
    deck_pitch: float = 0.0
    deck_pitch_rate: float = 0.0

    def deck_rotation(self) -> np.ndarray:
        return rot_y(self.deck_pitch)

    def deck_normal(self) -> np.ndarray:
        return np.array([math.sin(self.deck_pitch), 0.0, math.cos(self.deck_pitch)])


@dataclass(frozen=True)
class OcpParams:
    """Weights and limits of the terminal-attitude optimal control problem.

    The default weights are calibration knobs; see the README for how they
    were chosen.
    """

    w_a: float = 0.1
    w_j: float = 1.0
    w_T: float = 10.0
    v_max: float = 5.0
    a_max: float = 5.0
    phi_max: float = math.radians(35.0)
    omega_plat: float = math.radians(40.0)
    tau_delay: float = 0.2
    g: float = GRAVITY

    def __post_init__(self):
        if self.w_a < 0 or self.w_T < 0:
            raise ValueError("w_a and w_T must be nonnegative")
        if self.w_j <= 0:
            raise ValueError("w_j must be positive (keeps the inner problem strictly convex)")
        for name in ("v_max", "a_max", "omega_plat", "g"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.phi_max < math.pi / 2:
            raise ValueError("phi_max must lie in (0, pi/2)")
        if self.tau_delay < 0:
            raise ValueError("tau_delay must be nonnegative")
