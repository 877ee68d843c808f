"""Camera model, interaction Jacobians and the deck angular-rate laws.

Camera coordinates follow the pinhole convention (z along the optical
axis). ``R_c`` is the camera-to-world rotation and ``R_p`` the deck
attitude. The tag sits at ``X_p`` in deck coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BehindCamera, DegenerateJacobian, TiltOutOfRange
from .geometry import hat


@dataclass(frozen=True)
class CameraModel:
    f_x: float = 400.0
    f_y: float = 400.0
    c_x: float = 320.0
    c_y: float = 240.0
    R_mount: np.ndarray = field(default_factory=lambda: np.eye(3))  # camera to mount body
    mount: str = "quad"

    def __post_init__(self):
        if self.f_x <= 0 or self.f_y <= 0:
            raise ValueError("focal lengths must be positive")

    @property
    def principal_point(self) -> np.ndarray:
        return np.array([self.c_x, self.c_y])


@dataclass(frozen=True)
class ImageError:
    e: np.ndarray  # (u, v) px

    def __post_init__(self):
        if not np.all(np.isfinite(self.e)):
            raise ValueError("image error must be finite")


@dataclass(frozen=True)
class InteractionJacobians:
    J_trans: np.ndarray  # 2x3, px per m/s of (p_p - p_b) rate
    J_omega: np.ndarray  # 2x3, px per rad/s of camera-carrier body rate
    J_p: np.ndarray  # 2x3, px per rad/s of deck body rate

    def pixel_rate(self, rel_vel, omega_b, omega_p) -> np.ndarray:
        return self.J_trans @ rel_vel + self.J_omega @ omega_b + self.J_p @ omega_p


def down_camera_mount(tilt_forward: float) -> np.ndarray:
    """Body-mounted camera looking down, optical axis tilted towards +x."""
    c, s = math.cos(tilt_forward), math.sin(tilt_forward)
    return np.column_stack([[0.0, -1.0, 0.0], [-c, 0.0, -s], [s, 0.0, -c]])


def up_camera_mount(tilt_back: float) -> np.ndarray:
    """Base-mounted camera looking up, optical axis tilted towards -x."""
    c, s = math.cos(tilt_back), math.sin(tilt_back)
    return np.column_stack([[0.0, 1.0, 0.0], [-c, 0.0, -s], [-s, 0.0, c]])


def project(cam: CameraModel, X_c) -> np.ndarray:
    X, Y, Z = X_c
    if Z <= 0:
        raise BehindCamera(f"point at depth {Z} is behind the camera")
    return np.array([cam.f_x * X / Z + cam.c_x, cam.f_y * Y / Z + cam.c_y])


def projection_jacobian(cam: CameraModel, X_c) -> np.ndarray:
    X, Y, Z = X_c
    if Z <= 0:
        raise BehindCamera(f"point at depth {Z} is behind the camera")
    return np.array([[cam.f_x / Z, 0.0, -cam.f_x * X / Z**2],
                     [0.0, cam.f_y / Z, -cam.f_y * Y / Z**2]])


def target_in_camera(R_c, R_p, X_p, p_p, p_b) -> np.ndarray:
    """Tag position in camera coordinates."""
    return np.asarray(R_c).T @ (np.asarray(R_p) @ X_p + np.asarray(p_p) - np.asarray(p_b))


def interaction_jacobians(cam: CameraModel, R_c, R_p, X_p, X_c, R_cb=None) -> InteractionJacobians:
    """Pixel-velocity Jacobians of the tag image.

    ``R_cb`` maps camera axes to the carrier body (defaults to the camera
    mount). The body rate enters through d(R_c^T)/dt = -[R_cb^T w]x R_c^T,
    which gives ``J_omega = dpi * [X_c]x * R_cb^T``.
    """
    R_c = np.asarray(R_c, dtype=float)
    R_cb = cam.R_mount if R_cb is None else np.asarray(R_cb, dtype=float)
    dpi = projection_jacobian(cam, X_c)
    J_trans = dpi @ R_c.T
    J_omega = dpi @ hat(X_c) @ R_cb.T
    J_p = -dpi @ R_c.T @ np.asarray(R_p) @ hat(X_p)
    return InteractionJacobians(J_trans, J_omega, J_p)


def damped_pinv(J, lam: float) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    return J.T @ np.linalg.inv(J @ J.T + lam**2 * np.eye(J.shape[0]))


def servo_rate(e, jac: InteractionJacobians, rel_vel, omega_b, K_p: float, lam: float = 1e-3,
               omega_plat: float = math.inf, axis: int | None = 1) -> np.ndarray:
    """Deck rate that drives the image error to zero.

    The 3-vector from the damped pseudo-inverse is reduced to the actuated
    ``axis`` (``None`` keeps all three) and clamped to ``omega_plat``.
    """
    e = e.e if isinstance(e, ImageError) else np.asarray(e, dtype=float)
    if np.linalg.norm(jac.J_p) < 1e-9:
        raise DegenerateJacobian("deck-rate Jacobian vanishes (tag at pivot or not in view)")
    rhs = -K_p * e - jac.J_trans @ np.asarray(rel_vel, dtype=float) - jac.J_omega @ np.asarray(omega_b, dtype=float)
    w = damped_pinv(jac.J_p, lam) @ rhs
    if axis is not None:
        keep = np.zeros(3)
        keep[axis] = w[axis]
        w = keep
    return np.clip(w, -omega_plat, omega_plat)


def cooperative_tilt_rate(phi: float, phi_opt: float, omega_plat: float, dt: float,
                          phi_max: float = math.radians(35.0)) -> float:
    """Rate-limited approach of the deck pitch towards ``phi_opt``."""
    if abs(phi_opt) > phi_max:
        raise TiltOutOfRange(f"|phi_opt| = {abs(phi_opt)} exceeds {phi_max}")
    d = phi_opt - phi
    return math.copysign(min(omega_plat, abs(d) / dt), d) if d else 0.0


def incidence_angle(camera_pos, tag_pos, tag_normal) -> float:
    """Angle between the tag normal and the ray from the tag to the camera."""
    ray = np.asarray(camera_pos, dtype=float) - np.asarray(tag_pos, dtype=float)
    c = ray @ tag_normal / (np.linalg.norm(ray) * np.linalg.norm(tag_normal))
    return math.acos(max(-1.0, min(1.0, c)))


def off_axis_angle(R_c, camera_pos, target_pos) -> float:
    """Angle between the optical axis and the ray to ``target_pos``."""
    ray = np.asarray(target_pos, dtype=float) - np.asarray(camera_pos, dtype=float)
    c = np.asarray(R_c)[:, 2] @ ray / np.linalg.norm(ray)
    return math.acos(max(-1.0, min(1.0, c)))
