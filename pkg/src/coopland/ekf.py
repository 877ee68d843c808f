"""Relative-position filter over stacked quadrotor and platform positions.

State ``x = [p_b, p_p]``. Both sensors observe the relative position
``p_p - p_b`` in world coordinates, with camera noise that grows with range
plus inflation for rotation (motion blur) and platform vibration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCovariances

H = np.hstack([-np.eye(3), np.eye(3)])
GATE_CHI2_3 = 16.266  # 99.9 % quantile of chi-square with 3 dof


@dataclass(frozen=True)
class NoiseParams:
    sigma_pix: float = 0.01  # m, lateral camera noise
    k_z: float = 2e-4  # depth variance per squared metre of range
    k_vib: float = 0.005  # m^2 per m/s^2 of platform acceleration
    rho_scale: float = 0.005  # m^2, motion-blur inflation at high body rate
    Q: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(6))  # m^2/s

    def __post_init__(self):
        if min(self.sigma_pix, self.k_z, self.k_vib, self.rho_scale) < 0:
            raise ValueError("noise parameters must be nonnegative")
        Q = np.asarray(self.Q, dtype=float)
        if Q.shape != (6, 6) or np.linalg.eigvalsh(0.5 * (Q + Q.T)).min() < -1e-12:
            raise ValueError("Q must be a 6x6 PSD matrix")


@dataclass(frozen=True)
class EkfEstimate:
    x: np.ndarray
    P: np.ndarray

    @classmethod
    def initial(cls, p_b, p_p, sigma: float = 1.0) -> "EkfEstimate":
        return cls(np.concatenate([p_b, p_p]).astype(float), sigma**2 * np.eye(6))

    @property
    def p_b(self) -> np.ndarray:
        return self.x[:3]

    @property
    def p_p(self) -> np.ndarray:
        return self.x[3:]

    @property
    def relative(self) -> np.ndarray:
        return self.x[3:] - self.x[:3]

    @property
    def relative_cov(self) -> np.ndarray:
        return H @ self.P @ H.T


@dataclass(frozen=True)
class UpdateResult:
    estimate: EkfEstimate
    accepted: bool
    nis: float
    alpha: float


def predict(est: EkfEstimate, u, dt: float, noise: NoiseParams) -> EkfEstimate:
    """Constant-velocity step driven by odometry ``u = (v_b, v_p)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v_b, v_p = u
    x = est.x + np.concatenate([v_b, v_p]) * dt
    return EkfEstimate(x, est.P + np.asarray(noise.Q) * dt)


def camera_cov(z: float, R_c, noise: NoiseParams) -> np.ndarray:
    R_c = np.asarray(R_c, dtype=float)
    S = np.diag([noise.sigma_pix**2, noise.sigma_pix**2, noise.k_z * z * z])
    return R_c @ S @ R_c.T


def cov_quad_obs(z: float, omega_b, R_c, noise: NoiseParams) -> np.ndarray:
    """Quadrotor-side observation covariance; ``R_c`` rotates camera axes to the obs frame."""
    if z <= 0:
        raise ValueError("range must be positive")
    C = camera_cov(z, R_c, noise) + noise.rho_scale * math.tanh(float(np.linalg.norm(omega_b))) * np.eye(3)
    return 0.5 * (C + C.T)


def cov_platform_obs(z: float, a_p, R_c, noise: NoiseParams) -> np.ndarray:
    """Platform-side observation covariance with vibration inflation."""
    if z <= 0:
        raise ValueError("range must be positive")
    C = camera_cov(z, R_c, noise) + noise.k_vib * float(np.linalg.norm(a_p)) * np.eye(3)
    return 0.5 * (C + C.T)


def fusion_weight(R_b, R_p) -> float:
    """Weight on the quadrotor-side observation, tr(R_p) / (tr(R_b) + tr(R_p))."""
    tb, tp = float(np.trace(R_b)), float(np.trace(R_p))
    if tb <= 1e-12 and tp <= 1e-12:
        raise DegenerateCovariances("both observation covariances are zero")
    # the smaller weight is divided out and the larger is its complement, so
    # swapping the arguments gives weights that sum to exactly 1.0
    s = tb + tp
    return tp / s if tp <= tb else 1.0 - tb / s


def _kalman(est: EkfEstimate, z, R, gate: float) -> tuple[EkfEstimate, bool, float]:
    r = np.asarray(z, dtype=float) - H @ est.x
    S = H @ est.P @ H.T + R
    S = 0.5 * (S + S.T)
    Sinv = np.linalg.inv(S)
    nis = float(r @ Sinv @ r)
    if nis > gate:
        return est, False, nis
    K = est.P @ H.T @ Sinv
    I_KH = np.eye(6) - K @ H
    P = I_KH @ est.P @ I_KH.T + K @ R @ K.T
    return EkfEstimate(est.x + K @ r, 0.5 * (P + P.T)), True, nis


def update(est: EkfEstimate, z_b, z_p, R_b, R_p, *, mode: str = "fused",
           gate: float = GATE_CHI2_3) -> UpdateResult:
    """Measurement update with one or both relative-position observations.

    ``mode="fused"`` applies the single convex-combination observation
    weighted by :func:`fusion_weight`; ``mode="sequential"`` applies the two
    observations one after the other. A missing observation is ``None``.
    Rejected observations (normalised innovation above ``gate``) leave the
    estimate unchanged and set ``accepted`` to False.
    """
    if z_b is None and z_p is None:
        return UpdateResult(est, False, math.nan, math.nan)
    if z_p is None:
        out, ok, nis = _kalman(est, z_b, R_b, gate)
        return UpdateResult(out, ok, nis, 1.0)
    if z_b is None:
        out, ok, nis = _kalman(est, z_p, R_p, gate)
        return UpdateResult(out, ok, nis, 0.0)
    alpha = fusion_weight(R_b, R_p)
    if mode == "fused":
        z_f = alpha * np.asarray(z_b) + (1 - alpha) * np.asarray(z_p)
        R_f = alpha**2 * np.asarray(R_b) + (1 - alpha) ** 2 * np.asarray(R_p)
        out, ok, nis = _kalman(est, z_f, R_f, gate)
        return UpdateResult(out, ok, nis, alpha)
    if mode == "sequential":
        mid, ok_b, nis_b = _kalman(est, z_b, R_b, gate)
        out, ok_p, nis_p = _kalman(mid, z_p, R_p, gate)
        return UpdateResult(out, ok_b or ok_p, max(nis_b, nis_p), alpha)
    raise ValueError(f"unknown update mode {mode!r}")
