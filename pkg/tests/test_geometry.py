import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopland.geometry import (OcpParams, PlanarState, PlatformState, QuadState, expm_so3, hat,
                               is_rotation, logm_so3, pitch_of, rot_x, rot_y, rot_z, rotation, vec3, vee)

finite = st.floats(-100, 100, allow_nan=False)
vectors = st.tuples(finite, finite, finite).map(np.array)


def test_hat_zero():
    assert np.array_equal(hat((0.0, 0.0, 0.0)), np.zeros((3, 3)))


def test_hat_cross_identity():
    assert np.allclose(hat((1.0, 0.0, 0.0)) @ np.array([0.0, 1.0, 0.0]), [0.0, 0.0, 1.0])


def test_hat_matches_cross_product_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        v, w = rng.normal(size=3), rng.normal(size=3)
        # componentwise cross product written out
        cross = np.array([v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]])
        assert np.abs(hat(v) @ w - cross).max() <= 1e-12


def test_vee_examples():
    assert np.array_equal(vee(np.zeros((3, 3))), np.zeros(3))
    assert np.array_equal(vee(hat((1.0, 2.0, 3.0))), [1.0, 2.0, 3.0])


def test_vee_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        vee(np.eye(3))


@given(vectors)
def test_hat_antisymmetric(v):
    assert np.array_equal(hat(v), -hat(v).T)


@given(vectors)
def test_hat_vee_round_trip(v):
    assert np.abs(vee(hat(v)) - v).max() <= 1e-12
    M = hat(v)
    assert np.abs(hat(vee(M)) - M).max() <= 1e-12


def test_rotation_rejects_scaled_matrix():
    with pytest.raises(ValueError):
        rotation(np.eye(3) * (1 + 1e-6))
    with pytest.raises(ValueError):
        rotation(np.diag([1.0, 1.0, -1.0]))
    assert is_rotation(rot_x(0.3) @ rot_y(-1.1) @ rot_z(2.0))


@given(st.tuples(*[st.floats(-3.0, 3.0)] * 3).map(np.array))
def test_expm_is_rotation_and_log_inverts(w):
    R = expm_so3(w)
    assert is_rotation(R)
    if np.linalg.norm(w) < math.pi - 1e-3:
        assert np.allclose(logm_so3(R), w, atol=1e-8)


def test_pitch_of_about_y():
    assert math.isclose(pitch_of(rot_y(0.4)), 0.4, abs_tol=1e-15)


def test_deck_normal_is_rotated_z():
    p = PlatformState(np.zeros(3), np.zeros(3), deck_pitch=0.3)
    assert np.allclose(p.deck_rotation() @ [0, 0, 1], p.deck_normal())


def test_value_type_validation():
    with pytest.raises(ValueError):
        vec3((1.0, math.nan, 0.0))
    with pytest.raises(ValueError):
        PlanarState(math.inf, 0.0)
    with pytest.raises(ValueError):
        QuadState(np.zeros(3), np.zeros(3), 2 * np.eye(3)).validate()
    with pytest.raises(ValueError):
        OcpParams(phi_max=math.pi / 2)
    with pytest.raises(ValueError):
        OcpParams(tau_delay=-0.1)
    with pytest.raises(ValueError):
        OcpParams(v_max=0.0)
