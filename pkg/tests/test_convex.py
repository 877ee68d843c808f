import numpy as np
import pytest

from coopland import convex


def program(P, q, A_eq=None, b_eq=None, A_box=None, lo=None, hi=None, A_disk=None, centers=None, radii=None):
    n = len(q)
    return convex.ConeProgram(
        P=np.asarray(P, float), q=np.asarray(q, float),
        A_eq=np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, float),
        b_eq=np.zeros(0) if b_eq is None else np.asarray(b_eq, float),
        A_box=np.zeros((0, n)) if A_box is None else np.asarray(A_box, float),
        lo=np.zeros(0) if lo is None else np.asarray(lo, float),
        hi=np.zeros(0) if hi is None else np.asarray(hi, float),
        A_disk=np.zeros((0, n)) if A_disk is None else np.asarray(A_disk, float),
        centers=np.zeros((0, 2)) if centers is None else np.asarray(centers, float),
        radii=np.zeros(0) if radii is None else np.asarray(radii, float),
    )


def test_projection_onto_disk():
    # min |x - t|^2 subject to |x - c| <= r has the closed form c + r (t - c) / |t - c|
    rng = np.random.default_rng(0)
    for _ in range(20):
        t, c, r = rng.normal(size=2) * 3, rng.normal(size=2), rng.uniform(0.2, 1.0)
        prog = program(2 * np.eye(2), -2 * t, A_disk=np.eye(2), centers=[c], radii=[r])
        res = convex.solve(prog)
        d = t - c
        expect = t if np.linalg.norm(d) <= r else c + r * d / np.linalg.norm(d)
        assert res.status == "solved"
        assert np.abs(res.x - expect).max() < 1e-6


def test_box_and_equality():
    # min x1^2 + x2^2 + x3^2 s.t. x1 + x2 + x3 = 3, x1 <= 0.5 -> x1 = 0.5, x2 = x3 = 1.25
    prog = program(2 * np.eye(3), np.zeros(3), A_eq=[[1, 1, 1]], b_eq=[3], A_box=[[1, 0, 0]], lo=[-np.inf],
                   hi=[0.5])
    res = convex.solve(prog)
    assert res.status == "solved"
    assert np.abs(res.x - [0.5, 1.25, 1.25]).max() < 1e-6


def test_equality_qp_matches_normal_equations():
    rng = np.random.default_rng(2)
    M = rng.normal(size=(5, 5))
    P = M @ M.T + np.eye(5)
    q = rng.normal(size=5)
    A = rng.normal(size=(2, 5))
    b = rng.normal(size=2)
    x = convex.solve_equality_qp(program(P, q, A_eq=A, b_eq=b))
    K = np.block([[P, A.T], [A, np.zeros((2, 2))]])
    expect = np.linalg.solve(K, np.concatenate([-q, b]))[:5]
    assert np.abs(x - expect).max() < 1e-9


def test_infeasibility_certificate():
    # x must lie in two disjoint disks
    A = np.vstack([np.eye(2), np.eye(2)])
    prog = program(np.eye(2), np.zeros(2), A_disk=A, centers=[[0, 0], [3, 0]], radii=[1, 1])
    assert convex.solve(prog).status == "infeasible"


def test_iteration_cap_reports_max_iter():
    prog = program(2 * np.eye(2), -2 * np.array([5.0, 1.0]), A_disk=np.eye(2), centers=[[0, 0]],
                   radii=[1.0])
    res = convex.solve(prog, max_iter=1, polish=False, check_every=1)
    assert res.status in ("max_iter", "solved")
    if res.status == "max_iter":
        assert res.iterations == 1


@pytest.mark.parametrize("scale", [1.0, 2.0])
def test_objective_scaling_keeps_argmin(scale):
    prog = program(scale * 2 * np.eye(2), scale * -2 * np.array([2.0, 2.0]), A_disk=np.eye(2),
                   centers=[[0, 0]], radii=[1.0])
    res = convex.solve(prog)
    assert np.abs(res.x - np.array([1, 1]) / np.sqrt(2)).max() < 1e-6
