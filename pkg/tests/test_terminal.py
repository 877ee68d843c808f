import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopland.errors import Infeasible, InvertedThrust
from coopland.geometry import OcpParams, PlanarState
from coopland.minjerk import solve_axis
from coopland.terminal import (BoundaryCondition2D, required_duration, solve_fixed_horizon,
                               solve_terminal_plan, tilt_from_accel, verify_plan)

# cost weights used by the simulator (see README)
SIM = OcpParams(w_a=1.0, w_j=0.05, w_T=10.0)
TABLE_SPEEDS = (0.8, 1.0, 1.3, 1.5, 2.0)


def chase(speed, x0=-5.0, z0=5.0):
    """Quad at rest behind and above a deck moving at ``speed``."""
    return BoundaryCondition2D(PlanarState(x0, z0), (0.0, 0.0), (speed, 0.0), moving=True)


def test_rest_problem_has_zero_cost():
    bc = BoundaryCondition2D(PlanarState(0, 0), (0, 0), (0, 0))
    sol = solve_fixed_horizon(bc, 1.7, OcpParams(), 12)
    assert sol.cost == 0.0
    assert np.abs(sol.states).max() == 0.0 and np.abs(sol.jerks).max() == 0.0


UNCONSTRAINED = OcpParams(w_a=0.0, w_j=1.0, v_max=100, a_max=100)
UNIT_MOVE = BoundaryCondition2D(PlanarState(0, 0), (1, 0), (0, 0))


def test_unconstrained_rest_to_rest_matches_quintic():
    # zero terminal acceleration: the analytic rest-to-rest quintic costs 720
    sol = solve_fixed_horizon(UNIT_MOVE, 1.0, UNCONSTRAINED, 200, flat_terminal=True)
    assert sol.method == "kkt"
    assert 720.0 <= sol.cost <= 720.0 * (1 + 1e-3)
    ax = solve_axis(0, 0, 0, 1, 0, 0, 1.0)
    for k in (0, 50, 100, 150, 198):
        assert abs(sol.jerks[k, 0] - ax.eval(sol.times[k] + 0.5 / 199)[3]) < 0.02 * 60


def test_unconstrained_free_terminal_accel_matches_quintic():
    # terminal acceleration is free in the planner; the oracle minimises the
    # closed-form quintic jerk cost over a_f (a 1-D quadratic)
    c = [solve_axis(0, 0, 0, 1, 0, af, 1.0).jerk_cost() for af in (-1.0, 0.0, 1.0)]
    curv, slope = (c[0] - 2 * c[1] + c[2]) / 2, (c[2] - c[0]) / 2
    best = c[1] - slope**2 / (4 * curv)
    assert math.isclose(best, 320.0, rel_tol=1e-12)
    sol = solve_fixed_horizon(UNIT_MOVE, 1.0, UNCONSTRAINED, 200)
    assert best <= sol.cost <= best * (1 + 1e-3)


def test_mean_speed_above_limit_is_infeasible():
    bc = BoundaryCondition2D(PlanarState(0, 0), (10, 0), (0, 0))
    with pytest.raises(Infeasible):
        solve_fixed_horizon(bc, 1.0, OcpParams(v_max=5.0), 20)


def test_stationary_platform_below_gives_flat_tilt():
    bc = BoundaryCondition2D(PlanarState(0, 2), (0, 0), (0, 0))
    plan = solve_terminal_plan(bc, SIM)
    assert abs(plan.phi_opt) <= 1e-6
    assert verify_plan(plan, bc, SIM) == []


def test_tilt_from_accel_examples():
    assert tilt_from_accel(0, 0, 9.81) == 0.0
    assert math.isclose(tilt_from_accel(9.81, 0, 9.81), math.pi / 4, rel_tol=1e-15)
    assert abs(tilt_from_accel(9.81 * math.tan(math.radians(20)), 0, 9.81) - math.radians(20)) <= 1e-9
    with pytest.raises(InvertedThrust):
        tilt_from_accel(1.0, -9.81, 9.81)


@pytest.fixture(scope="module")
def table_plans():
    out = {}
    for sp in TABLE_SPEEDS:
        bc = chase(sp)
        out[sp] = (bc, solve_terminal_plan(bc, SIM))
    return out


def test_table_trend_tilt_and_horizon_increase(table_plans):
    phis = [abs(table_plans[s][1].phi_opt) for s in TABLE_SPEEDS]
    Ts = [table_plans[s][1].T_f for s in TABLE_SPEEDS]
    assert all(b > a for a, b in zip(phis, phis[1:])), phis
    assert all(b > a for a, b in zip(Ts, Ts[1:])), Ts


def test_plans_verify_and_meet_actuation_time(table_plans):
    for bc, plan in table_plans.values():
        assert verify_plan(plan, bc, SIM) == []
        assert plan.T_f >= required_duration(plan.phi_opt, SIM, plan.phi_start)
        assert abs(math.atan(plan.a_opt[0] / (plan.a_opt[1] + SIM.g))) <= SIM.phi_max


def test_verify_reports_constructed_violations(table_plans):
    bc, plan = table_plans[1.0]
    bad = plan.states.copy()
    bad[-1, 4] = 10 * (plan.a_opt[1] + SIM.g)
    from dataclasses import replace
    inflated = replace(plan, states=bad, a_opt=(bad[-1, 4], plan.a_opt[1]),
                       phi_opt=math.atan2(bad[-1, 4], plan.a_opt[1] + SIM.g))
    assert any(v.startswith("terminal_tilt") for v in verify_plan(inflated, bc, SIM))
    short = replace(plan, T_f=0.5 * required_duration(plan.phi_opt, SIM, plan.phi_start))
    assert any(v.startswith("actuation_time") for v in verify_plan(short, bc, SIM))


def test_refinement_16_vs_64_knots():
    for sp in TABLE_SPEEDS:
        bc = chase(sp)
        c16 = solve_terminal_plan(bc, SIM, n_knots=16).cost
        c64 = solve_terminal_plan(bc, SIM, n_knots=64).cost
        assert abs(c64 - c16) / c16 < 0.02, (sp, c16, c64)


@pytest.mark.parametrize("v_max", [5.0, 3.0])
def test_doubling_weights_keeps_argmin(v_max):
    # v_max = 3 makes the speed disk active (unconstrained peak 3.75 m/s)
    p1 = OcpParams(w_a=0.1, w_j=1.0, v_max=v_max, a_max=20.0)
    p2 = OcpParams(w_a=0.2, w_j=2.0, v_max=v_max, a_max=20.0)
    bc = BoundaryCondition2D(PlanarState(-4, 0), (0, 0), (0, 0))
    s1, s2 = solve_fixed_horizon(bc, 2.0, p1, 20), solve_fixed_horizon(bc, 2.0, p2, 20)
    assert math.isclose(s2.cost, 2 * s1.cost, rel_tol=1e-6)
    assert np.abs(s1.states - s2.states).max() < 1e-6
    assert np.abs(s1.jerks - s2.jerks).max() < 1e-6


def test_velocity_bound_touched_not_exceeded():
    # unconstrained peak speed is 1.875 * 4 / 2 = 3.75 m/s
    bc = BoundaryCondition2D(PlanarState(-4, 0), (0, 0), (0, 0))
    p = OcpParams(w_a=0.1, w_j=1.0, v_max=3.0, a_max=20.0)
    sol = solve_fixed_horizon(bc, 2.0, p, 30)
    vmax = np.hypot(sol.states[:, 2], sol.states[:, 3]).max()
    assert p.v_max - 1e-4 <= vmax <= p.v_max + 1e-6


def test_flat_terminal_has_zero_tilt():
    bc = chase(0.8)
    plan = solve_terminal_plan(bc, SIM, flat_terminal=True)
    assert plan.phi_opt == 0.0 and abs(plan.a_opt[0]) <= 1e-6
    assert verify_plan(plan, bc, SIM) == []


def test_discretized_states_listing(table_plans):
    _, plan = table_plans[0.8]
    rows = plan.discretized_states
    assert len(rows) == len(plan.times)
    assert rows[0][0] == 0.0 and math.isclose(rows[-1][0], plan.T_f)
    assert rows[-1][1].a_bx == pytest.approx(plan.a_opt[0])


@settings(max_examples=8)
@given(st.floats(-6, -1), st.floats(1, 6), st.floats(0, 2.0), st.floats(-1, 1))
def test_random_plans_are_verified(x0, z0, speed, vx0):
    bc = BoundaryCondition2D(PlanarState(x0, z0, vx0), (0, 0), (speed, 0), moving=True)
    plan = solve_terminal_plan(bc, SIM, n_knots=12)
    assert verify_plan(plan, bc, SIM) == []
    assert plan.T_f >= abs(plan.phi_opt) / SIM.omega_plat + SIM.tau_delay
