"""Cooperative quadrotor landing on a tilting moving platform.

Terminal-attitude planning, quintic trajectories, geometric tracking,
deck visual servoing, relative-position fusion and a closed-loop
simulator with baselines.
"""

from .config import ScenarioConfig, parse_config, serialize_config, validate
from .geometry import OcpParams, PlanarState, PlatformState, QuadState
from .minjerk import QuinticTrajectory, generate_3d, solve_axis
from .sim import LandingReport, run_baseline_hover, run_baseline_unilateral, run_scenario
from .terminal import TerminalPlan, solve_terminal_plan, verify_plan

__all__ = [
    "LandingReport", "OcpParams", "PlanarState", "PlatformState", "QuadState", "QuinticTrajectory",
    "ScenarioConfig", "TerminalPlan", "generate_3d", "parse_config", "run_baseline_hover",
    "run_baseline_unilateral", "run_scenario", "serialize_config", "solve_axis", "solve_terminal_plan",
    "validate", "verify_plan",
]
__version__ = "0.1.0"
