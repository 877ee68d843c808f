import os

from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance criterion lines, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


# ---------------------------------------------------------------- shared runs

import json  # noqa: E402
import math  # noqa: E402
import time  # noqa: E402

import pytest  # noqa: E402

from coopland import cli  # noqa: E402
from coopland.config import ScenarioConfig  # noqa: E402
from coopland.sim import run_scenario, scenario_for  # noqa: E402

TABLE_SPEEDS = (0.8, 1.0, 1.3, 1.5, 2.0)
FAR_OFFSET = (-16.0, 0.0, 3.0)


# wall time of the shared runs, checked against the acceptance runtime limits
FIXTURE_SECONDS: dict[str, float] = {}


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


@pytest.fixture(scope="session")
def sweep_out(tmp_path_factory):
    """CLI speed sweep over the five table speeds (2.0 m/s from the far start)."""
    out = tmp_path_factory.mktemp("sweep")
    t0 = time.perf_counter()
    code = cli.main(["sweep", "--speeds", ",".join(map(str, TABLE_SPEEDS)), "--out", str(out)])
    FIXTURE_SECONDS["sweep"] = time.perf_counter() - t0
    return code, out, read_jsonl(out / "summary.jsonl")


@pytest.fixture(scope="session")
def compare_out(tmp_path_factory):
    """CLI strategy comparison at 0.8 m/s and, from the far start, 1.5 and 2.0 m/s."""
    out = tmp_path_factory.mktemp("compare")
    t0 = time.perf_counter()
    code = cli.main(["compare", "--speeds", "0.8,1.5,2.0", "--out", str(out)])
    FIXTURE_SECONDS["compare"] = time.perf_counter() - t0
    recs = read_jsonl(out / "summary.jsonl")
    return code, out, {(r["speed"], r["strategy"]): r for r in recs}


@pytest.fixture(scope="session")
def delay_report():
    cfg = ScenarioConfig().with_values(**{"scenario.actuation_delay_injection": 1.5})
    t0 = time.perf_counter()
    r = run_scenario(cfg)
    FIXTURE_SECONDS["delay"] = time.perf_counter() - t0
    return r


@pytest.fixture(scope="session")
def default_cfg():
    return ScenarioConfig()


def within_window(rec, cfg):
    return cfg.scenario.window_start <= rec["touchdown_x"] <= cfg.scenario.window_end


def is_finite(x):
    return x is not None and math.isfinite(x)


__all__ = ["FAR_OFFSET", "TABLE_SPEEDS", "scenario_for", "within_window", "is_finite"]
