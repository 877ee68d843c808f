"""Command-line front end: ``coopland run | sweep | compare``.

Each command writes plain-text tables, JSON-lines records, trace CSVs and
PNG figures into ``--out``. Failed landings are results and exit 0; only
configuration and file errors give a nonzero exit code.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import report as rep
from .config import STRATEGIES, ScenarioConfig, parse_config
from .errors import ConfigError, ParseError, ValidationError
from .sim import LandingReport, run_scenario, scenario_for

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
FAR_OFFSET = (-16.0, 0.0, 3.0)


@dataclass(frozen=True)
class RunManifest:
    config_path: Path | None
    out_dir: Path
    seed: int | None = None
    strategy: str | None = None
    speeds: tuple[float, ...] = ()
    dt_physics: float | None = None
    dt_control: float | None = None
    far_from: float = float("inf")  # speeds at or above this start from FAR_OFFSET
    jobs: int = 1

    def __post_init__(self):
        if self.config_path is not None and not self.config_path.is_file():
            raise FileNotFoundError(f"config file not found: {self.config_path}")
        if any(s < 0 for s in self.speeds):
            raise ValidationError("--speeds", "speeds must be >= 0")
        if self.strategy is not None and self.strategy not in STRATEGIES:
            raise ValidationError("--strategy", f"must be one of {STRATEGIES}")


def load_config(m: RunManifest) -> ScenarioConfig:
    text = m.config_path.read_text(encoding="utf-8") if m.config_path else ""
    cfg = parse_config(text)
    vals = {}
    if m.dt_physics is not None:
        vals["sim.dt_physics"] = m.dt_physics
    if m.dt_control is not None:
        vals["sim.dt_control"] = m.dt_control
    if vals:
        cfg = cfg.with_values(**vals)
    seed = m.seed
    if seed is None and os.environ.get("COOPLAND_SEED"):
        try:
            seed = int(os.environ["COOPLAND_SEED"])
        except ValueError:
            raise ValidationError("COOPLAND_SEED", "must be an integer") from None
    return scenario_for(cfg, strategy=m.strategy, seed=seed)


def _case(cfg: ScenarioConfig, speed: float, strategy: str, far_from: float) -> ScenarioConfig:
    offset = FAR_OFFSET if speed >= far_from else None
    return scenario_for(cfg, strategy=strategy, speed=speed, offset=offset)


def run_all(cfgs: list[ScenarioConfig], jobs: int) -> list[LandingReport]:
    """Run scenarios, in worker processes when ``jobs > 1``; order is preserved."""
    if jobs <= 1 or len(cfgs) <= 1:
        return [run_scenario(c) for c in cfgs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_scenario, cfgs))


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _tag(speed: float, strategy: str | None = None) -> str:
    s = f"{speed:.2f}".replace(".", "p")
    return f"{strategy}_{s}" if strategy else s


def cmd_run(m: RunManifest) -> int:
    cfg = load_config(m)
    r = run_scenario(cfg)
    m.out_dir.mkdir(parents=True, exist_ok=True)
    text = rep.report_text(r)
    _write(m.out_dir / "report.txt", text)
    _write(m.out_dir / "summary.jsonl", rep.jsonl([r.summary()]))
    _write(m.out_dir / "trace.csv", r.trace.to_csv())
    rep.plot_trace(r, m.out_dir / "trace.png")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(m: RunManifest) -> int:
    cfg = load_config(m)
    strategy = cfg.scenario.strategy
    reports = run_all([_case(cfg, s, strategy, m.far_from) for s in m.speeds], m.jobs)
    m.out_dir.mkdir(parents=True, exist_ok=True)
    rows = [rep.SummaryRow.from_report(r) for r in reports]
    table = rep.sweep_table(rows)
    _write(m.out_dir / "sweep.txt", table)
    _write(m.out_dir / "sweep.jsonl", rep.jsonl([rep.row_record(x) for x in rows]))
    _write(m.out_dir / "summary.jsonl", rep.jsonl([r.summary() for r in reports]))
    for sp, r in zip(m.speeds, reports):
        _write(m.out_dir / f"trace_{_tag(sp)}.csv", r.trace.to_csv())
    rep.plot_sweep(rows, m.out_dir / "sweep.png")
    sys.stdout.write(table)
    return EXIT_OK


def cmd_compare(m: RunManifest) -> int:
    cfg = load_config(m)
    cases = [(sp, st) for sp in m.speeds for st in STRATEGIES]
    out = run_all([_case(cfg, sp, st, m.far_from) for sp, st in cases], m.jobs)
    reports = dict(zip(cases, out))
    m.out_dir.mkdir(parents=True, exist_ok=True)
    table = rep.compare_table(reports, m.speeds, STRATEGIES)
    _write(m.out_dir / "compare.txt", table)
    _write(m.out_dir / "summary.jsonl", rep.jsonl([reports[c].summary() for c in cases]))
    for (sp, st), r in reports.items():
        _write(m.out_dir / f"trace_{_tag(sp, st)}.csv", r.trace.to_csv())
    rep.plot_compare(reports, m.speeds, STRATEGIES, m.out_dir / "compare.png")
    sys.stdout.write(table)
    return EXIT_OK


def _speeds(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad speed list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty speed list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coopland", description="Cooperative landing planner and simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, speeds: bool):
        sp.add_argument("--config", type=Path, default=None, help="scenario file (defaults if omitted)")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="seed override (else $COOPLAND_SEED, else config)")
        sp.add_argument("--strategy", choices=STRATEGIES, default=None)
        sp.add_argument("--dt-physics", type=float, default=None)
        sp.add_argument("--dt-control", type=float, default=None)
        if speeds:
            sp.add_argument("--speeds", type=_speeds, default=(0.8, 1.0, 1.3, 1.5, 2.0),
                            help="comma-separated platform speeds, m/s")
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    common(sub.add_parser("run", help="run one scenario"), speeds=False)
    sw = sub.add_parser("sweep", help="speed sweep for one strategy")
    common(sw, speeds=True)
    sw.add_argument("--far-from", type=float, default=2.0,
                    help="speeds at or above this start from [-16, 0, 3] (default 2.0)")
    cp = sub.add_parser("compare", help="all strategies per speed")
    common(cp, speeds=True)
    cp.add_argument("--far-from", type=float, default=1.5,
                    help="speeds at or above this start from [-16, 0, 3] (default 1.5)")
    return p


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        m = RunManifest(args.config, args.out, args.seed, args.strategy, getattr(args, "speeds", ()),
                        args.dt_physics, args.dt_control, getattr(args, "far_from", float("inf")),
                        getattr(args, "jobs", 1))
        return COMMANDS[args.command](m)
    except (ParseError, ValidationError, ConfigError) as exc:
        print(f"coopland: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"coopland: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
