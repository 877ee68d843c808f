"""Summary rows, aligned text tables, JSON lines and figures.

Nothing here computes new quantities: every number is a field of a
:class:`~coopland.sim.LandingReport`, only rounded for display.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sim import LandingReport  # noqa: E402

# PNG metadata off so repeated runs produce identical files
PNG_METADATA = {"Software": None}


@dataclass(frozen=True)
class SummaryRow:
    speed: float
    strategy: str
    desired_pitch_deg: float
    quad_pitch_deg: float
    landing_time: float
    outcome: str
    replans: int

    @classmethod
    def from_report(cls, r: LandingReport) -> "SummaryRow":
        return cls(r.speed, r.strategy, r.desired_pitch_deg, r.quad_pitch_deg, r.landing_time,
                   r.outcome, r.replan_count)


def _num(x, digits=3) -> str:
    return "-" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{digits}f}"


def format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def sweep_table(rows: list[SummaryRow]) -> str:
    header = ["speed_mps", "strategy", "des_pitch_deg", "quad_pitch_deg", "land_time_s", "outcome", "replans"]
    body = [[_num(r.speed, 2), r.strategy, _num(r.desired_pitch_deg, 2), _num(r.quad_pitch_deg, 2),
             _num(r.landing_time), r.outcome, str(r.replans)] for r in rows]
    return format_table(header, body)


def compare_table(reports: dict[tuple[float, str], LandingReport], speeds, strategies) -> str:
    """Speeds down, strategies across; a landing time or ``failed``."""
    body = []
    for sp in speeds:
        row = [_num(sp, 2)]
        for st in strategies:
            r = reports[(sp, st)]
            row.append(_num(r.landing_time) if r.outcome == "landed" else "failed")
        body.append(row)
    return format_table(["speed_mps", *strategies], body)


def report_text(r: LandingReport) -> str:
    s = r.summary()
    keys = [k for k in s if k != "events"]
    width = max(len(k) for k in keys)
    lines = [f"{k.ljust(width)}  {_fmt_value(s[k])}" for k in keys]
    lines += [f"{'event'.ljust(width)}  {' '.join(str(x) for x in e)}" for e in s["events"]]
    return "\n".join(lines) + "\n"


def _fmt_value(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def jsonl(records: list[dict]) -> str:
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)


def row_record(row: SummaryRow) -> dict:
    rec = asdict(row)
    for k, v in rec.items():
        if isinstance(v, float):
            rec[k] = None if math.isnan(v) else round(v, 6)
    return rec


def plot_trace(r: LandingReport, path) -> None:
    rows = r.trace.rows
    t = [x[0] for x in rows]
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(t, [x[1] for x in rows], label="x")
    axes[0].plot(t, [x[3] for x in rows], label="z")
    axes[0].set_ylabel("position [m]")
    axes[0].legend(loc="best")
    axes[1].plot(t, [x[7] for x in rows], label="quad pitch")
    axes[1].plot(t, [x[8] for x in rows], label="deck pitch")
    axes[1].set_ylabel("pitch [deg]")
    axes[1].set_xlabel("t [s]")
    axes[1].legend(loc="best")
    fig.suptitle(f"{r.strategy} at {r.speed:.2f} m/s: {r.outcome}")
    fig.tight_layout()
    fig.savefig(path, metadata=PNG_METADATA)
    plt.close(fig)


def plot_sweep(rows: list[SummaryRow], path) -> None:
    sp = [r.speed for r in rows]
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.plot(sp, [abs(r.desired_pitch_deg) for r in rows], "o-", label="|desired pitch|")
    ax1.plot(sp, [abs(r.quad_pitch_deg) for r in rows], "s--", label="|quad pitch|")
    ax1.set_xlabel("platform speed [m/s]")
    ax1.set_ylabel("pitch [deg]")
    ax2 = ax1.twinx()
    ax2.plot(sp, [r.landing_time for r in rows], "^:", color="k", label="landing time")
    ax2.set_ylabel("landing time [s]")
    ax1.legend(loc="upper left")
    ax2.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, metadata=PNG_METADATA)
    plt.close(fig)


def plot_compare(reports: dict[tuple[float, str], LandingReport], speeds, strategies, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / len(strategies)
    for k, st in enumerate(strategies):
        xs, ys = [], []
        for i, sp in enumerate(speeds):
            r = reports[(sp, st)]
            if r.outcome == "landed":
                xs.append(i + k * width)
                ys.append(r.landing_time)
        ax.bar(xs, ys, width, label=st)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(speeds))], [f"{s:.2f}" for s in speeds])
    ax.set_xlabel("platform speed [m/s] (missing bar = failed)")
    ax.set_ylabel("landing time [s]")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, metadata=PNG_METADATA)
    plt.close(fig)
