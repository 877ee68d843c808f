import math

from coopland import report
from coopland.sim import LandingReport


def fake(outcome="landed", t=2.5, speed=0.8, strategy="cooperative"):
    return LandingReport(outcome, strategy, speed, t, 0.1, 0.01, 0.02, 0, -12.3456, -12.4, -12.3456, 3.0, 0.01,
                         "trajectory_end", t + 0.1)


def test_summary_row_fields_are_copied():
    r = fake()
    row = report.SummaryRow.from_report(r)
    assert (row.speed, row.desired_pitch_deg, row.quad_pitch_deg, row.landing_time, row.outcome, row.replans) == \
        (r.speed, r.desired_pitch_deg, r.quad_pitch_deg, r.landing_time, r.outcome, r.replan_count)


def test_tables_align_and_render_failures():
    reports = {(0.8, "cooperative"): fake(), (0.8, "unilateral"): fake("window_missed", math.nan)}
    text = report.compare_table(reports, [0.8], ["cooperative", "unilateral"])
    lines = text.splitlines()
    assert lines[2].split() == ["0.80", "2.500", "failed"]
    assert len({len(ln) for ln in lines}) == 1
    sweep = report.sweep_table([report.SummaryRow.from_report(fake())])
    assert "-12.35" in sweep


def test_row_record_handles_nan():
    rec = report.row_record(report.SummaryRow.from_report(fake("timeout", math.nan)))
    assert rec["landing_time"] is None


def test_png_has_no_software_metadata(tmp_path):
    r = fake()
    r.trace.rows.append((0.0, 0, 0, 1, 0, 0, 0, 0.0, 0.0, "approach", 9.81, 0.5))
    r.trace.rows.append((0.01, 0.01, 0, 1, 0, 0, 0, 0.0, 0.0, "approach", 9.81, 0.5))
    path = tmp_path / "t.png"
    report.plot_trace(r, path)
    data = path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert b"Software" not in data and b"matplotlib" not in data
