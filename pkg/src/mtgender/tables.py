"""Human-readable result tables.

Percentages are printed to one decimal place and balance scores to three,
mirroring the machine reports' full-precision values.
"""

from __future__ import annotations

from typing import Sequence

from .corpus import OTSC_QUADRANTS
from .metrics import OtscReport, TgbiReport, WinomtReport

QUADRANT_LABELS = {
    "FF": "Female Speaker, Female Friend",
    "FM": "Female Speaker, Male Friend",
    "MF": "Male Speaker, Female Friend",
    "MM": "Male Speaker, Male Friend",
}


def fmt_pct(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.1f}"


def fmt_score(value: float) -> str:
    return f"{value:.3f}"


def _render_rows(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = []
    for row in rows:
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join([first, *rest]).rstrip())
    return "\n".join(lines) + "\n"


def format_tgbi_table(named_reports: Sequence[tuple[str, TgbiReport]]) -> str:
    """Per-set balance scores with the averaged index at the bottom."""
    set_ids = sorted({set_id for _, report in named_reports for set_id in report.per_set})
    rows = [["Set", *[name for name, _ in named_reports]]]
    for set_id in set_ids:
        row = [set_id]
        for _, report in named_reports:
            balance = report.per_set.get(set_id)
            row.append(fmt_score(balance.ps) if balance else "n/a")
        rows.append(row)
    rows.append(["TGBI", *[fmt_score(report.tgbi) for _, report in named_reports]])
    return _render_rows(rows)


def format_otsc_table(named_reports: Sequence[tuple[str, OtscReport]]) -> str:
    """Quadrant rows with p_m / p_w / p_n / true-label columns per system."""
    header = ["Sentence Set"]
    for name, _ in named_reports:
        header += [f"{name}:p_m", "p_w", "p_n", "true"]
    rows = [header]
    for quadrant in OTSC_QUADRANTS:
        row = [QUADRANT_LABELS[quadrant]]
        for _, report in named_reports:
            stats = report.quadrants[quadrant]
            row += [fmt_pct(stats.p_m), fmt_pct(stats.p_w), fmt_pct(stats.p_n),
                    fmt_pct(stats.true_rate)]
        rows.append(row)
    return _render_rows(rows)


def format_winomt_table(named_reports: Sequence[tuple[str, WinomtReport]]) -> str:
    """One row per system: Acc, ΔG, ΔS, N (all percentages)."""
    rows = [["System", "Acc", "ΔG", "ΔS", "N"]]
    for name, report in named_reports:
        rows.append([
            name,
            fmt_pct(report.acc),
            fmt_pct(report.delta_g),
            fmt_pct(report.delta_s),
            fmt_pct(report.n),
        ])
    return _render_rows(rows)
