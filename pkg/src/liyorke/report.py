"""Render the eps/2 scramble report: a CSV table and matplotlib figures.

Exact values live in the CSV (dyadic strings, one row per branch pair);
the figures are presentational, so floats are fine there.  Figures are
written without software metadata to keep repeated runs byte-stable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path

from .dyadic import format_dyadic
from .scrambler import EpsilonReport, ScrambleBuild, ScrambleParams, epsilon_scramble_report

CSV_COLUMNS = ["u", "v", "first_diff", "sep_count", "best_sep", "best_prox", "schedule_n", "separated"]


def report_csv_lines(report: EpsilonReport) -> list[str]:
    lines = [",".join(CSV_COLUMNS)]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    r.u,
                    r.v,
                    str(r.first_diff),
                    str(r.sep_count),
                    format_dyadic(r.best_sep),
                    format_dyadic(r.best_prox),
                    str(r.schedule_n),
                    "1" if r.separated else "0",
                ]
            )
        )
    return lines


def _save(fig, path: Path) -> None:
    fig.savefig(path, metadata={"Software": None})


def render_figures(
    build: ScrambleBuild,
    report: EpsilonReport,
    by_time: dict[int, list[float]],
    out_dir: Path,
) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []

    # proximal decay: per-event-time spread of certified upper bounds
    times = sorted(by_time)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.fill_between(
        times,
        [min(by_time[t]) for t in times],
        [max(by_time[t]) for t in times],
        alpha=0.3,
        label="bound range over pairs",
    )
    ax.plot(times, [min(by_time[t]) for t in times], marker="o", label="weakest pair")
    ax.set_xlabel("orbit time of the proximal event")
    ax.set_ylabel("certified closeness (-log2 of the upper bound)")
    ax.set_title(f"proximal decay, depth {build.depth}, horizon {build.horizon}")
    ax.legend()
    fig.tight_layout()
    path = out_dir / "proximal_decay.png"
    _save(fig, path)
    plt.close(fig)
    paths.append(path)

    # separation events per pair
    counts = [r.sep_count for r in report.rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.hist(counts, bins=range(0, max(counts) + 2), align="left", rwidth=0.8)
    ax.set_xlabel("separation events at or above eps/2")
    ax.set_ylabel("branch pairs")
    ax.set_title(f"separation evidence, eps = {format_dyadic(report.eps)}")
    fig.tight_layout()
    path = out_dir / "separation_counts.png"
    _save(fig, path)
    plt.close(fig)
    paths.append(path)
    return paths


def render_scramble_report(
    build: ScrambleBuild,
    params: ScrambleParams,
    out_dir: str | Path,
    delta_proximal: Fraction = Fraction(0),
) -> tuple[EpsilonReport, list[Path]]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_time: dict[int, list[float]] = {}

    def collect(u, v, prox, sep):
        for m, bound in prox:
            by_time.setdefault(m, []).append(-math.log2(float(bound)))

    report = epsilon_scramble_report(build, params, delta_proximal, collector=collect)
    csv_path = out / "pairs.csv"
    csv_path.write_text("\n".join(report_csv_lines(report)) + "\n", encoding="ascii")
    figures = render_figures(build, report, by_time, out)
    return report, [csv_path, *figures]
