"""Render the sweep and convergence figures from parsed CSV tables.

Output is deterministic for a given input: fixed figure geometry, no
timestamps, and metadata stripped from the PNG writer.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import EstimateTable, ParseError, SweepTable

CLASSICAL_BOUND = 2.0
_FIGSIZE = (6.4, 4.4)
_DPI = 110
# strip the version-bearing Software key so bytes depend only on the input
_PNG_METADATA = {"Software": None}


@dataclass(frozen=True)
class SweepPlotSummary:
    points: int
    first_percent: float
    first_b_max: float
    reference_line: float


def plot_sweep(csv_path, out_image_path) -> SweepPlotSummary:
    """Line plot of B_max versus percentage squeezing with the B = 2 bound."""
    table = SweepTable.from_csv(csv_path)
    percents = [r.percent_squeezing for r in table.rows]
    b_max = [r.b_max for r in table.rows]

    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    ax.plot(percents, b_max, marker="o", markersize=3.5, lw=1.5,
            label="optimized B", zorder=3)
    if table.has_fixed_column:
        ax.plot(
            percents,
            [r.b_fixed for r in table.rows],
            marker="s", markersize=3, lw=1.0, ls="--",
            label="B at fixed angles", zorder=2,
        )
    ax.axhline(CLASSICAL_BOUND, color="crimson", lw=1.2, ls=":",
               label="classical bound B = 2")
    ax.set_xlabel("percentage squeezing")
    ax.set_ylabel("maximum Bell quantity B")
    ax.set_title("Violation decay with squeezing strength")
    ax.legend(frameon=False)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(out_image_path, metadata=_PNG_METADATA)
    plt.close(fig)
    return SweepPlotSummary(
        points=len(table.rows),
        first_percent=table.rows[0].percent_squeezing,
        first_b_max=table.rows[0].b_max,
        reference_line=CLASSICAL_BOUND,
    )


@dataclass(frozen=True)
class ConvergencePlotSummary:
    points: int
    b_analytic: float
    guide_slope: float


def plot_convergence(estimates_csv_path, out_image_path) -> ConvergencePlotSummary:
    """|B_est - B_analytic| versus window count, log-log, with a -1/2 guide."""
    table = EstimateTable.from_csv(estimates_csv_path)
    analytic_rows = table.values("b_analytic")
    estimate_rows = table.values("b_estimate")
    if not analytic_rows:
        raise ParseError(f"{estimates_csv_path}: no b_analytic row")
    if not estimate_rows:
        raise ParseError(f"{estimates_csv_path}: no b_estimate rows")
    b_ref = analytic_rows[0].value
    pairs = sorted(
        (r.n_samples, abs(r.value - b_ref)) for r in estimate_rows
    )
    n = np.array([p[0] for p in pairs], dtype=float)
    dev = np.array([p[1] for p in pairs], dtype=float)

    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    ax.loglog(n, dev, marker="o", lw=1.2, label="|B_est - B_analytic|")
    anchor = max(dev[0], 1e-12)
    ax.loglog(n, anchor * np.sqrt(n[0] / n), ls="--", lw=1.0,
              label="n^(-1/2) guide")
    ax.set_xlabel("number of windows")
    ax.set_ylabel("deviation from analytic B")
    ax.set_title("Protocol estimator convergence")
    ax.legend(frameon=False)
    ax.grid(alpha=0.25, which="both")
    fig.tight_layout()
    fig.savefig(out_image_path, metadata=_PNG_METADATA)
    plt.close(fig)
    return ConvergencePlotSummary(
        points=len(pairs), b_analytic=b_ref, guide_slope=-0.5
    )
