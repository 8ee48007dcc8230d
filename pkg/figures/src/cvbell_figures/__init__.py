"""Figure generation for cvbell CSV outputs.

Strictly a read-only consumer of the CSV interfaces: nothing here
recomputes any physics.
"""

from .tables import EstimateTable, ParseError, SweepTable
from .plots import ConvergencePlotSummary, SweepPlotSummary, plot_convergence, plot_sweep

__all__ = [
    "ConvergencePlotSummary",
    "EstimateTable",
    "ParseError",
    "SweepPlotSummary",
    "SweepTable",
    "plot_convergence",
    "plot_sweep",
]
