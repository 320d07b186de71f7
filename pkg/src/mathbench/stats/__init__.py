from .irt import (
    IRTConfig,
    IRTFit,
    FitError,
    ResponseMatrix,
    expected_performance,
    fit_irt,
    sigmoid,
    simulate_matrix,
)
from .cost import (
    CostModelFit,
    CostObservation,
    UnderIdentified,
    expected_cost,
    fit_cost_model,
)
from .intervals import METHODS, CoverageReport, Interval, ci, simulate_coverage
from .robustness import RankShiftTable, leave_one_family_out, spearman

__all__ = [
    "IRTConfig", "IRTFit", "FitError", "ResponseMatrix",
    "expected_performance", "fit_irt", "sigmoid", "simulate_matrix",
    "CostModelFit", "CostObservation", "UnderIdentified",
    "expected_cost", "fit_cost_model",
    "METHODS", "CoverageReport", "Interval", "ci", "simulate_coverage",
    "RankShiftTable", "leave_one_family_out", "spearman",
]
