# Services initialization
from .grid_service import make_grid, forward_transform, inverse_transform
from .bump_service import default_family, lemma311_factors
from .symbol_service import SymbolRegistry, default_registry
from .mihlin_service import mihlin_estimate
from .norm_service import symbol_norm_s_delta, hp_quasinorm, Hp_quasinorm
from .maximal_service import hardy_littlewood, peetre_ratio
from .operator_service import OperatorService
from .region_service import in_A, in_B_intersection
from .calibration_service import CalibrationStore
from .experiment_service import ExperimentService, random_test_function, norm_scan, run_calibration

__all__ = [
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "default_family",
    "lemma311_factors",
    "SymbolRegistry",
    "default_registry",
    "mihlin_estimate",
    "symbol_norm_s_delta",
    "hp_quasinorm",
    "Hp_quasinorm",
    "hardy_littlewood",
    "peetre_ratio",
    "OperatorService",
    "in_A",
    "in_B_intersection",
    "CalibrationStore",
    "ExperimentService",
    "random_test_function",
    "norm_scan",
    "run_calibration",
]
