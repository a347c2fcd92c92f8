# Schemas initialization
from .config import (
    ExperimentConfig,
    GridConfig,
    SymbolConfig,
    SymbolGridConfig,
    NormConfig,
    EnsembleConfig,
    RegionConfig,
    OutputConfig,
)
from .reports import (
    SCHEMA_VERSION,
    MihlinOrderEstimate,
    MihlinReport,
    BandContribution,
    SymbolNormReport,
    HormanderNormTable,
    ShellProfile,
    NormScanRow,
    NormScanFit,
    NormScanResult,
    ScalingProfile,
    SplitDiagnostics,
    RegionVerdicts,
    RatioSummary,
    BoundednessReport,
    DecomposeReport,
    CalibrationBaseline,
)

__all__ = [
    "ExperimentConfig",
    "GridConfig",
    "SymbolConfig",
    "SymbolGridConfig",
    "NormConfig",
    "EnsembleConfig",
    "RegionConfig",
    "OutputConfig",
    "SCHEMA_VERSION",
    "MihlinOrderEstimate",
    "MihlinReport",
    "BandContribution",
    "SymbolNormReport",
    "HormanderNormTable",
    "ShellProfile",
    "NormScanRow",
    "NormScanFit",
    "NormScanResult",
    "ScalingProfile",
    "SplitDiagnostics",
    "RegionVerdicts",
    "RatioSummary",
    "BoundednessReport",
    "DecomposeReport",
    "CalibrationBaseline",
]
