"""
Report schemas; every serialized report carries a schema version
"""
import hashlib
import json
from datetime import datetime, timezone
from typing import Dict, List, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1"
BASELINE_LABEL = "self-generated"

Verdict = Literal["consistent", "violated"]


class ReportBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: str = SCHEMA_VERSION


class ProvenancedReport(ReportBase):
    """Report with config hash, seed, timestamp and a content hash"""

    config_hash: str = ""
    seed: int = 0
    baseline_label: str = BASELINE_LABEL
    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    content_hash: str = ""

    def compute_content_hash(self) -> str:
        payload = self.model_dump(mode="json", exclude={"timestamp", "content_hash"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def finalize(self):
        self.content_hash = self.compute_content_hash()
        return self


class MihlinOrderEstimate(ReportBase):
    alpha_order: int
    beta_order: int
    constant: float = Field(ge=0.0)
    allowed_exponent: float
    fitted_exponent: Optional[float] = None
    shell_radii: List[float] = Field(default_factory=list)
    shell_maxima: List[float] = Field(default_factory=list)
    verdict: Verdict = "consistent"
    violating_probe: Optional[List[float]] = None


class MihlinReport(ReportBase):
    symbol: str
    rho: float
    delta: float
    order: float
    max_beta_order: int
    tolerance: float
    probe_count: int
    estimates: List[MihlinOrderEstimate]
    verdict: Verdict
    note: str = "finite-difference sampling heuristic, not a proof of class membership"

    def estimate(self, alpha_order: int, beta_order: int) -> MihlinOrderEstimate:
        for entry in self.estimates:
            if entry.alpha_order == alpha_order and entry.beta_order == beta_order:
                return entry
        raise KeyError((alpha_order, beta_order))


class BandContribution(ReportBase):
    j: int
    order0: float = Field(ge=0.0)
    order1: float = Field(ge=0.0)
    total: float = Field(ge=0.0)


class SymbolNormReport(ReportBase):
    symbol: str
    s: float
    delta: float
    low_order0: float = Field(ge=0.0)
    low_order1: float = Field(ge=0.0)
    low: float = Field(ge=0.0)
    bands: List[BandContribution]
    total: float = Field(ge=0.0)
    probe_count: int
    probes_subsampled: bool = False
    x_probes: List[List[float]]
    slice_grid: Dict[str, float]

    @property
    def band_sup(self) -> float:
        return max((band.total for band in self.bands), default=0.0)

    def to_frame(self, per_level: bool = False) -> pd.DataFrame:
        """Low piece and the supremal band level; every band level when per_level is set"""
        rows = [{"piece": "low", "j": -1, "order0": self.low_order0,
                 "order1": self.low_order1, "total": self.low}]
        bands = self.bands if per_level else [max(self.bands, key=lambda band: band.total)]
        rows += [{"piece": "band", "j": band.j, "order0": band.order0,
                  "order1": band.order1, "total": band.total} for band in bands]
        return pd.DataFrame(rows, columns=NORM_TABLE_COLUMNS)


NORM_TABLE_COLUMNS = ["piece", "j", "order0", "order1", "total"]


class HormanderNormTable(ReportBase):
    symbol: str
    s: float
    levels: List[int]
    values: List[float]
    sup: float


class ShellProfile(ReportBase):
    """Weighted spectral energy per dyadic shell and its fitted log2 tail slope"""

    s: float
    shells: List[int]
    energies: List[float]
    tail_slope: Optional[float] = None


class NormScanRow(ReportBase):
    s: float
    j: int
    band_norm: float
    tail_slope: Optional[float] = None


class NormScanFit(ReportBase):
    s: float
    slope: Optional[float] = None
    mean_tail_slope: Optional[float] = None
    predicted_slope: Optional[float] = None


class NormScanResult(ReportBase):
    symbol: str
    delta: float
    rows: List[NormScanRow]
    fits: List[NormScanFit]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump(exclude={"schema_version"}) for row in self.rows],
                            columns=NORM_SCAN_COLUMNS)

    def fit(self, s: float) -> NormScanFit:
        for entry in self.fits:
            if entry.s == s:
                return entry
        raise KeyError(s)

    def band_norms(self, s: float) -> List[float]:
        return [row.band_norm for row in self.rows if row.s == s]


NORM_SCAN_COLUMNS = ["s", "j", "band_norm", "tail_slope"]


class ScalingProfile(ReportBase):
    r: float
    s: float
    steps: List[int]
    maxima: List[float]
    fitted_slope: float
    predicted_slope: float
    weighted: bool = False


class SplitDiagnostics(ReportBase):
    J: int
    K: int
    reference_norm: float
    residual: float
    energy_outside_band: float
    factorization_error: float
    tolerance: float
    within_tolerance: bool


class RegionVerdicts(ReportBase):
    point: List[float]
    alpha: float
    in_A: bool
    kato: bool
    admissible: bool
    witness_s: Optional[float] = None


class RatioSummary(ReportBase):
    max: float
    median: float
    mean: float


class BoundednessReport(ProvenancedReport):
    symbol: str
    p_inputs: List[float]
    p: float
    scale_count: int
    effective_scale_count: int
    ratios: List[float]
    group_maxima: List[float]
    summary: RatioSummary
    stability_ratio: float
    stable: bool
    symbol_norm: float
    normalized_ratio: float
    regions: RegionVerdicts


class DecomposeReport(ProvenancedReport):
    symbol: str
    diagnostics: SplitDiagnostics


class CalibrationBaseline(BaseModel):
    label: str = BASELINE_LABEL
    entries: Dict[str, float] = Field(default_factory=dict)
