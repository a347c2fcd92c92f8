"""
Experiment configuration loaded from a TOML file
"""
import hashlib
import json
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from hormander.core.exceptions import ConfigurationError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(_Section):
    d: int = Field(default=1, ge=1, le=2)
    n: int = Field(default=2, ge=1, le=3)
    side_length: float = Field(default=16.0, gt=0.0)
    points_per_axis: int = Field(default=128, gt=0)

    @field_validator("points_per_axis")
    @classmethod
    def validate_even(cls, value: int) -> int:
        if value % 2:
            raise ValueError("points_per_axis must be even")
        return value


class SymbolGridConfig(_Section):
    side_length: float = Field(default=4.0, gt=0.0)
    points_per_axis: int = Field(default=256, gt=0)


class SymbolConfig(_Section):
    name: str = "constant"
    params: Dict[str, Any] = Field(default_factory=dict)


class NormConfig(_Section):
    s: float = Field(default=1.5, gt=0.0)
    delta: float = Field(default=0.0, ge=0.0, lt=1.0)
    rho: float = Field(default=1.0, ge=0.0, le=1.0)
    order: float = 0.0
    p_inputs: List[float] = Field(default_factory=lambda: [2.0, 2.0])
    p: Optional[float] = None
    scale_count: int = Field(default=8, ge=2)
    J: int = Field(default=4, ge=0)
    K: int = Field(default=14, ge=0)
    j_max: int = Field(default=6, ge=0)
    max_beta_order: int = Field(default=2, ge=0, le=3)

    @field_validator("p_inputs")
    @classmethod
    def validate_positive(cls, value: List[float]) -> List[float]:
        if not value or any(p <= 0 for p in value):
            raise ValueError("every p_i must be positive")
        return value

    @property
    def inverse_p(self) -> float:
        return sum(1.0 / p for p in self.p_inputs)

    @property
    def resolved_p(self) -> float:
        return self.p if self.p is not None else 1.0 / self.inverse_p


class EnsembleConfig(_Section):
    size: int = Field(default=32, ge=1)
    groups: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)
    band_low: Optional[int] = None
    band_high: int = 1
    profile: Literal["smooth", "flat"] = "smooth"
    normalize: bool = False


class RegionConfig(_Section):
    n: int = Field(default=2, ge=1, le=20)
    alpha: str = "2"
    step: str = "1/16"
    upper: str = "4"

    @field_validator("alpha", "step", "upper", mode="before")
    @classmethod
    def validate_rational(cls, value: Any) -> str:
        try:
            number = Fraction(str(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value}") from exc
        if number <= 0:
            raise ValueError("must be positive")
        return str(number)

    def fractions(self):
        return Fraction(self.alpha), Fraction(self.step), Fraction(self.upper)


class OutputConfig(_Section):
    directory: Path = Path("results")


class ExperimentConfig(_Section):
    name: str = "experiment"
    grid: GridConfig = Field(default_factory=GridConfig)
    symbol: SymbolConfig = Field(default_factory=SymbolConfig)
    norms: NormConfig = Field(default_factory=NormConfig)
    symbol_grid: SymbolGridConfig = Field(default_factory=SymbolGridConfig)
    ensemble: EnsembleConfig = Field(default_factory=EnsembleConfig)
    region: RegionConfig = Field(default_factory=RegionConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def validate_consistency(self) -> "ExperimentConfig":
        if len(self.norms.p_inputs) != self.grid.n:
            raise ValueError(f"norms.p_inputs needs {self.grid.n} entries")
        if self.norms.p is not None and abs(1.0 / self.norms.p - self.norms.inverse_p) > 1e-12:
            raise ValueError("norms.p must satisfy 1/p = sum of 1/p_i")

        from hormander.services.symbol_service import default_registry

        if self.symbol.name not in default_registry():
            raise ValueError(f"unknown symbol: {self.symbol.name}")
        return self

    @classmethod
    def from_toml(cls, path: Path) -> "ExperimentConfig":
        """Read and validate a TOML config file"""
        try:
            with open(path, "rb") as handle:
                raw = tomllib.load(handle)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}", field="config") from exc
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        try:
            return cls.model_validate(raw)
        except ValidationError as exc:
            error = exc.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or "config"
            raise ConfigurationError(f"{field}: {error['msg']}", field=field) from exc

    def with_seed(self, seed: Optional[int]) -> "ExperimentConfig":
        if seed is None:
            return self
        ensemble = self.ensemble.model_copy(update={"seed": seed})
        return self.model_copy(update={"ensemble": ensemble})

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump"""
        payload = self.model_dump(mode="json")
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
