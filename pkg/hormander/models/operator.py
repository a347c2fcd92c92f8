"""
Operator plan and the output-frequency splitting result
"""
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from hormander.schemas.reports import SplitDiagnostics

from .base import DomainModel
from .grid import Grid, SampledFunction
from .symbol import Symbol


class EvaluationStrategy(str, Enum):
    DIRECT = "direct"
    FAST = "fast"


@dataclass(frozen=True, repr=False, eq=False)
class OperatorPlan(DomainModel):
    grid: Grid
    symbol: Symbol
    J: int
    K: int
    strategy: EvaluationStrategy
    cushion: int

    _repr_fields = ("grid", "symbol", "J", "K", "strategy")


@dataclass(frozen=True, repr=False, eq=False)
class SplitResult(DomainModel):
    """Terms I, II, III; `low_pass_terms` holds the per-j summands of II"""

    I: SampledFunction
    II: SampledFunction
    III: SampledFunction
    low_pass_terms: Tuple[SampledFunction, ...]
    diagnostics: SplitDiagnostics

    _repr_fields = ("diagnostics",)

    @property
    def total(self) -> SampledFunction:
        return self.I + self.II + self.III
