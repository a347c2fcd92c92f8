# Models initialization
from .base import DomainModel
from .grid import Domain, Grid, SampledFunction
from .bumps import RadialProfile, BumpFamily, CutoffFactor, FactorTerm, smooth_step
from .symbol import Symbol, Evaluator, ProbeSet
from .operator import EvaluationStrategy, OperatorPlan, SplitResult
from .region import ExponentPoint, Membership
from .weight import Weight

__all__ = [
    "DomainModel",
    "Domain",
    "Grid",
    "SampledFunction",
    "RadialProfile",
    "BumpFamily",
    "CutoffFactor",
    "FactorTerm",
    "smooth_step",
    "Symbol",
    "Evaluator",
    "ProbeSet",
    "EvaluationStrategy",
    "OperatorPlan",
    "SplitResult",
    "ExponentPoint",
    "Membership",
    "Weight",
]
