"""
Smooth radial cutoffs, the dyadic bump family and factor terms
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .base import DomainModel

# Knots of the tabulated smooth step on [0, 1]
SMOOTH_STEP_KNOTS = 4096


def _step_density(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) * exp(-1/(1-t)) on (0, 1), zero elsewhere"""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ti - 1.0 / (1.0 - ti))
    return out


def _density_scalar(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return math.exp(-1.0 / u - 1.0 / (1.0 - u))


@lru_cache(maxsize=1)
def _smooth_step_table() -> Tuple[PchipInterpolator, float]:
    knots = np.linspace(0.0, 1.0, SMOOTH_STEP_KNOTS + 1)
    pieces = [
        quad(_density_scalar, a, b, epsabs=1e-16, epsrel=1e-12)[0]
        for a, b in zip(knots[:-1], knots[1:])
    ]
    cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
    total = float(cumulative[-1])
    values = cumulative / total
    values[0], values[-1] = 0.0, 1.0
    return PchipInterpolator(knots, values, extrapolate=False), total


def smooth_step(t) -> np.ndarray:
    """Normalized integral of the step density: 0 for t <= 0, 1 for t >= 1"""
    t = np.asarray(t, dtype=float)
    interpolant, _ = _smooth_step_table()
    out = np.where(t >= 1.0, 1.0, 0.0)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        out[inside] = np.clip(interpolant(t[inside]), 0.0, 1.0)
    return out


def smooth_step_derivative(t) -> np.ndarray:
    _, total = _smooth_step_table()
    return _step_density(t) / total


@dataclass(frozen=True, repr=False)
class RadialProfile(DomainModel):
    """Monotone cutoff: exactly 1 for r <= plateau, exactly 0 for r >= support"""

    plateau: float
    support: float

    _repr_fields = ("plateau", "support")

    def __call__(self, radius) -> np.ndarray:
        r = np.abs(np.asarray(radius, dtype=float))
        t = (r - self.plateau) / (self.support - self.plateau)
        return 1.0 - smooth_step(t)

    def derivative(self, radius) -> np.ndarray:
        """d/dr of the profile"""
        r = np.abs(np.asarray(radius, dtype=float))
        width = self.support - self.plateau
        return -smooth_step_derivative((r - self.plateau) / width) / width


@dataclass(frozen=True, repr=False)
class BumpFamily(DomainModel):
    """Scalar pair (phi, psi) and multilinear pair (Phi, Psi) as radial functions.

    psi(r) = phi(r) - phi(2r) is supported in [1/2, 2];
    Psi(r) = Phi(r) - Phi(2r) is supported in [1/4, 1].
    """

    scalar: RadialProfile
    multilinear: RadialProfile

    _repr_fields = ("scalar", "multilinear")

    def phi(self, radius) -> np.ndarray:
        return self.scalar(radius)

    def psi(self, radius) -> np.ndarray:
        r = np.asarray(radius, dtype=float)
        return self.scalar(r) - self.scalar(2.0 * r)

    def Phi(self, radius) -> np.ndarray:
        return self.multilinear(radius)

    def Psi(self, radius) -> np.ndarray:
        r = np.asarray(radius, dtype=float)
        return self.multilinear(r) - self.multilinear(2.0 * r)

    def low_pass(self, radius) -> np.ndarray:
        """Phi(2r); low_pass + sum_{j=0}^{J} Psi(2^-j r) = Phi(2^-J r)"""
        return self.multilinear(2.0 * np.asarray(radius, dtype=float))

    def phi_at_level(self, level: int, radius) -> np.ndarray:
        """phi(2^-level r)"""
        return self.scalar(np.ldexp(np.asarray(radius, dtype=float), -level))

    def psi_at_level(self, level: int, radius) -> np.ndarray:
        """psi(2^-level r)"""
        return self.psi(np.ldexp(np.asarray(radius, dtype=float), -level))

    def Psi_at_level(self, level: int, radius) -> np.ndarray:
        """Psi(2^-level r)"""
        return self.Psi(np.ldexp(np.asarray(radius, dtype=float), -level))

    @property
    def psi_annulus(self) -> Tuple[float, float]:
        return self.scalar.plateau / 2.0, self.scalar.support

    @property
    def Psi_annulus(self) -> Tuple[float, float]:
        return self.multilinear.plateau / 2.0, self.multilinear.support


@dataclass(frozen=True, repr=False)
class CutoffFactor(DomainModel):
    """phi(2^-outer r) - phi(2^-inner r), or phi(2^-outer r) when inner is None.

    With inner set the factor vanishes for r <= 2^inner (origin-excluded);
    it always vanishes for r >= 2^(outer+1).
    """

    outer: int
    inner: Optional[int] = None

    _repr_fields = ("outer", "inner")

    @property
    def origin_excluded(self) -> bool:
        return self.inner is not None

    def __call__(self, family: BumpFamily, radius) -> np.ndarray:
        values = family.phi_at_level(self.outer, radius)
        if self.inner is not None:
            values = values - family.phi_at_level(self.inner, radius)
        return values

    def radial_support(self, family: BumpFamily) -> Tuple[float, float]:
        low = 0.0 if self.inner is None else family.scalar.plateau * 2.0**self.inner
        return low, family.scalar.support * 2.0**self.outer

    def shifted(self, levels: int) -> "CutoffFactor":
        inner = None if self.inner is None else self.inner + levels
        return CutoffFactor(self.outer + levels, inner)

    def label(self) -> str:
        if self.inner is None:
            return f"low({self.outer})"
        if self.outer == self.inner + 1:
            return f"band({self.outer})"
        return f"annulus({self.inner},{self.outer})"


@dataclass(frozen=True, repr=False)
class FactorTerm(DomainModel):
    """One summand of the factored window at level j: factors for blocks 1..n and for -sum(xi)"""

    level: int
    factors: Tuple[CutoffFactor, ...]
    weight: float = 1.0

    _repr_fields = ("level", "factors")

    @property
    def origin_excluded_count(self) -> int:
        return sum(1 for factor in self.factors if factor.origin_excluded)

    def describe(self) -> str:
        inner = " x ".join(factor.label() for factor in self.factors)
        return f"j={self.level}: {inner}"
