"""
Dyadic bump families on the grid and the factored decomposition of the
multilinear band window Psi(2^-j xi).

The window at level j is rewritten as a finite sum of products
    Psi(2^-j xi) * F_1(|xi_1|) ... F_n(|xi_n|) * F_{n+1}(|xi_1 + ... + xi_n|)
in which every surviving product has at least two factors vanishing near the
origin. Per block we insert 1 = phi_{j-c} + sum_k psi_k, and on the sum
variable a low/annulus split at scale j + c'.
"""
import itertools
import math
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from hormander.core.exceptions import ConstructionError, DomainError, ResolutionError
from hormander.core.logging import get_logger
from hormander.models import BumpFamily, CutoffFactor, FactorTerm, Grid, RadialProfile, SampledFunction

from .grid_service import frequency_function

logger = get_logger("bumps")

# Lattice samples required across a transition band along one axis
MIN_TRANSITION_SAMPLES = 4


def make_profile(plateau: float, support: float) -> RadialProfile:
    if not 0 < plateau < support:
        raise DomainError(f"profile needs 0 < plateau < support, got {plateau}, {support}")
    return RadialProfile(float(plateau), float(support))


@lru_cache(maxsize=1)
def default_family() -> BumpFamily:
    """phi: plateau 1, support 2; Phi: plateau 1/2, support 1"""
    return BumpFamily(scalar=make_profile(1.0, 2.0), multilinear=make_profile(0.5, 1.0))


def _check_resolution(grid: Grid, profile: RadialProfile) -> None:
    if grid.max_frequency < profile.support:
        raise ResolutionError(
            f"max frequency {grid.max_frequency} is below support radius {profile.support}",
            max_frequency=grid.max_frequency,
        )
    axis = grid.frequency_axis()
    inside = np.count_nonzero((axis >= profile.plateau) & (axis <= profile.support))
    if inside < MIN_TRANSITION_SAMPLES:
        raise ResolutionError(
            f"only {inside} samples across [{profile.plateau}, {profile.support}]",
            samples=int(inside),
        )


def make_scalar_pair(grid: Grid, family: Optional[BumpFamily] = None) -> Tuple[SampledFunction, SampledFunction]:
    """(phi, psi) sampled on the lattice of one block"""
    family = family or default_family()
    _check_resolution(grid, family.scalar)
    radius = grid.frequency_norms(1)
    return frequency_function(grid, family.phi(radius)), frequency_function(grid, family.psi(radius))


def make_multilinear_pair(grid: Grid, family: Optional[BumpFamily] = None) -> Tuple[SampledFunction, SampledFunction]:
    """(Phi, Psi) sampled on the lattice of (R^d)^n"""
    family = family or default_family()
    _check_resolution(grid, family.multilinear)
    radius = grid.frequency_norms(grid.n)
    return (
        frequency_function(grid, family.Phi(radius), arity=grid.n),
        frequency_function(grid, family.Psi(radius), arity=grid.n),
    )


def default_cushion(n: int) -> int:
    return 4 + math.ceil(math.log2(n * math.sqrt(n)))


def default_outer_cushion(n: int) -> int:
    return math.ceil(math.log2(n)) + 2


def _candidate_terms(n: int, j: int, cushion: int, outer_cushion: int, family: BumpFamily):
    # Highest band level whose phi plateau covers the window's outer radius
    top = j + math.ceil(math.log2(family.multilinear.support / family.scalar.plateau)) + 1
    block_options = [CutoffFactor(j - cushion)]
    block_options += [CutoffFactor(k, k - 1) for k in range(j - cushion + 1, top + 1)]
    sum_options = [CutoffFactor(j - cushion), CutoffFactor(j + outer_cushion, j - cushion)]
    for blocks in itertools.product(block_options, repeat=n):
        for last in sum_options:
            yield FactorTerm(level=j, factors=tuple(blocks) + (last,))


def _window_radii(family: BumpFamily, j: int) -> Tuple[float, float]:
    inner, outer = family.Psi_annulus
    return inner * 2.0**j, outer * 2.0**j


def _may_meet_window(term: FactorTerm, family: BumpFamily) -> bool:
    """Necessary condition for the term's support to meet the open window annulus"""
    inner, outer = _window_radii(family, term.level)
    supports = [factor.radial_support(family) for factor in term.factors]
    blocks, (sum_low, sum_high) = supports[:-1], supports[-1]
    lows = [low for low, _ in blocks]
    highs = [high for _, high in blocks]

    if sum(low**2 for low in lows) >= outer**2:
        return False
    if sum(high**2 for high in highs) <= inner**2:
        return False
    if sum(highs) <= sum_low:
        return False
    reach = max(lows[i] - (sum(highs) - highs[i]) for i in range(len(blocks)))
    if max(reach, 0.0) >= sum_high:
        return False
    return True


def _max_radius_bound(term: FactorTerm, family: BumpFamily) -> float:
    """Upper bound of |xi| on the support of the term's factors"""
    supports = [factor.radial_support(family) for factor in term.factors]
    highs = [high for _, high in supports[:-1]]
    sum_high = supports[-1][1]
    total = sum(highs)
    bounds = [min(high, sum_high + total - high) for high in highs]
    return math.sqrt(sum(bound**2 for bound in bounds))


def _block_shape(grid: Grid, block: int) -> Tuple[int, ...]:
    d, n, N = grid.d, grid.n, grid.points_per_axis
    return (1,) * (d * block) + (N,) * d + (1,) * (d * (n - block - 1))


class _FactorEvaluator:
    """Caches factor values per block (N^d samples) and on the sum variable"""

    def __init__(self, grid: Grid, family: BumpFamily):
        self.grid = grid
        self.family = family
        self.block_radius = grid.frequency_norms(1)
        mesh = grid.frequency_mesh(grid.n)
        self.sum_radius = np.sqrt(np.sum(np.sum(mesh, axis=-2) ** 2, axis=-1))
        self._blocks: Dict[Tuple[CutoffFactor, int], np.ndarray] = {}
        self._sums: Dict[CutoffFactor, np.ndarray] = {}

    def block(self, factor: CutoffFactor, index: int) -> np.ndarray:
        key = (factor, index)
        if key not in self._blocks:
            values = factor(self.family, self.block_radius)
            self._blocks[key] = values.reshape(_block_shape(self.grid, index))
        return self._blocks[key]

    def total(self, factor: CutoffFactor) -> np.ndarray:
        if factor not in self._sums:
            self._sums[factor] = factor(self.family, self.sum_radius)
        return self._sums[factor]

    def product(self, term: FactorTerm) -> np.ndarray:
        values = self.total(term.factors[-1]) * term.weight
        for index, factor in enumerate(term.factors[:-1]):
            values = values * self.block(factor, index)
        return values


def band_window(grid: Grid, j: int, family: Optional[BumpFamily] = None) -> np.ndarray:
    """Psi(2^-j xi) on the lattice of (R^d)^n"""
    family = family or default_family()
    return family.Psi_at_level(j, grid.frequency_norms(grid.n))


def lemma311_factors(
    grid: Grid,
    j: int,
    cushion: Optional[int] = None,
    outer_cushion: Optional[int] = None,
    family: Optional[BumpFamily] = None,
) -> List[FactorTerm]:
    """Factor terms for level j, each with at least two origin-excluded factors.

    Candidates with fewer than two origin-excluded factors must vanish on the
    window; this is certified from the radial supports and on the grid, and a
    ConstructionError names the first candidate that fails.
    """
    family = family or default_family()
    n = grid.n
    cushion = default_cushion(n) if cushion is None else cushion
    outer_cushion = default_outer_cushion(n) if outer_cushion is None else outer_cushion

    inner_radius, _ = _window_radii(family, j)
    window = band_window(grid, j, family)
    evaluator = _FactorEvaluator(grid, family)

    terms: List[FactorTerm] = []
    for term in _candidate_terms(n, j, cushion, outer_cushion, family):
        if term.origin_excluded_count >= 2:
            if _may_meet_window(term, family):
                terms.append(term)
            continue

        # Certify that the candidate vanishes on the window
        if _max_radius_bound(term, family) > inner_radius:
            raise ConstructionError(
                f"cushion {cushion} too small: support of {term.describe()} reaches the window",
                term=term.describe(),
            )
        if np.any(evaluator.product(term) * window != 0.0):
            raise ConstructionError(
                f"term {term.describe()} does not vanish on the window",
                term=term.describe(),
            )

    logger.debug(f"level {j}: {len(terms)} factor terms (cushion {cushion}, outer {outer_cushion})")
    return terms


def factor_window(
    grid: Grid,
    j: int,
    terms: List[FactorTerm],
    family: Optional[BumpFamily] = None,
) -> np.ndarray:
    """Sum over terms of Psi(2^-j xi) * prod_i F_i(|xi_i|) * F_{n+1}(|sum xi|)"""
    family = family or default_family()
    evaluator = _FactorEvaluator(grid, family)
    accumulated = np.zeros(grid.shape(grid.n))
    for term in terms:
        if term.level != j:
            raise DomainError(f"term at level {term.level} used for level {j}")
        accumulated += evaluator.product(term)
    return band_window(grid, j, family) * accumulated


def verify_factorization(
    grid: Grid,
    j: int,
    terms: List[FactorTerm],
    family: Optional[BumpFamily] = None,
) -> float:
    """Max deviation from Psi(2^-j xi) over lattice points with every block nonzero"""
    family = family or default_family()
    reference = band_window(grid, j, family)
    factored = factor_window(grid, j, terms, family)
    nonzero_blocks = np.all(grid.block_norms(grid.n) > 0.0, axis=-1)
    deviation = np.abs(factored - reference)[nonzero_blocks]
    return float(deviation.max()) if deviation.size else 0.0
