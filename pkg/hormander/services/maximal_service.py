"""
Hardy-Littlewood maximal machinery on the periodic box and the empirical
surrogates of the Peetre-type and square-function inequalities.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hormander.core.config import get_settings
from hormander.core.exceptions import BandLimitError, DomainError
from hormander.core.logging import get_logger
from hormander.models import Domain, Grid, SampledFunction, Weight
from hormander.schemas.reports import ScalingProfile

from .bump_service import default_family
from .grid_service import apply_multiplier, forward_transform, inverse_transform, periodic_convolution, space_function
from .norm_service import Hp_quasinorm, hp_quasinorm, lp_quasinorm

logger = get_logger("maximal")

# Relative spectral magnitude tolerated outside a declared band
BAND_LEAKAGE = 1e-10


def _require_space(f: SampledFunction) -> None:
    if f.domain is not Domain.SPACE or f.arity != 1:
        raise DomainError("expected a single-block space-domain function")


def dyadic_radii(grid: Grid) -> List[float]:
    """spacing * 2^m for m = 0..log2 N"""
    top = int(math.log2(grid.points_per_axis))
    return [grid.spacing * 2.0**m for m in range(0, top + 1)]


@lru_cache(maxsize=64)
def _ball_multiplier(grid: Grid, radius: float, closed: bool) -> Tuple[np.ndarray, int]:
    """Transform of the periodic ball indicator and its point count"""
    distance = grid.periodic_distance()
    mask = (distance <= radius) if closed else (distance < radius)
    count = int(np.count_nonzero(mask))
    multiplier = forward_transform(space_function(grid, mask.astype(float))).values.copy()
    multiplier.setflags(write=False)
    return multiplier, count


def ball_sums(values: np.ndarray, grid: Grid, radius: float, closed: bool = False) -> Tuple[np.ndarray, int]:
    """sum over grid points z in the ball of values(x + z), times spacing^d"""
    multiplier, count = _ball_multiplier(grid, radius, closed)
    spectrum = forward_transform(space_function(grid, values))
    summed = inverse_transform(spectrum.with_values(spectrum.values * multiplier)).values.real
    return summed, count


def hardy_littlewood(f: SampledFunction) -> SampledFunction:
    """max over dyadic radii of the average of |f| over the open periodic ball"""
    _require_space(f)
    grid = f.grid
    magnitude = np.abs(f.values)
    cell = grid.spacing**grid.d
    # The smallest open ball holds only its center
    field = magnitude.copy()
    for radius in dyadic_radii(grid)[1:]:
        summed, count = ball_sums(magnitude, grid, radius)
        field = np.maximum(field, summed / (count * cell))
    return f.with_values(field)


def m_r(f: SampledFunction, r: float) -> SampledFunction:
    """(M |f|^r)^(1/r)"""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    powered = f.with_values(np.abs(f.values) ** r)
    return f.with_values(hardy_littlewood(powered).values.real ** (1.0 / r))


def check_band_limit(g: SampledFunction, band: float) -> None:
    spectrum = np.abs(forward_transform(g).values)
    outside = g.grid.frequency_norms(1) > band
    peak = spectrum.max()
    if peak == 0.0:
        return
    leakage = spectrum[outside].max() if np.any(outside) else 0.0
    if leakage > BAND_LEAKAGE * peak:
        raise BandLimitError(
            f"spectrum leaks {leakage / peak:.3g} of its peak outside |xi| <= {band}",
            band=band,
        )


def _shift_distances(grid: Grid) -> np.ndarray:
    """Minimal-image length of every index shift, shape grid.shape(1)"""
    N = grid.points_per_axis
    wrapped = (np.arange(N) + N // 2) % N - N // 2
    squares = np.meshgrid(*([wrapped.astype(float) ** 2] * grid.d), indexing="ij")
    return grid.spacing * np.sqrt(sum(squares))


def peetre_ratio(g: SampledFunction, band: float, r: float) -> Tuple[SampledFunction, float]:
    """sup_z |g(x - z)| / (1 + band |z|)^(d/r), divided by M_r g(x)"""
    _require_space(g)
    check_band_limit(g, band)
    grid = g.grid
    magnitude = np.abs(g.values)
    weights = (1.0 + band * _shift_distances(grid)) ** (-grid.d / r)
    shifts = list(np.ndindex(*grid.shape(1)))
    axes = tuple(range(grid.d))

    def chunk_sup(chunk: Sequence[Tuple[int, ...]]) -> np.ndarray:
        best = np.zeros_like(magnitude)
        for shift in chunk:
            np.maximum(best, np.roll(magnitude, shift, axis=axes) * weights[shift], out=best)
        return best

    threads = get_settings().threads
    chunks = [shifts[i::threads] for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        partial = list(pool.map(chunk_sup, chunks))
    numerator = np.maximum.reduce(partial)

    denominator = m_r(g, r).values.real
    ratio = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0.0)
    return g.with_values(ratio), float(ratio.max())


def weighted_smooth(f: SampledFunction, weight: Weight) -> SampledFunction:
    """omega_k^N * |f| by periodic quadrature"""
    _require_space(f)
    if not weight.decay > f.grid.d:
        raise DomainError(f"weight decay {weight.decay} must exceed d = {f.grid.d}")
    smoothed = periodic_convolution(f.with_values(np.abs(f.values)), weight.sample(f.grid)).values.real
    return f.with_values(np.maximum(smoothed, 0.0))


def default_levels(grid: Grid, local: bool) -> List[int]:
    """Band levels covering the lattice: 1..top locally, bottom..top globally"""
    top = int(math.ceil(math.log2(grid.max_frequency))) + 1
    bottom = 1 if local else int(math.floor(math.log2(grid.frequency_spacing))) - 1
    return list(range(bottom, top + 1))


def square_function(
    f: SampledFunction,
    j_range: Optional[Iterable[int]] = None,
    local: bool = True,
) -> SampledFunction:
    """(sum_j |Delta_j f|^2)^(1/2) with Delta_j = psi(2^-j xi); the local version adds the phi piece"""
    _require_space(f)
    family = default_family()
    grid = f.grid
    levels = list(j_range) if j_range is not None else default_levels(grid, local)
    if local and any(j < 1 for j in levels):
        raise DomainError("local square function uses levels j >= 1")
    radius = grid.frequency_norms(1)

    energy = np.zeros(f.values.shape)
    if local:
        energy += np.abs(apply_multiplier(f, family.phi(radius)).values) ** 2
    for j in levels:
        energy += np.abs(apply_multiplier(f, family.psi_at_level(j, radius)).values) ** 2
    return f.with_values(np.sqrt(energy))


def square_function_ratios(f: SampledFunction, p: float, scale_count: int = 8) -> Dict[str, float]:
    """||S f||_p / ||f||_{h^p} (local) and ||f||_{H^p} / ||S f||_p (global)"""
    local = lp_quasinorm(square_function(f, local=True), p) / hp_quasinorm(f, p, scale_count)
    global_ = Hp_quasinorm(f, p, scale_count) / lp_quasinorm(square_function(f, local=False), p)
    return {"local": float(local), "global": float(global_)}


def scaling_profile(
    F: SampledFunction,
    r: float,
    s: float,
    j: int,
    M_values: Iterable[int],
    weight: Optional[Weight] = None,
) -> ScalingProfile:
    """max_x (R^-d int_{|z| <= R} G(x + z)^s dz)^(1/s) / M_r F(x) with R = 2^(M - j).

    G is |F|, or omega * |F| when a weight is given. The log2 growth in M is
    compared with d (1/r - 1/s).
    """
    _require_space(F)
    grid = F.grid
    steps = list(M_values)
    if len(steps) < 2:
        raise DomainError("scaling profile needs at least two values of M")
    if 2.0 ** (max(steps) - j) > grid.side_length / 2.0:
        raise DomainError("largest ball exceeds half the box")

    field = weighted_smooth(F, weight).values.real if weight is not None else np.abs(F.values)
    denominator = m_r(F, r).values.real

    maxima = []
    for M in steps:
        radius = 2.0 ** (M - j)
        summed, _ = ball_sums(field**s, grid, radius, closed=True)
        average = np.maximum(summed, 0.0) / radius**grid.d
        quotient = np.divide(average ** (1.0 / s), denominator,
                             out=np.zeros_like(denominator), where=denominator > 0.0)
        maxima.append(float(quotient.max()))

    slope = float(np.polyfit(steps, np.log2(maxima), 1)[0])
    predicted = grid.d * (1.0 / r - 1.0 / s)
    logger.debug(f"scaling profile r={r} s={s}: slope {slope:.3f}, predicted {predicted:.3f}")
    return ScalingProfile(
        r=r, s=s, steps=steps, maxima=maxima,
        fitted_slope=slope, predicted_slope=predicted, weighted=weight is not None,
    )
