"""
Norm functionals: Lebesgue quadrature, L^2 Sobolev norms, the dyadic
multiplier and symbol norms, and the local/global Hardy maximal quasi-norms.

Symbol slices xi -> m(x, 2^j xi) Psi(xi) live on their own "symbol grid": the
slice variable xi takes the space role there and its Sobolev weight is read
off the dual lattice.
"""
import math
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from hormander.core.config import Settings, get_settings
from hormander.core.exceptions import DomainError
from hormander.core.logging import get_logger
from hormander.models import Domain, Grid, SampledFunction, Symbol
from hormander.schemas.reports import BandContribution, HormanderNormTable, ShellProfile, SymbolNormReport

from .bump_service import default_family, make_profile
from .grid_service import forward_transform, inverse_transform, space_function

logger = get_logger("norms")

FOUR_PI_SQ = 4.0 * np.pi**2


def lp_quasinorm(f: SampledFunction, p: float) -> float:
    if f.domain is not Domain.SPACE:
        raise DomainError("lp_quasinorm expects a space-domain function")
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    magnitude = np.abs(f.values)
    if math.isinf(p):
        return float(magnitude.max())
    cell = f.grid.spacing ** (f.grid.d * f.arity)
    return float((np.sum(magnitude**p) * cell) ** (1.0 / p))


def _spectrum(F: SampledFunction) -> SampledFunction:
    return F if F.domain is Domain.FREQUENCY else forward_transform(F)


def _weighted_l2(spectrum: SampledFunction, weight: np.ndarray) -> float:
    cell = spectrum.grid.frequency_spacing ** (spectrum.grid.d * spectrum.arity)
    return float(np.sqrt(np.sum(weight * np.abs(spectrum.values) ** 2) * cell))


def sobolev_weight(grid: Grid, arity: int, s: float) -> np.ndarray:
    """(1 + 4 pi^2 |xi|^2)^s on the lattice"""
    return (1.0 + FOUR_PI_SQ * grid.frequency_norms(arity) ** 2) ** s


def product_sobolev_weight(grid: Grid, orders: Sequence[float]) -> np.ndarray:
    """prod_i (1 + 4 pi^2 |xi_i|^2)^(s_i) on the lattice"""
    block = grid.block_norms(len(orders))
    weight = np.ones(block.shape[:-1])
    for i, order in enumerate(orders):
        weight = weight * (1.0 + FOUR_PI_SQ * block[..., i] ** 2) ** order
    return weight


def sobolev_l2s(F: SampledFunction, s: float) -> float:
    if s < 0:
        raise DomainError(f"Sobolev order must be nonnegative, got {s}")
    spectrum = _spectrum(F)
    return _weighted_l2(spectrum, sobolev_weight(F.grid, F.arity, s))


def product_sobolev(F: SampledFunction, orders: Sequence[float]) -> float:
    orders = list(orders)
    if len(orders) != F.arity:
        raise DomainError(f"need {F.arity} orders, got {len(orders)}")
    if any(order < 0 for order in orders):
        raise DomainError("product Sobolev orders must be nonnegative")
    spectrum = _spectrum(F)
    return _weighted_l2(spectrum, product_sobolev_weight(F.grid, orders))


def sobolev_shell_profile(
    F: SampledFunction,
    s: float,
    tail: Optional[Tuple[int, int]] = None,
) -> ShellProfile:
    """Weighted spectral energy on the dyadic shells 2^l <= |eta| < 2^(l+1).

    `tail` is the inclusive shell range of the log2 slope fit; by default the
    five complete shells below the top two.
    """
    spectrum = _spectrum(F)
    grid = F.grid
    radius = grid.frequency_norms(F.arity)
    density = sobolev_weight(grid, F.arity, s) * np.abs(spectrum.values) ** 2
    cell = grid.frequency_spacing ** (grid.d * F.arity)

    top = int(math.floor(math.log2(grid.max_frequency)))
    shells = list(range(0, top))
    energies = []
    for l in shells:
        mask = (radius >= 2.0**l) & (radius < 2.0 ** (l + 1))
        energies.append(float(np.sum(density[mask]) * cell))

    low, high = tail if tail is not None else (top - 6, top - 2)
    fitted = [(l, e) for l, e in zip(shells, energies) if low <= l <= high and e > 0.0]
    slope = None
    if len(fitted) >= 2:
        levels, values = zip(*fitted)
        slope = float(np.polyfit(levels, np.log2(values), 1)[0])
    return ShellProfile(s=s, shells=shells, energies=energies, tail_slope=slope)


def symbol_slice(
    symbol: Symbol,
    x: np.ndarray,
    j: int,
    symbol_grid: Grid,
    window: np.ndarray,
    derivative: Optional[int] = None,
    x_step: Optional[float] = None,
) -> SampledFunction:
    """xi -> m(x, 2^j xi) w(xi), or d_{x_l} m(x, 2^j xi) w(xi) for derivative = l"""
    mesh = symbol_grid.space_mesh(symbol.n)
    scaled = np.ldexp(mesh, j)
    point = np.asarray(x, dtype=float).reshape(symbol.d)
    if derivative is None:
        values = symbol(point, scaled)
    else:
        values = symbol.x_gradient(point, scaled, step=x_step)[..., derivative]
    return space_function(symbol_grid, values * window, arity=symbol.n)


def slice_windows(symbol_grid: Grid, arity: int) -> Tuple[np.ndarray, np.ndarray]:
    family = default_family()
    mesh = symbol_grid.space_mesh(arity)
    radius = np.sqrt(np.sum(mesh**2, axis=(-2, -1)))
    return family.Phi(radius), family.Psi(radius)


def _check_symbol_grid(symbol: Symbol, symbol_grid: Grid) -> None:
    if symbol_grid.d != symbol.d or symbol_grid.n != symbol.n:
        raise DomainError("symbol grid dimensions do not match the symbol")
    if symbol_grid.side_length < 2.0 * default_family().multilinear.support:
        raise DomainError("symbol grid must contain the unit ball of the slice variable")


def hormander_norm(
    symbol: Symbol,
    s: float,
    j_range: Iterable[int],
    symbol_grid: Grid,
) -> HormanderNormTable:
    """sup over j of ||m(2^j .) Psi||_{L^2_s} for an x-independent symbol"""
    if symbol.x_dependent:
        raise DomainError(f"hormander_norm needs an x-independent symbol, got {symbol.name}")
    _check_symbol_grid(symbol, symbol_grid)
    levels = list(j_range)
    if not levels:
        raise DomainError("empty j range")
    _, band = slice_windows(symbol_grid, symbol.n)
    origin = np.zeros(symbol.d)
    values = [sobolev_l2s(symbol_slice(symbol, origin, j, symbol_grid, band), s) for j in levels]
    return HormanderNormTable(symbol=symbol.name, s=s, levels=levels, values=values, sup=max(values))


def make_x_probes(grid: Grid, settings: Optional[Settings] = None, seed: int = 0) -> Tuple[np.ndarray, bool]:
    """All grid x points when d N^d is small, else a scrambled Sobol subsample.

    Returns the probes and whether they were subsampled.
    """
    settings = settings or get_settings()
    if grid.d * grid.sample_count(1) <= settings.probe_limit:
        return np.array(grid.space_points()), False
    sampler = qmc.Sobol(d=grid.d, scramble=True, seed=seed)
    half = grid.side_length / 2.0
    unit = sampler.random(settings.probe_subsample)
    logger.warning(
        f"x-probe set subsampled to {settings.probe_subsample} of {grid.sample_count(1)} grid points"
    )
    return qmc.scale(unit, [-half] * grid.d, [half] * grid.d), True


def slice_norms(
    symbol: Symbol,
    x: np.ndarray,
    j: int,
    symbol_grid: Grid,
    window: np.ndarray,
    s: float,
    x_step: float,
) -> Tuple[float, float]:
    """(order-0 norm, sum over l of order-1 norms) of one windowed slice"""
    order0 = sobolev_l2s(symbol_slice(symbol, x, j, symbol_grid, window), s)
    if not symbol.x_dependent:
        return order0, 0.0
    order1 = sum(
        sobolev_l2s(symbol_slice(symbol, x, j, symbol_grid, window, derivative=l, x_step=x_step), s)
        for l in range(symbol.d)
    )
    return order0, order1


def symbol_norm_s_delta(
    symbol: Symbol,
    s: float,
    delta: float,
    x_probes: np.ndarray,
    j_max: int,
    symbol_grid: Grid,
    x_step: Optional[float] = None,
    allow_fallback: bool = True,
    probes_subsampled: bool = False,
) -> SymbolNormReport:
    """Low piece plus the supremum over j of the band pieces of the (s, delta) symbol norm"""
    x_probes = np.atleast_2d(np.asarray(x_probes, dtype=float))
    if x_probes.size == 0:
        raise DomainError("x-probe set is empty")
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    if not symbol.has_gradient and not allow_fallback:
        raise DomainError(f"symbol {symbol.name} has no analytic x-derivatives")
    _check_symbol_grid(symbol, symbol_grid)
    if x_step is None:
        x_step = symbol_grid.spacing / 4.0

    low_window, band_window = slice_windows(symbol_grid, symbol.n)
    # x-independent slices are the same at every probe
    evaluated = x_probes if symbol.x_dependent else x_probes[:1]

    def sup_over_probes(j: Optional[int], window: np.ndarray, damping: float):
        level = 0 if j is None else j
        pairs = [slice_norms(symbol, x, level, symbol_grid, window, s, x_step) for x in evaluated]
        order0 = max(pair[0] for pair in pairs)
        order1 = damping * max(pair[1] for pair in pairs)
        total = max(pair[0] + damping * pair[1] for pair in pairs)
        return order0, order1, total

    low_order0, low_order1, low = sup_over_probes(None, low_window, 1.0)
    bands: List[BandContribution] = []
    for j in range(0, j_max + 1):
        order0, order1, total = sup_over_probes(j, band_window, 2.0 ** (-j * delta))
        bands.append(BandContribution(j=j, order0=order0, order1=order1, total=total))

    band_sup = max(band.total for band in bands)
    logger.debug(f"{symbol.name}: low {low:.6g}, band sup {band_sup:.6g} over {len(evaluated)} probes")
    return SymbolNormReport(
        symbol=symbol.name,
        s=s,
        delta=delta,
        low_order0=low_order0,
        low_order1=low_order1,
        low=low,
        bands=bands,
        total=low + band_sup,
        probe_count=len(x_probes),
        probes_subsampled=probes_subsampled,
        x_probes=x_probes.tolist(),
        slice_grid={"side_length": symbol_grid.side_length, "points_per_axis": float(symbol_grid.points_per_axis)},
    )


def class_band_exponent(rho: float, delta: float, order: float, s: float, alpha_order: int = 0) -> float:
    """Predicted log2 growth per level of band contributions for a symbol in S^order_{rho, delta}"""
    return delta * alpha_order + (1.0 - rho) * s + order


@lru_cache(maxsize=64)
def _mollifier_multiplier(grid: Grid, scale: float) -> np.ndarray:
    """Transform of the unit-mass bump profile(|x| / t) on the periodic box"""
    profile = make_profile(0.5, 1.0)
    kernel = profile(grid.periodic_distance() / scale)
    kernel = kernel / (np.sum(kernel) * grid.spacing**grid.d)
    multiplier = forward_transform(space_function(grid, kernel)).values.copy()
    multiplier.setflags(write=False)
    return multiplier


def effective_scales(grid: Grid, scales: Iterable[float]) -> List[float]:
    """Distinct mollifier scales the grid resolves.

    Scales at or below the spacing give the same one-point kernel and collapse
    to t = spacing; scales above half the box are clipped to L/2.
    """
    return sorted({min(max(t, grid.spacing), grid.side_length / 2.0) for t in scales})


def local_scales(scale_count: int) -> List[float]:
    return [2.0 ** (-m) for m in range(0, scale_count + 1)]


def global_scales(scale_count: int) -> List[float]:
    return [2.0**m for m in range(-scale_count, scale_count + 1)]


def maximal_field(f: SampledFunction, scales: Iterable[float]) -> np.ndarray:
    """Pointwise max over t of |phi_t * f| with the unit-mass bump mollifier"""
    if f.domain is not Domain.SPACE:
        raise DomainError("maximal_field expects a space-domain function")
    spectrum = forward_transform(f)
    field = np.zeros(f.values.shape)

    for scale in effective_scales(f.grid, scales):
        multiplier = _mollifier_multiplier(f.grid, scale)
        smoothed = inverse_transform(spectrum.with_values(spectrum.values * multiplier))
        field = np.maximum(field, np.abs(smoothed.values))
    return field


def _check_hardy(p: float, scale_count: int) -> None:
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if scale_count < 2:
        raise DomainError("scale_count must be at least 2")


def hp_quasinorm(f: SampledFunction, p: float, scale_count: int = 8) -> float:
    """L^p quasi-norm of the maximal field over t = 2^-m, m = 0..scale_count"""
    _check_hardy(p, scale_count)
    field = maximal_field(f, local_scales(scale_count))
    return lp_quasinorm(f.with_values(field), p)


def Hp_quasinorm(f: SampledFunction, p: float, scale_count: int = 8) -> float:
    """L^p quasi-norm of the maximal field over t = 2^m, |m| <= scale_count, clipped to the box"""
    _check_hardy(p, scale_count)
    field = maximal_field(f, global_scales(scale_count))
    return lp_quasinorm(f.with_values(field), p)
