"""
Grid construction and discrete Fourier transforms.

Transforms use the kernel e^{-2 pi i <x, xi>} and are Riemann sums scaled by
spacing^(d*arity), so forward_transform approximates the integral Fourier
transform and inverse_transform is its exact inverse on the lattice.
"""
from typing import Optional

import humanize
import numpy as np
from scipy import fft as sp_fft

from hormander.core.config import Settings, get_settings
from hormander.core.exceptions import ConfigurationError, DomainError
from hormander.core.logging import get_logger
from hormander.models import Domain, Grid, SampledFunction

logger = get_logger("grid")

SUPPORTED_D = (1, 2)
SUPPORTED_N = (1, 2, 3)
COMPLEX_BYTES = 16


def make_grid(
    d: int,
    n: int,
    side_length: float,
    points_per_axis: int,
    settings: Optional[Settings] = None,
) -> Grid:
    """Validate parameters against the memory budget and build a Grid"""
    settings = settings or get_settings()

    if d not in SUPPORTED_D:
        raise ConfigurationError(f"unsupported dimension d={d}", field="d")
    if n not in SUPPORTED_N:
        raise ConfigurationError(f"unsupported linearity n={n}", field="n")
    if not isinstance(points_per_axis, (int, np.integer)) or points_per_axis <= 0:
        raise ConfigurationError("points_per_axis must be a positive integer", field="points_per_axis")
    if points_per_axis % 2:
        raise ConfigurationError("points_per_axis must be even", field="points_per_axis")
    if not side_length > 0:
        raise ConfigurationError("side_length must be positive", field="side_length")

    required = COMPLEX_BYTES * int(points_per_axis) ** (n * d)
    if required > settings.memory_budget_bytes:
        raise ConfigurationError(
            f"N^(nd) samples need {humanize.naturalsize(required, binary=True)}, "
            f"budget is {humanize.naturalsize(settings.memory_budget_bytes, binary=True)}",
            field="points_per_axis",
        )

    grid = Grid(d=d, n=n, side_length=float(side_length), points_per_axis=int(points_per_axis))
    logger.debug(
        f"Grid d={d} n={n} L={side_length} N={points_per_axis}: "
        f"spacing {grid.spacing}, max frequency {grid.max_frequency}"
    )
    return grid


def space_function(grid: Grid, values, arity: int = 1) -> SampledFunction:
    return SampledFunction(grid, Domain.SPACE, arity, values)


def frequency_function(grid: Grid, values, arity: int = 1) -> SampledFunction:
    return SampledFunction(grid, Domain.FREQUENCY, arity, values)


def _workers(workers: Optional[int]) -> int:
    return workers if workers is not None else get_settings().fft_workers


def forward_transform(f: SampledFunction, workers: Optional[int] = None) -> SampledFunction:
    if f.domain is not Domain.SPACE:
        raise DomainError("forward_transform expects a space-domain function")
    axes = tuple(range(f.values.ndim))
    centered = sp_fft.ifftshift(f.values, axes=axes)
    spectrum = sp_fft.fftshift(sp_fft.fftn(centered, axes=axes, workers=_workers(workers)), axes=axes)
    spectrum *= f.grid.spacing ** len(axes)
    return SampledFunction(f.grid, Domain.FREQUENCY, f.arity, spectrum)


def inverse_transform(F: SampledFunction, workers: Optional[int] = None) -> SampledFunction:
    if F.domain is not Domain.FREQUENCY:
        raise DomainError("inverse_transform expects a frequency-domain function")
    axes = tuple(range(F.values.ndim))
    centered = sp_fft.ifftshift(F.values, axes=axes)
    samples = sp_fft.fftshift(sp_fft.ifftn(centered, axes=axes, workers=_workers(workers)), axes=axes)
    samples /= F.grid.spacing ** len(axes)
    return SampledFunction(F.grid, Domain.SPACE, F.arity, samples)


def reflect(F: SampledFunction) -> SampledFunction:
    """F(-xi) (or f(-x)) with periodic index reflection"""
    axes = tuple(range(F.values.ndim))
    mirrored = np.roll(np.flip(F.values, axis=axes), shift=(1,) * len(axes), axis=axes)
    return F.with_values(mirrored)


def apply_multiplier(f: SampledFunction, multiplier: np.ndarray) -> SampledFunction:
    """Frequency-side multiplication of a space-domain function"""
    spectrum = forward_transform(f)
    return inverse_transform(spectrum.with_values(spectrum.values * multiplier))


def periodic_convolution(f: SampledFunction, kernel: np.ndarray) -> SampledFunction:
    """Quadrature of the periodic convolution (f * k)(x) = sum_y f(x - y) k(y) spacing^d"""
    kernel_function = SampledFunction(f.grid, Domain.SPACE, f.arity, kernel)
    multiplier = forward_transform(kernel_function).values
    return apply_multiplier(f, multiplier)
