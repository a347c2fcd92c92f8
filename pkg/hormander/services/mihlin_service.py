"""
Finite-difference sampling of the pointwise derivative bounds
|d_x^alpha d_xi^beta m(x, xi)| <= C (1 + |xi|)^(m + delta|alpha| - rho|beta|).

The result is a heuristic: constants and growth exponents are measured on a
finite probe set, never proven.
"""
import itertools
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hormander.core.exceptions import DomainError
from hormander.core.logging import get_logger
from hormander.models import Grid, ProbeSet, Symbol
from hormander.schemas.reports import MihlinOrderEstimate, MihlinReport

logger = get_logger("mihlin")

MAX_BETA_ORDER = 3
DEFAULT_TOLERANCE = 0.15
MACHINE_EPS = float(np.finfo(float).eps)


def make_probe_set(grid: Grid, shells: Iterable[int], per_shell: int = 16, seed: int = 0) -> ProbeSet:
    """Probe pairs with the same directions, relative radii and x points in every shell"""
    shells = tuple(int(j) for j in shells)
    if not shells or per_shell < 1:
        raise DomainError("probe set is empty")

    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((per_shell, grid.n, grid.d))
    directions /= np.sqrt(np.sum(directions**2, axis=(-2, -1)))[:, None, None]
    relative = rng.uniform(1.0, 2.0, per_shell)
    half = grid.side_length / 2.0
    x_points = rng.uniform(-half, half, (per_shell, grid.d))

    xi = np.concatenate([directions * (relative * 2.0**j)[:, None, None] for j in shells])
    x = np.tile(x_points, (len(shells), 1))
    shell = np.repeat(np.array(shells), per_shell)
    return ProbeSet(x=x, xi=xi, shell=shell, shells=shells, per_shell=per_shell)


def _multi_indices(coordinates: int, order: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(coordinates), order))


def _nested_difference(
    func: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    xi: np.ndarray,
    beta: Sequence[int],
    steps: np.ndarray,
) -> np.ndarray:
    """Iterated central differences in the flattened xi coordinates listed in beta"""
    if not beta:
        return func(x, xi)
    offset = np.zeros_like(xi)
    offset.reshape(len(xi), -1)[:, beta[0]] = steps
    forward = _nested_difference(func, x, xi + offset, beta[1:], steps)
    backward = _nested_difference(func, x, xi - offset, beta[1:], steps)
    return (forward - backward) / (2.0 * steps)


def xi_steps(probes: ProbeSet, beta_order: int) -> np.ndarray:
    """Per-probe xi step for a |beta|-th nested central difference.

    2^(-j-3) on shell j resolves oscillating phases. The step never drops below
    eps^(1/(|beta|+2)) |xi|, where roundoff (eps / h^|beta|) and truncation
    (h^2 / |xi|^2) balance for symbols varying on the scale |xi|.
    """
    resolving = np.ldexp(1.0, -probes.shell - 3)
    steps = np.maximum(resolving, MACHINE_EPS ** (1.0 / (beta_order + 2)) * probes.radii())
    if not np.all(np.isfinite(steps) & (steps > 0.0)):
        raise DomainError("finite-difference step underflow on the probe set")
    return steps


def _derivative_magnitudes(
    symbol: Symbol,
    probes: ProbeSet,
    alpha_order: int,
    beta_order: int,
    x_step: float,
) -> np.ndarray:
    """max over |alpha| = alpha_order, |beta| = beta_order of |d_x^alpha d_xi^beta m| per probe"""
    steps = xi_steps(probes, beta_order)
    if alpha_order == 0:
        components: List[Callable] = [lambda x, xi: symbol(x, xi)]
    else:
        components = [
            (lambda x, xi, l=l: symbol.x_gradient(x, xi, step=x_step)[..., l])
            for l in range(symbol.d)
        ]

    magnitude = np.zeros(len(probes))
    for func in components:
        for beta in _multi_indices(symbol.n * symbol.d, beta_order):
            values = _nested_difference(func, probes.x, probes.xi, beta, steps)
            magnitude = np.maximum(magnitude, np.abs(values))
    return magnitude


def _fit_exponent(radii: np.ndarray, maxima: np.ndarray) -> Optional[float]:
    positive = maxima > 0.0
    if np.count_nonzero(positive) < 2:
        return None
    slope, _ = np.polyfit(np.log2(1.0 + radii[positive]), np.log2(maxima[positive]), 1)
    return float(slope)


def mihlin_estimate(
    symbol: Symbol,
    rho: float,
    delta: float,
    order: float,
    max_beta_order: int,
    grid: Grid,
    probes: Optional[ProbeSet] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    j_max: int = 6,
) -> MihlinReport:
    """Constants and fitted growth exponents per (|alpha|, |beta|), |alpha| <= 1"""
    if not 0 <= max_beta_order <= MAX_BETA_ORDER:
        raise DomainError(f"max_beta_order must lie in 0..{MAX_BETA_ORDER}")
    if not 0.0 <= rho <= 1.0 or not 0.0 <= delta < 1.0:
        raise DomainError(f"need 0 <= rho <= 1 and 0 <= delta < 1, got {rho}, {delta}")
    if probes is None:
        probes = make_probe_set(grid, range(0, j_max + 1))
    if len(probes) == 0:
        raise DomainError("probe set is empty")

    radii = probes.radii()
    x_step = grid.side_length / (4.0 * grid.points_per_axis)
    shell_radii = np.array([radii[probes.in_shell(j)].mean() for j in probes.shells])

    estimates = []
    for alpha_order in (0, 1):
        for beta_order in range(max_beta_order + 1):
            magnitude = _derivative_magnitudes(symbol, probes, alpha_order, beta_order, x_step)
            allowed = order + delta * alpha_order - rho * beta_order
            normalized = magnitude * (1.0 + radii) ** (-allowed)
            shell_maxima = np.array([magnitude[probes.in_shell(j)].max() for j in probes.shells])
            fitted = _fit_exponent(shell_radii, shell_maxima)

            violated = fitted is not None and fitted > allowed + tolerance
            worst = int(np.argmax(normalized))
            estimates.append(MihlinOrderEstimate(
                alpha_order=alpha_order,
                beta_order=beta_order,
                constant=float(normalized.max()),
                allowed_exponent=allowed,
                fitted_exponent=fitted,
                shell_radii=shell_radii.tolist(),
                shell_maxima=shell_maxima.tolist(),
                verdict="violated" if violated else "consistent",
                violating_probe=(
                    np.concatenate([probes.x[worst], probes.xi[worst].ravel()]).tolist()
                    if violated else None
                ),
            ))

    verdict = "violated" if any(e.verdict == "violated" for e in estimates) else "consistent"
    logger.info(f"{symbol.name}: Mihlin scan over {len(probes)} probes -> {verdict}")
    return MihlinReport(
        symbol=symbol.name,
        rho=rho,
        delta=delta,
        order=order,
        max_beta_order=max_beta_order,
        tolerance=tolerance,
        probe_count=len(probes),
        estimates=estimates,
        verdict=verdict,
    )
