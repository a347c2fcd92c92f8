"""
Symbol zoo and the name -> factory registry used by experiment configs.

Evaluators follow the Symbol convention: x has shape (..., d), xi has shape
(..., n, d) and leading shapes broadcast.
"""
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from hormander.core.exceptions import ConfigurationError, DomainError
from hormander.core.logging import get_logger
from hormander.models import RadialProfile, Symbol

from .bump_service import default_family, make_profile

logger = get_logger("symbols")

TWO_PI = 2.0 * np.pi

# Dyadic sums of the example symbols stop at this level unless configured
DEFAULT_MAX_LEVEL = 12

# Largest modulus accepted by the registration spot check
BOUNDEDNESS_LIMIT = 1e8


def _leading_shape(x: np.ndarray, xi: np.ndarray):
    return np.broadcast_shapes(x.shape[:-1], xi.shape[:-2])


def _xi_norm(xi: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(xi**2, axis=(-2, -1)))


def _vector(value, size: int, name: str) -> np.ndarray:
    array = np.asarray(value, dtype=float).reshape(-1)
    if array.size == 1:
        array = np.full(size, float(array[0]))
    if array.size != size:
        raise DomainError(f"{name} needs {size} components, got {array.size}")
    return array


def _anchor(value, d: int, n: int) -> np.ndarray:
    if value is None:
        anchor = np.zeros((n, d))
        anchor[0, 0] = 1.0
        return anchor
    return _vector(value, n * d, "anchor").reshape(n, d)


def constant_symbol(c: complex = 1.0, d: int = 1, n: int = 1) -> Symbol:
    value = complex(c)

    def evaluate(x, xi):
        return np.full(_leading_shape(x, xi), value, dtype=np.complex128)

    return Symbol(
        name="constant", d=d, n=n, evaluator=evaluate,
        x_dependent=False, parameters={"c": value},
    )


def translation_symbol(a=0.0, block: int = 0, d: int = 1, n: int = 1) -> Symbol:
    """m = exp(-2 pi i <a, xi_block>); T_m shifts input `block` by a"""
    if not 0 <= block < n:
        raise DomainError(f"block index {block} outside 0..{n - 1}")
    shift = _vector(a, d, "a")

    def evaluate(x, xi):
        return np.exp(-1j * TWO_PI * (xi[..., block, :] @ shift))

    return Symbol(
        name="translation", d=d, n=n, evaluator=evaluate,
        x_dependent=False, parameters={"a": shift.tolist(), "block": block},
    )


def modulation_symbol(c=0.0, d: int = 1, n: int = 1) -> Symbol:
    """m = exp(2 pi i <c, x>)"""
    frequency = _vector(c, d, "c")

    def evaluate(x, xi):
        values = np.exp(1j * TWO_PI * (x @ frequency))
        return np.broadcast_to(values, _leading_shape(x, xi))

    def gradient(x, xi):
        values = 1j * TWO_PI * frequency * evaluate(x, xi)[..., None]
        return values

    return Symbol(
        name="modulation", d=d, n=n, evaluator=evaluate, gradient=gradient,
        parameters={"c": frequency.tolist()},
    )


def example1_symbol(
    phase_scale: float = 1.0,
    d: int = 1,
    n: int = 1,
    cutoff: Union[RadialProfile, Sequence[float], None] = None,
    phase: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Symbol:
    """Compactly supported cutoff times exp(i |x|^(3/2) phase(xi)).

    cutoff is a radial profile in |(x, xi)|, or its (plateau, support) pair;
    plateau 1/2 and support 1 by default. phase maps xi of shape (..., n, d) to
    a real array of shape (...); phase_scale * (1 + |xi|^2) by default. Only
    first x-derivatives exist.
    """
    if cutoff is None:
        cutoff = make_profile(0.5, 1.0)
    elif not isinstance(cutoff, RadialProfile):
        cutoff = make_profile(*cutoff)
    if phase is None:
        def quadratic(xi):
            return phase_scale * (1.0 + np.sum(xi**2, axis=(-2, -1)))

        phase = quadratic

    def parts(x, xi):
        x_norm = np.sqrt(np.sum(x**2, axis=-1))
        radius = np.sqrt(x_norm**2 + np.sum(xi**2, axis=(-2, -1)))
        return x_norm, radius, np.asarray(phase(xi), dtype=float)

    def evaluate(x, xi):
        x_norm, radius, phase_values = parts(x, xi)
        return cutoff(radius) * np.exp(1j * x_norm**1.5 * phase_values)

    def gradient(x, xi):
        x_norm, radius, phase_values = parts(x, xi)
        shape = _leading_shape(x, xi)
        x_full = np.broadcast_to(x, shape + (d,))
        radius = np.broadcast_to(radius, shape)[..., None]
        x_norm = np.broadcast_to(x_norm, shape)[..., None]
        phase_values = np.broadcast_to(phase_values, shape)[..., None]

        safe_radius = np.where(radius > 0.0, radius, 1.0)
        safe_norm = np.where(x_norm > 0.0, x_norm, 1.0)
        cutoff_part = np.where(radius > 0.0, cutoff.derivative(radius) * x_full / safe_radius, 0.0)
        phase_part = np.where(x_norm > 0.0, 1.5 * phase_values * x_full / np.sqrt(safe_norm), 0.0)
        carrier = np.exp(1j * x_norm**1.5 * phase_values)
        return (cutoff_part + 1j * cutoff(radius) * phase_part) * carrier

    return Symbol(
        name="example1", d=d, n=n, evaluator=evaluate, gradient=gradient,
        parameters={
            "phase_scale": phase_scale,
            "cutoff": [cutoff.plateau, cutoff.support],
            "phase": getattr(phase, "__name__", "custom"),
        },
        notes=("|x|^(3/2) is C^1 but not C^2 at x = 0",),
    )


def _band(radius) -> np.ndarray:
    """Annular profile supported in 1/2 <= r <= 2, equal to 1 at r = 1"""
    return default_family().psi(radius)


def _x_factor(x: np.ndarray, k: int, delta: Optional[float]) -> np.ndarray:
    if delta is None:
        return np.ones(x.shape[:-1])
    return 0.5 * (1.0 + np.sin(2.0 ** (k * delta) * x[..., 0]))


def _x_factor_gradient(x: np.ndarray, k: int, delta: Optional[float]) -> np.ndarray:
    gradient = np.zeros(x.shape)
    if delta is not None:
        rate = 2.0 ** (k * delta)
        gradient[..., 0] = 0.5 * rate * np.cos(rate * x[..., 0])
    return gradient


def _check_anchor(anchor: np.ndarray, low: float = 0.5, high: float = 2.0) -> None:
    size = float(np.sqrt(np.sum(anchor**2)))
    if not low < size < high:
        raise DomainError(f"anchor norm {size} outside ({low}, {high})")


def _truncation_note(max_level: int) -> str:
    return f"dyadic sum truncated at k = {max_level}"


def example2_symbol(
    gamma: float = 1.0,
    anchor=None,
    delta: Optional[float] = None,
    max_level: int = DEFAULT_MAX_LEVEL,
    d: int = 1,
    n: int = 1,
) -> Symbol:
    """sum_k band(|2^-k xi|) chi_k(x) |2^-k xi - a|^gamma.

    chi_k(x) = (1 + sin(2^(k delta) x_1)) / 2 when delta is given, else 1.
    """
    if gamma <= 0:
        raise DomainError("example2 needs gamma > 0")
    anchor_vector = _anchor(anchor, d, n)
    _check_anchor(anchor_vector)
    levels = range(1, max_level + 1)

    def distance_term(xi, k):
        scaled = np.ldexp(xi, -k)
        return _band(_xi_norm(scaled)) * _xi_norm(scaled - anchor_vector) ** gamma

    def evaluate(x, xi):
        total = np.zeros(_leading_shape(x, xi))
        for k in levels:
            total = total + distance_term(xi, k) * _x_factor(x, k, delta)
        return total

    def gradient(x, xi):
        total = np.zeros(_leading_shape(x, xi) + (d,))
        for k in levels:
            total = total + distance_term(xi, k)[..., None] * _x_factor_gradient(x, k, delta)
        return total

    return Symbol(
        name="example2", d=d, n=n, evaluator=evaluate,
        gradient=gradient if delta is not None else None,
        x_dependent=delta is not None,
        parameters={"gamma": gamma, "anchor": anchor_vector.tolist(), "delta": delta, "max_level": max_level},
        notes=(_truncation_note(max_level),),
    )


def example3_symbol(
    gamma: float = 1.5,
    anchor=None,
    delta: float = 0.0,
    max_level: int = DEFAULT_MAX_LEVEL,
    d: int = 1,
    n: int = 1,
) -> Symbol:
    """sum_k band(|2^-k xi|) |2^-k xi - a_k(x)|^gamma with a_k(x) = a (1 + sin(2^(k delta) x_1) / 4)"""
    if gamma <= 1:
        raise DomainError("example3 needs gamma > 1")
    anchor_vector = _anchor(anchor, d, n)
    # the moving anchor stays inside the open annulus
    _check_anchor(anchor_vector, low=0.5 / 0.75, high=2.0 / 1.25)
    levels = range(1, max_level + 1)

    def pieces(x, xi, k):
        rate = 2.0 ** (k * delta)
        stretch = 1.0 + 0.25 * np.sin(rate * x[..., 0])
        scaled = np.ldexp(xi, -k)
        offset = scaled - anchor_vector * stretch[..., None, None]
        return rate, _band(_xi_norm(scaled)), offset

    def evaluate(x, xi):
        total = np.zeros(_leading_shape(x, xi))
        for k in levels:
            _, band, offset = pieces(x, xi, k)
            total = total + band * _xi_norm(offset) ** gamma
        return total

    def gradient(x, xi):
        shape = _leading_shape(x, xi)
        total = np.zeros(shape + (d,))
        for k in levels:
            rate, band, offset = pieces(x, xi, k)
            size = _xi_norm(offset)
            power = np.where(size > 0.0, np.where(size > 0.0, size, 1.0) ** (gamma - 2.0), 0.0)
            inner = np.sum(offset * anchor_vector, axis=(-2, -1))
            speed = 0.25 * rate * np.cos(rate * x[..., 0])
            total[..., 0] += band * (-gamma * power * inner * speed)
        return total

    return Symbol(
        name="example3", d=d, n=n, evaluator=evaluate, gradient=gradient,
        parameters={"gamma": gamma, "anchor": anchor_vector.tolist(), "delta": delta, "max_level": max_level},
        notes=(_truncation_note(max_level),),
    )


def example4_symbol(
    a: float = 2.0,
    b: float = 3.0,
    delta: Optional[float] = None,
    max_level: int = DEFAULT_MAX_LEVEL,
    d: int = 1,
    n: int = 1,
) -> Symbol:
    """sum_k band(|2^-k xi|) chi_k(x) |xi|^-b exp(i |xi|^a); b = 0 gives a pure chirp"""
    if a <= 0:
        raise DomainError("example4 needs a > 0")
    if b < 0:
        raise DomainError("example4 needs b >= 0")
    levels = range(1, max_level + 1)

    def carrier(xi):
        radius = _xi_norm(xi)
        safe = np.where(radius > 0.0, radius, 1.0)
        return radius, np.where(radius > 0.0, safe ** (-b) * np.exp(1j * safe**a), 0.0)

    def evaluate(x, xi):
        radius, wave = carrier(xi)
        total = np.zeros(_leading_shape(x, xi), dtype=np.complex128)
        for k in levels:
            total = total + _band(np.ldexp(radius, -k)) * _x_factor(x, k, delta)
        return total * wave

    def gradient(x, xi):
        radius, wave = carrier(xi)
        total = np.zeros(_leading_shape(x, xi) + (d,), dtype=np.complex128)
        for k in levels:
            total = total + _band(np.ldexp(radius, -k))[..., None] * _x_factor_gradient(x, k, delta)
        return total * wave[..., None]

    return Symbol(
        name="example4", d=d, n=n, evaluator=evaluate,
        gradient=gradient if delta is not None else None,
        x_dependent=delta is not None,
        parameters={"a": a, "b": b, "delta": delta, "max_level": max_level},
        notes=(_truncation_note(max_level),),
    )


def coifman_meyer_symbol(epsilon: float = 0.5, d: int = 1, n: int = 2) -> Symbol:
    """Degree-0 homogeneous model, smoothly cut off inside |xi| <= epsilon.

    n >= 2: (2 / (n - 1)) sum_{i < i'} <xi_i, xi_i'> / |xi|^2, bounded by 1.
    n = 1: xi_{1,1} / |xi|.
    """
    if epsilon <= 0:
        raise DomainError("coifman_meyer needs epsilon > 0")
    inner = make_profile(0.5, 1.0)

    def evaluate(x, xi):
        radius_sq = np.sum(xi**2, axis=(-2, -1))
        safe = np.where(radius_sq > 0.0, radius_sq, 1.0)
        if n == 1:
            model = xi[..., 0, 0] / np.sqrt(safe)
        else:
            blocks = xi.sum(axis=-2)
            pair_sum = 0.5 * (np.sum(blocks**2, axis=-1) - radius_sq)
            model = (2.0 / (n - 1)) * pair_sum / safe
        cut = 1.0 - inner(np.sqrt(radius_sq) / epsilon)
        values = np.where(radius_sq > 0.0, model * cut, 0.0)
        return np.broadcast_to(values, _leading_shape(x, xi))

    return Symbol(
        name="coifman_meyer", d=d, n=n, evaluator=evaluate,
        x_dependent=False, parameters={"epsilon": epsilon},
    )


SymbolFactory = Callable[..., Symbol]


class SymbolRegistry:
    """Named symbol factories; create() spot-checks boundedness and x-independence"""

    def __init__(self):
        self._factories: Dict[str, SymbolFactory] = {}
        self.logger = get_logger("symbols")

    def register(self, name: str, factory: SymbolFactory) -> None:
        if name in self._factories:
            raise ConfigurationError(f"symbol {name} already registered", field="symbol.name")
        self._factories[name] = factory

    def __contains__(self, name: str) -> bool:
        return name in self._factories

    def names(self) -> List[str]:
        return sorted(self._factories)

    def create(self, name: str, d: int, n: int, params: Optional[Dict[str, Any]] = None) -> Symbol:
        if name not in self._factories:
            raise ConfigurationError(f"unknown symbol: {name}", field="symbol.name")
        try:
            symbol = self._factories[name](d=d, n=n, **(params or {}))
        except TypeError as exc:
            raise ConfigurationError(f"bad parameters for {name}: {exc}", field="symbol.params") from exc
        except DomainError as exc:
            raise ConfigurationError(exc.message, field="symbol.params") from exc
        self.check(symbol)
        return symbol

    def check(self, symbol: Symbol, samples: int = 256, seed: int = 0) -> None:
        rng = np.random.default_rng(seed)
        directions = rng.standard_normal((samples, symbol.n, symbol.d))
        directions /= np.sqrt(np.sum(directions**2, axis=(-2, -1)))[:, None, None]
        radii = 2.0 ** rng.uniform(-4.0, DEFAULT_MAX_LEVEL, samples)
        xi = directions * radii[:, None, None]
        x = rng.uniform(-4.0, 4.0, (samples, symbol.d))

        values = symbol(x, xi)
        if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > BOUNDEDNESS_LIMIT:
            raise ConfigurationError(f"symbol {symbol.name} is unbounded on the probe set", field="symbol")
        if not symbol.x_dependent:
            shifted = symbol(x + rng.uniform(1.0, 2.0, symbol.d), xi)
            if not np.array_equal(values, shifted):
                raise ConfigurationError(
                    f"symbol {symbol.name} is flagged x-independent but varies in x", field="symbol"
                )
        self.logger.debug(f"registered {symbol!r}")


_DEFAULT_FACTORIES: Iterable = (
    ("constant", constant_symbol),
    ("translation", translation_symbol),
    ("modulation", modulation_symbol),
    ("example1", example1_symbol),
    ("example2", example2_symbol),
    ("example3", example3_symbol),
    ("example4", example4_symbol),
    ("coifman_meyer", coifman_meyer_symbol),
)


@lru_cache(maxsize=1)
def default_registry() -> SymbolRegistry:
    registry = SymbolRegistry()
    for name, factory in _DEFAULT_FACTORIES:
        registry.register(name, factory)
    return registry
