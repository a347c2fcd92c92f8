"""
Exponent-region predicates on points (1/p_1, ..., 1/p_n).

Rational inputs are decided exactly; float inputs within the boundary band of
a strict inequality are reported as BOUNDARY.
"""
import itertools
import math
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from hormander.core.config import get_settings
from hormander.core.exceptions import DomainError
from hormander.core.logging import get_logger
from hormander.models import ExponentPoint, Membership
from hormander.models.region import Number, as_number

logger = get_logger("regions")

MAX_SUBSET_N = 20
HALF = Fraction(1, 2)

PointLike = Union[ExponentPoint, Sequence]


def _point(point: PointLike) -> ExponentPoint:
    return point if isinstance(point, ExponentPoint) else ExponentPoint(tuple(point))


def _band(band: Optional[float]) -> float:
    return get_settings().boundary_band if band is None else band


def _half(exact: bool) -> Number:
    return HALF if exact else 0.5


def _strict(margin: Number, exact: bool, band: float) -> Membership:
    """Membership for the strict inequality margin > 0"""
    if exact:
        return Membership.INSIDE if margin > 0 else Membership.OUTSIDE
    if abs(margin) <= band:
        return Membership.BOUNDARY
    return Membership.INSIDE if margin > 0 else Membership.OUTSIDE


def _is_exact(point: ExponentPoint, *numbers) -> bool:
    return point.exact and all(isinstance(number, Fraction) for number in numbers)


def subsets(n: int):
    if n > MAX_SUBSET_N:
        raise DomainError(f"subset enumeration needs n <= {MAX_SUBSET_N}, got {n}")
    return itertools.chain.from_iterable(itertools.combinations(range(n), size) for size in range(n + 1))


def classify_A(point: PointLike, alpha, band: Optional[float] = None) -> Membership:
    """sum_i max(x_i, 1/2) < alpha"""
    point = _point(point)
    alpha = as_number(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    exact = _is_exact(point, alpha)
    half = _half(exact)
    value = sum((max(x, half) for x in point.coordinates), Fraction(0) if exact else 0.0)
    return _strict(alpha - value, exact, _band(band))


def in_A(point: PointLike, alpha) -> bool:
    return classify_A(point, alpha, band=0.0) is Membership.INSIDE


def classify_B_intersection(point: PointLike, alpha, band: Optional[float] = None) -> Membership:
    """For every subset I of {1..n}: sum_{i in I} (x_i - 1/2) + n/2 < alpha"""
    point = _point(point)
    alpha = as_number(alpha)
    exact = _is_exact(point, alpha)
    half = _half(exact)
    n = point.n
    zero = Fraction(0) if exact else 0.0
    margins = [
        alpha - (sum((point.coordinates[i] - half for i in subset), zero) + n * half)
        for subset in subsets(n)
    ]
    return _strict(min(margins), exact, _band(band))


def in_B_intersection(point: PointLike, alpha) -> bool:
    return classify_B_intersection(point, alpha, band=0.0) is Membership.INSIDE


def theoremA_condition(point: PointLike, s, d) -> bool:
    """1/p - 1/2 < s/d + sum_{i in I} (1/p_i - 1/2) for every subset I, the empty one included"""
    point = _point(point)
    s, d = as_number(s), as_number(d)
    if not (s > 0 and d > 0):
        raise DomainError("s and d must be positive")
    exact = _is_exact(point, s, d)
    half = _half(exact)
    zero = Fraction(0) if exact else 0.0
    ratio = s / d
    for subset in subsets(point.n):
        slack = ratio + sum((point.coordinates[i] - half for i in subset), zero) - (point.inverse_p - half)
        if not slack > 0:
            return False
    return True


def _sum_of_maxima(point: ExponentPoint, exact: bool) -> Number:
    half = _half(exact)
    return sum((max(x, half) for x in point.coordinates), Fraction(0) if exact else 0.0)


def admissible_theorem21(point: PointLike, rho, delta, order, d) -> Tuple[bool, Union[Number, str]]:
    """Whether some s > nd/2 has order <= (rho - 1) s and the point in B_n(s/d).

    Returns (True, witness s) or (False, reason).
    """
    point = _point(point)
    rho, delta, order, d = (as_number(v) for v in (rho, delta, order, d))
    if not 0 <= rho <= 1:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if not 0 <= delta < 1:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    if order > 0:
        raise DomainError(f"order must be nonpositive, got {order}")
    if not d > 0:
        raise DomainError("d must be positive")

    exact = _is_exact(point, rho, order, d)
    n = point.n
    critical = n * d * _half(exact)
    maxima = _sum_of_maxima(point, exact)

    if rho == 1:
        # s is unconstrained above; any s beyond both bounds works
        return True, max(critical, d * maxima) + 1

    s_max = -order / (1 - rho)
    if not s_max > critical:
        return False, f"largest admissible s = {s_max} does not exceed nd/2 = {critical}"
    if not maxima < s_max / d:
        return False, f"sum of max(1/p_i, 1/2) = {maxima} is not below {s_max / d}"
    return True, s_max


def classify_kato(point: PointLike, order, d, band: Optional[float] = None) -> Membership:
    """sum_i max(1/p_i, 1/2) <= -order/d + min(1/p, 1/2)"""
    point = _point(point)
    order, d = as_number(order), as_number(d)
    exact = _is_exact(point, order, d)
    half = _half(exact)
    margin = -order / d + min(point.inverse_p, half) - _sum_of_maxima(point, exact)
    if exact:
        return Membership.INSIDE if margin >= 0 else Membership.OUTSIDE
    if abs(margin) <= _band(band):
        return Membership.BOUNDARY
    return Membership.INSIDE if margin > 0 else Membership.OUTSIDE


def kato_condition(point: PointLike, order, d) -> bool:
    return classify_kato(point, order, d, band=0.0) is not Membership.OUTSIDE


def class_region_alpha(rho, order, n: int, d) -> Optional[Number]:
    """alpha with B_n(alpha) covered for symbols of class S^order_{rho, delta}; None when nothing is"""
    rho, order, d = as_number(rho), as_number(order), as_number(d)
    if rho == 1:
        return math.inf if order <= 0 else None
    s_max = -order / (1 - rho)
    if not s_max > n * d / 2:
        return None
    return s_max / d


def example_region_alpha(example: str, params: Dict, n: int, d) -> Optional[Number]:
    """alpha of the region reached by the symbol norm of the example symbols"""
    d = as_number(d)
    half_n = Fraction(n, 2) if isinstance(d, Fraction) else n / 2
    if example == "example2":
        return as_number(params.get("gamma", 1)) / d + half_n
    if example == "example3":
        return (as_number(params.get("gamma", Fraction(3, 2))) - 1) / d + half_n
    if example == "example4":
        ratio = as_number(params.get("b", 3)) / as_number(params.get("a", 2))
        return ratio / d if ratio > n * d / 2 else None
    raise DomainError(f"no region formula for {example}")


def _subset_matrix(n: int) -> np.ndarray:
    rows = np.zeros((2**n, n), dtype=np.int64)
    for row, subset in enumerate(subsets(n)):
        rows[row, list(subset)] = 1
    return rows


def in_A_batch(points: np.ndarray, alpha: float, band: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(membership, boundary) arrays for float points of shape (P, n)"""
    margin = alpha - np.maximum(points, 0.5).sum(axis=1)
    return margin > 0.0, np.abs(margin) <= _band(band)


def in_B_batch(points: np.ndarray, alpha: float, band: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    n = points.shape[1]
    values = (points - 0.5) @ _subset_matrix(n).T + n / 2.0
    margin = alpha - values.max(axis=1)
    return margin > 0.0, np.abs(margin) <= _band(band)


def region_sweep(n: int, alpha, step, upper) -> pd.DataFrame:
    """Exhaustive sweep of the lattice step * {1, 2, ...} up to upper in every coordinate.

    Decided exactly with integer numerators over a common denominator.
    """
    alpha, step, upper = Fraction(alpha), Fraction(step), Fraction(upper)
    if step <= 0 or upper <= 0:
        raise DomainError("step and upper must be positive")
    denominator = math.lcm(step.denominator, alpha.denominator, 2)
    count = int(upper // step)
    unit = int(step * denominator)
    half = denominator // 2
    alpha_numerator = int(alpha * denominator)

    axis = unit * np.arange(1, count + 1, dtype=np.int64)
    numerators = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)

    in_a = np.maximum(numerators, half).sum(axis=1) < alpha_numerator
    subset_values = (numerators - half) @ _subset_matrix(n).T + n * half
    in_b = subset_values.max(axis=1) < alpha_numerator

    frame = pd.DataFrame(numerators / denominator, columns=[f"x{i + 1}" for i in range(n)])
    frame["in_A"] = in_a
    frame["in_B"] = in_b
    frame["boundary"] = False
    disagreements = int(np.count_nonzero(in_a != in_b))
    logger.info(f"region sweep n={n} alpha={alpha}: {len(frame)} points, {disagreements} disagreements")
    return frame


def random_region_sample(
    n: int,
    alpha: float,
    count: int,
    seed: int = 0,
    upper: float = 4.0,
    band: Optional[float] = None,
) -> pd.DataFrame:
    """Uniform float points in (0, upper]^n with both memberships and the boundary flag"""
    rng = np.random.default_rng(seed)
    points = upper - rng.uniform(0.0, upper, (count, n))
    in_a, near_a = in_A_batch(points, alpha, band)
    in_b, near_b = in_B_batch(points, alpha, band)
    frame = pd.DataFrame(points, columns=[f"x{i + 1}" for i in range(n)])
    frame["in_A"] = in_a
    frame["in_B"] = in_b
    frame["boundary"] = near_a | near_b
    return frame
