"""
Exponent points (1/p_1, ..., 1/p_n) and region membership
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Tuple, Union

from .base import DomainModel

Number = Union[Fraction, float]


class Membership(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


def as_number(value) -> Number:
    """Rationals stay exact; everything else becomes float"""
    if isinstance(value, bool):
        raise TypeError("boolean is not an exponent")
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True, repr=False)
class ExponentPoint(DomainModel):
    coordinates: Tuple[Number, ...]

    _repr_fields = ("coordinates",)

    def __post_init__(self):
        coordinates = tuple(as_number(value) for value in self.coordinates)
        if not coordinates:
            raise ValueError("exponent point needs at least one coordinate")
        if any(value <= 0 for value in coordinates):
            raise ValueError(f"coordinates must be positive: {coordinates}")
        object.__setattr__(self, "coordinates", coordinates)

    @classmethod
    def from_exponents(cls, exponents: Iterable) -> "ExponentPoint":
        """Build from p_1, ..., p_n"""
        coordinates = []
        for p in exponents:
            value = as_number(p)
            coordinates.append(1 / value if isinstance(value, Fraction) else 1.0 / value)
        return cls(tuple(coordinates))

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def exact(self) -> bool:
        return all(isinstance(value, Fraction) for value in self.coordinates)

    @property
    def inverse_p(self) -> Number:
        """1/p = sum of 1/p_i"""
        return sum(self.coordinates, Fraction(0) if self.exact else 0.0)
