"""
Periodic box [-L/2, L/2)^d and complex samples living on it
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np

from .base import DomainModel


class Domain(str, Enum):
    SPACE = "space"
    FREQUENCY = "frequency"


@dataclass(frozen=True, repr=False)
class Grid(DomainModel):
    """Uniform N-point grid per axis on a box of side length L.

    The x-space of a scalar function has d axes; a function of the
    frequency vector (xi_1, ..., xi_arity) has d*arity axes ordered block
    by block. Frequencies are the multiples of 1/L from -N/2L to N/2L - 1/L.
    """

    d: int
    n: int
    side_length: float
    points_per_axis: int

    _repr_fields = ("d", "n", "side_length", "points_per_axis")

    @property
    def spacing(self) -> float:
        return self.side_length / self.points_per_axis

    @property
    def frequency_spacing(self) -> float:
        return 1.0 / self.side_length

    @property
    def max_frequency(self) -> float:
        return self.points_per_axis / (2.0 * self.side_length)

    def shape(self, arity: int = 1) -> Tuple[int, ...]:
        return (self.points_per_axis,) * (self.d * arity)

    def sample_count(self, arity: int = 1) -> int:
        return self.points_per_axis ** (self.d * arity)

    def axis(self) -> np.ndarray:
        """Space coordinates along one axis"""
        return _space_axis(self.points_per_axis, self.side_length)

    def frequency_axis(self) -> np.ndarray:
        """Frequency lattice along one axis, centered order"""
        return _frequency_axis(self.points_per_axis, self.side_length)

    def space_mesh(self, arity: int = 1) -> np.ndarray:
        """Coordinates with shape grid.shape(arity) + (arity, d)"""
        return _mesh(self.points_per_axis, self.side_length, self.d, arity, False)

    def frequency_mesh(self, arity: int = 1) -> np.ndarray:
        """Lattice points with shape grid.shape(arity) + (arity, d)"""
        return _mesh(self.points_per_axis, self.side_length, self.d, arity, True)

    def space_points(self) -> np.ndarray:
        """All x points as an (N^d, d) array in row-major order"""
        return self.space_mesh(1).reshape(-1, self.d)

    def frequency_points(self, arity: int = 1) -> np.ndarray:
        """All lattice points as an (N^(d*arity), arity, d) array"""
        return self.frequency_mesh(arity).reshape(-1, arity, self.d)

    def frequency_norms(self, arity: int = 1) -> np.ndarray:
        """Euclidean norm |xi| of every lattice point, shape grid.shape(arity)"""
        mesh = self.frequency_mesh(arity)
        return np.sqrt(np.sum(mesh**2, axis=(-2, -1)))

    def block_norms(self, arity: int) -> np.ndarray:
        """|xi_i| per block, shape grid.shape(arity) + (arity,)"""
        mesh = self.frequency_mesh(arity)
        return np.sqrt(np.sum(mesh**2, axis=-1))

    def periodic_distance(self) -> np.ndarray:
        """Minimal-image distance of each x point to the origin, shape grid.shape(1)"""
        length = self.side_length
        mesh = self.space_mesh(1)[..., 0, :]
        wrapped = (mesh + length / 2.0) % length - length / 2.0
        return np.sqrt(np.sum(wrapped**2, axis=-1))

    def compatible(self, other: "Grid") -> bool:
        return (
            self.d == other.d
            and self.points_per_axis == other.points_per_axis
            and self.side_length == other.side_length
        )


@lru_cache(maxsize=32)
def _space_axis(points: int, length: float) -> np.ndarray:
    axis = -length / 2.0 + np.arange(points) * (length / points)
    axis.setflags(write=False)
    return axis


@lru_cache(maxsize=32)
def _frequency_axis(points: int, length: float) -> np.ndarray:
    axis = (np.arange(points) - points // 2) / length
    axis.setflags(write=False)
    return axis


@lru_cache(maxsize=16)
def _mesh(points: int, length: float, d: int, arity: int, frequency: bool) -> np.ndarray:
    axis = _frequency_axis(points, length) if frequency else _space_axis(points, length)
    count = d * arity
    grids = np.meshgrid(*([axis] * count), indexing="ij")
    stacked = np.stack(grids, axis=-1)
    mesh = stacked.reshape(stacked.shape[:-1] + (arity, d))
    mesh.setflags(write=False)
    return mesh


@dataclass(frozen=True, repr=False, eq=False)
class SampledFunction(DomainModel):
    """Complex samples of a function of `arity` blocks, tagged by domain"""

    grid: Grid
    domain: Domain
    arity: int
    values: np.ndarray

    _repr_fields = ("grid", "domain", "arity")

    def __post_init__(self):
        expected = self.grid.shape(self.arity)
        values = np.array(self.values, dtype=np.complex128)
        if values.size != self.grid.sample_count(self.arity):
            raise ValueError(
                f"expected {self.grid.sample_count(self.arity)} samples, got {values.size}"
            )
        values = values.reshape(expected)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domain", Domain(self.domain))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.grid, self.domain, self.arity, values)

    def scaled(self, factor: complex) -> "SampledFunction":
        return self.with_values(self.values * factor)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        if other.domain != self.domain or other.arity != self.arity:
            return NotImplemented
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        if other.domain != self.domain or other.arity != self.arity:
            return NotImplemented
        return self.with_values(self.values - other.values)
