"""
Polynomially decaying weight 2^(kd) (1 + |2^k x|)^(-N)
"""
from dataclasses import dataclass

import numpy as np

from .base import DomainModel
from .grid import Grid


@dataclass(frozen=True, repr=False)
class Weight(DomainModel):
    decay: float
    scale: int

    _repr_fields = ("decay", "scale")

    def sample(self, grid: Grid) -> np.ndarray:
        """Weight at every grid point, periodic minimal-image distance"""
        factor = 2.0**self.scale
        distance = grid.periodic_distance()
        return factor**grid.d * (1.0 + factor * distance) ** (-self.decay)

    def mass(self, grid: Grid) -> float:
        return float(np.sum(self.sample(grid)) * grid.spacing**grid.d)
