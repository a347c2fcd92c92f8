"""
Symbol m(x, xi) of a multilinear operator
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .base import DomainModel

# Evaluators take x with shape (..., d) and xi with shape (..., n, d)
Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, repr=False, eq=False)
class Symbol(DomainModel):
    name: str
    d: int
    n: int
    evaluator: Evaluator
    gradient: Optional[Evaluator] = None
    x_dependent: bool = True
    parameters: Dict[str, Any] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    _repr_fields = ("name", "d", "n", "x_dependent")

    def __call__(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-2])
        values = np.asarray(self.evaluator(x, xi), dtype=np.complex128)
        return np.broadcast_to(values, shape)

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None or not self.x_dependent

    def x_gradient(self, x, xi, step: Optional[float] = None) -> np.ndarray:
        """(d_x1 m, ..., d_xd m) with shape (..., d).

        Analytic when available; central differences with the given step
        otherwise. Raises ValueError when neither is possible.
        """
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-2]) + (self.d,)
        if not self.x_dependent:
            return np.zeros(shape, dtype=np.complex128)
        if self.gradient is not None:
            values = np.asarray(self.gradient(x, xi), dtype=np.complex128)
            return np.broadcast_to(values, shape)
        if step is None:
            raise ValueError(f"symbol {self.name} has no analytic x-gradient")
        columns = []
        for axis in range(self.d):
            offset = np.zeros(self.d)
            offset[axis] = step
            forward = self(x + offset, xi)
            backward = self(x - offset, xi)
            columns.append((forward - backward) / (2.0 * step))
        return np.stack(columns, axis=-1)

    def windowed(self, window: Callable[[np.ndarray], np.ndarray], label: str) -> "Symbol":
        """m(x, xi) * w(xi) for an x-independent window"""
        base = self

        def evaluate(x, xi):
            return base(x, xi) * window(xi)

        gradient = None
        if self.gradient is not None:
            def gradient(x, xi):
                return base.x_gradient(x, xi) * window(xi)[..., None]

        return Symbol(
            name=f"{self.name}*{label}",
            d=self.d,
            n=self.n,
            evaluator=evaluate,
            gradient=gradient,
            x_dependent=self.x_dependent,
            parameters=dict(self.parameters),
            notes=self.notes,
        )


@dataclass(frozen=True, repr=False, eq=False)
class ProbeSet(DomainModel):
    """Probe pairs (x, xi) over dyadic shells 2^j <= |xi| < 2^(j+1).

    Every shell carries the same directions and relative radii, so shell
    maxima differ only through the symbol's growth.
    """

    x: np.ndarray
    xi: np.ndarray
    shell: np.ndarray
    shells: Tuple[int, ...]
    per_shell: int

    _repr_fields = ("shells", "per_shell")

    def __len__(self) -> int:
        return int(self.shell.size)

    def radii(self) -> np.ndarray:
        return np.sqrt(np.sum(self.xi**2, axis=(-2, -1)))

    def in_shell(self, j: int) -> np.ndarray:
        return self.shell == j
