"""
Base class with common functionality for immutable domain objects
"""
from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict

import numpy as np


class DomainModel:
    """Mixin for frozen dataclasses: dictionary export and a short repr"""

    _repr_fields: tuple = ()

    def to_dict(self) -> Dict[str, Any]:
        """Convert model to dictionary; arrays become shape descriptions"""
        return {f.name: _export(getattr(self, f.name)) for f in fields(self)}

    def __repr__(self):
        shown = self._repr_fields or tuple(f.name for f in fields(self))[:4]
        body = ", ".join(f"{name}={getattr(self, name)!r}" for name in shown)
        return f"<{self.__class__.__name__}({body})>"


def _export(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return {"shape": list(value.shape), "dtype": str(value.dtype)}
    if isinstance(value, DomainModel):
        return value.to_dict()
    if is_dataclass(value):
        return {f.name: _export(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_export(item) for item in value]
    if callable(value):
        return getattr(value, "__name__", type(value).__name__)
    return value
