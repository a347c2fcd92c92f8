"""
Error categories shared by every service and the command line
"""
from typing import Any, Dict, Optional


class HormanderError(Exception):
    """Base class for all toolkit errors"""

    kind = "error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable payload for reports and the CLI"""
        return {"kind": self.kind, "message": self.message, **self.details}


class ConfigurationError(HormanderError):
    """Invalid configuration value; names the offending field"""

    kind = "configuration"

    def __init__(self, message: str, field: Optional[str] = None, **details: Any):
        super().__init__(message, field=field, **details)
        self.field = field


class DomainError(HormanderError):
    """Wrong domain tag, mismatched grids or a parameter out of range"""

    kind = "domain"


class ResolutionError(HormanderError):
    """Grid too coarse for the requested construction"""

    kind = "resolution"


class BandLimitError(HormanderError):
    """Empty band or a failed band-limit check"""

    kind = "band_limit"


class ConstructionError(HormanderError):
    """A support certificate of the factor decomposition failed"""

    kind = "construction"

    def __init__(self, message: str, term: Optional[str] = None, **details: Any):
        super().__init__(message, term=term, **details)
        self.term = term


class ToleranceError(HormanderError):
    """A numerical check exceeded its threshold"""

    kind = "tolerance"

    def __init__(self, message: str, measured: float, threshold: float, **details: Any):
        super().__init__(message, measured=measured, threshold=threshold, **details)
        self.measured = measured
        self.threshold = threshold
