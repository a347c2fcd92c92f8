# Core configuration, logging and errors
from .config import Settings, get_settings
from .exceptions import (
    HormanderError,
    ConfigurationError,
    DomainError,
    ResolutionError,
    BandLimitError,
    ConstructionError,
    ToleranceError,
)
from .logging import setup_logging, get_logger

__all__ = [
    "Settings",
    "get_settings",
    "HormanderError",
    "ConfigurationError",
    "DomainError",
    "ResolutionError",
    "BandLimitError",
    "ConstructionError",
    "ToleranceError",
    "setup_logging",
    "get_logger",
]
