"""Metaplectic Theta Toolkit - exact computations for theta representations."""

__version__ = "1.0.0"
__author__ = "Metaplectic Theta Contributors"

from src.config import Settings
from src.exceptions import (
    BudgetExceededError,
    ConfigMismatchError,
    InvalidParameterError,
    MetaplecticError,
    TraceFormatError,
)

__all__ = [
    "Settings",
    "MetaplecticError",
    "InvalidParameterError",
    "BudgetExceededError",
    "ConfigMismatchError",
    "TraceFormatError",
]
