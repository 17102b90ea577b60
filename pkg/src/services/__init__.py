"""Service layer: acceptance runs and trace persistence."""

from src.services.suite_service import ACCEPTANCE_CASES, SuiteReport, SuiteService
from src.services.trace_service import TraceService

__all__ = [
    "ACCEPTANCE_CASES",
    "SuiteReport",
    "SuiteService",
    "TraceService",
]
