"""Persistence of derivation traces."""

import json
from pathlib import Path

from src.config import Settings
from src.constants import SCHEMA_VERSION, LogAction
from src.exceptions import TraceFormatError
from src.exchange_derivation import DerivationTrace, TraceCheck, check_trace
from src.logging_config import MetaplecticLogger
from src.models import with_schema


class TraceService:
    """Saves, loads and re-checks derivation traces as JSON files.

    Attributes:
        settings: Application settings
        logger: Logger instance
    """

    def __init__(self, settings: Settings, logger: MetaplecticLogger) -> None:
        self.settings = settings
        self.logger = logger

    def save(self, trace: DerivationTrace, path: Path) -> None:
        """Write a trace with the schema marker."""
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(with_schema(trace.to_json()), f, indent=2, ensure_ascii=False)
        self.logger.info(
            "Trace saved",
            action=LogAction.SUCCESS,
            path=str(path),
            steps=len(trace.steps),
        )

    def load(self, path: Path) -> DerivationTrace:
        """Read a trace written by ``save``.

        Raises:
            TraceFormatError: If the file is missing, is not JSON, carries
                another schema version or does not describe a trace
        """
        self.logger.debug("Loading trace", action=LogAction.LOADING, path=str(path))
        try:
            with open(path, "r", encoding="utf-8") as f:
                payload = json.load(f)
        except OSError as e:
            raise TraceFormatError(
                "Trace file could not be read", file_path=str(path), original_error=e
            ) from e
        except json.JSONDecodeError as e:
            raise TraceFormatError(
                "Trace file is not valid JSON", file_path=str(path), original_error=e
            ) from e

        if not isinstance(payload, dict):
            raise TraceFormatError("Trace must be a JSON object", file_path=str(path))
        if payload.get("schema") != SCHEMA_VERSION:
            raise TraceFormatError(
                "Unsupported trace schema",
                file_path=str(path),
                details={"schema": payload.get("schema")},
            )
        return DerivationTrace.from_json(payload)

    def check_file(self, path: Path) -> tuple[DerivationTrace, TraceCheck]:
        """Load a trace and re-verify it.

        Args:
            path: Trace file written by ``save``

        Returns:
            The loaded trace and the outcome of re-checking it

        Raises:
            TraceFormatError: If the file cannot be loaded as a trace
        """
        trace = self.load(path)
        result = check_trace(trace)
        if result.ok:
            self.logger.info("Trace verified", action=LogAction.CHECK, path=str(path))
        else:
            self.logger.warning(
                "Trace rejected",
                action=LogAction.CHECK,
                path=str(path),
                diagnostics=len(result.diagnostics),
            )
        return trace, result
