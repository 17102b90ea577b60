"""Exception hierarchy for the metaplectic theta toolkit.

Every error raised by a computational module derives from
``MetaplecticError`` and carries a stable machine code so the CLI can
surface it as ``{"error": {"code": ..., "detail": ...}}``.
"""

from typing import Any, ClassVar, Optional


class MetaplecticError(Exception):
    """Base exception for all toolkit errors.

    Attributes:
        message: Human-readable error message
        details: Optional dictionary with additional error context
        original_error: The original exception if this wraps another exception
    """

    code: ClassVar[str] = "internal"

    def __init__(
        self,
        message: str,
        details: Optional[dict[str, Any]] = None,
        original_error: Optional[Exception] = None,
    ) -> None:
        self.message = message
        self.details = details or {}
        self.original_error = original_error
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return formatted error message with details."""
        base = self.message
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            base = f"{base} ({details_str})"
        if self.original_error:
            base = f"{base} | Caused by: {self.original_error}"
        return base

    def to_payload(self) -> dict[str, Any]:
        """Render the error as the CLI JSON error object."""
        return {"error": {"code": self.code, "detail": str(self)}}


class ConfigurationError(MetaplecticError):
    """Raised when configuration is invalid or missing."""

    code = "configuration"

    def __init__(
        self,
        message: str = "Configuration error",
        missing_keys: Optional[list[str]] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if missing_keys:
            details["missing_keys"] = missing_keys
        super().__init__(message, details=details, **kwargs)


class InvalidParameterError(MetaplecticError):
    """Raised when an input value violates a documented precondition."""

    code = "invalid_parameter"

    def __init__(
        self,
        message: str = "Invalid parameter",
        parameter: Optional[str] = None,
        value: Any = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if parameter:
            details["parameter"] = parameter
        if value is not None:
            details["value"] = value
        super().__init__(message, details=details, **kwargs)


class MismatchedSizeError(MetaplecticError):
    """Raised when two partitions do not partition the same integer."""

    code = "mismatched_size"

    def __init__(
        self,
        message: str = "Partitions have different sizes",
        left: Optional[int] = None,
        right: Optional[int] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if left is not None:
            details["left"] = left
        if right is not None:
            details["right"] = right
        super().__init__(message, details=details, **kwargs)


class RankMismatchError(MetaplecticError):
    """Raised when torus elements do not have the expected rank."""

    code = "rank_mismatch"

    def __init__(
        self,
        message: str = "Rank mismatch",
        expected: Optional[int] = None,
        actual: Optional[int] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if expected is not None:
            details["expected"] = expected
        if actual is not None:
            details["actual"] = actual
        super().__init__(message, details=details, **kwargs)


class BudgetExceededError(MetaplecticError):
    """Raised when an enumeration would exceed the configured budget."""

    code = "budget_exceeded"

    def __init__(
        self,
        message: str = "Enumeration budget exceeded",
        required: Optional[int] = None,
        budget: Optional[int] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if required is not None:
            details["required"] = required
        if budget is not None:
            details["budget"] = budget
        super().__init__(message, details=details, **kwargs)


class UnknownNameError(MetaplecticError):
    """Raised for an unsupported named subgroup."""

    code = "unknown_name"

    def __init__(
        self,
        message: str = "Unknown subgroup name",
        name: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if name:
            details["name"] = name
        super().__init__(message, details=details, **kwargs)


class NotASubgroupError(MetaplecticError):
    """Raised when a member set is not a subgroup of the stated ambient."""

    code = "not_a_subgroup"

    def __init__(
        self,
        message: str = "Not a subgroup of the ambient group",
        name: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if name:
            details["name"] = name
        super().__init__(message, details=details, **kwargs)


class NotContainedError(MetaplecticError):
    """Raised when an index is requested for a non-nested pair."""

    code = "not_contained"

    def __init__(
        self,
        message: str = "Subgroup is not contained in the larger group",
        inner: Optional[str] = None,
        outer: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if inner:
            details["inner"] = inner
        if outer:
            details["outer"] = outer
        super().__init__(message, details=details, **kwargs)


class ConfigMismatchError(MetaplecticError):
    """Raised when a unipotent configuration does not fit a rewrite rule."""

    code = "config_mismatch"

    def __init__(
        self,
        message: str = "Configuration does not match the rule",
        reason: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if reason:
            details["reason"] = reason
        super().__init__(message, details=details, **kwargs)


class IncompleteWitnessesError(MetaplecticError):
    """Raised when an expansion lacks vanishing witnesses."""

    code = "incomplete_witnesses"

    def __init__(
        self,
        message: str = "Expansion witnesses do not cover every character",
        uncovered: Optional[list[str]] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if uncovered:
            details["uncovered"] = uncovered
        super().__init__(message, details=details, **kwargs)


class UnsupportedOrbitError(MetaplecticError):
    """Raised for orbits outside the scripted derivations."""

    code = "unsupported_orbit"

    def __init__(
        self,
        message: str = "No scripted derivation for this orbit",
        orbit: Optional[list[int]] = None,
        n: Optional[int] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if orbit:
            details["orbit"] = orbit
        if n is not None:
            details["n"] = n
        super().__init__(message, details=details, **kwargs)


class TraceFormatError(MetaplecticError):
    """Raised when a serialized trace cannot be parsed."""

    code = "trace_format"

    def __init__(
        self,
        message: str = "Malformed derivation trace",
        file_path: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if file_path:
            details["file_path"] = file_path
        super().__init__(message, details=details, **kwargs)
