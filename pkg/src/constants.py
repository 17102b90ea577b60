"""Constants and enumerations for the metaplectic theta toolkit.

This module centralizes the fixed values, JSON schema markers and
enumerations shared by the computational modules and the CLI.
"""

from enum import Enum
from typing import Final

# ============================================================================
# Application Metadata
# ============================================================================

APP_NAME: Final[str] = "Metaplectic Theta Toolkit"
APP_VERSION: Final[str] = "1.0.0"
APP_DESCRIPTION: Final[str] = (
    "Exact computations for theta representations of metaplectic GL(r) covers"
)
LOGGER_NAME: Final[str] = "MetaplecticTheta"
LOG_FILE_NAME: Final[str] = "metaplectic.log"

# ============================================================================
# JSON Schema
# ============================================================================

SCHEMA_VERSION: Final[int] = 1

# ============================================================================
# Enumeration Defaults
# ============================================================================

DEFAULT_BUDGET: Final[int] = 10_000_000
DEFAULT_SEED: Final[int] = 20240101
DEFAULT_SAMPLE_SIZE: Final[int] = 2000
DEFAULT_WORKERS: Final[int] = 4
DEFAULT_COVER_CACHE_SIZE: Final[int] = 32

# Enumeration of exhaustive cocycle checks is done in chunks of this many
# first arguments to bound numpy memory.
COCYCLE_CHUNK_SIZE: Final[int] = 64

# AXIOM evaluation enumerates zero/nonzero choices of arbitrary parameters.
MAX_AXIOM_PARAMS: Final[int] = 16

# Largest rank accepted by the scripted orbit derivations.
MAX_TRACE_RANK: Final[int] = 12

# ============================================================================
# Logging
# ============================================================================

LOG_FORMAT: Final[str] = "%(asctime)s | %(levelname)-8s | %(message)s%(context)s"
LOG_DATE_FORMAT: Final[str] = "%Y-%m-%d %H:%M:%S"
LOG_MAX_BYTES: Final[int] = 5 * 1024 * 1024
LOG_BACKUP_COUNT: Final[int] = 5

# ============================================================================
# Exit Codes
# ============================================================================

EXIT_OK: Final[int] = 0
EXIT_FAILURE: Final[int] = 1
EXIT_USAGE: Final[int] = 2

# ============================================================================
# Enumerations
# ============================================================================


class Relation(str, Enum):
    """Dominance relation between two partitions."""

    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def __str__(self) -> str:
        """Return the enum value as string."""
        return self.value


class WeightVariant(str, Enum):
    """Which one-parameter torus attached to an orbit."""

    STANDARD = "standard"
    PRIME = "prime"

    def __str__(self) -> str:
        return self.value


class ConfigVariant(str, Enum):
    """Unipotent configurations attached to an orbit."""

    V2 = "v2"
    U_O = "u_o"
    U_O_PRIME = "u_o_prime"

    def __str__(self) -> str:
        return self.value


class TagKind(str, Enum):
    """Coefficient tag of a character on a root subgroup."""

    ZERO = "zero"
    ONE = "one"
    PARAM = "param"
    NONZERO_PARAM = "nonzero_param"

    def __str__(self) -> str:
        return self.value


class DimKind(str, Enum):
    """Shape of a computed functional dimension."""

    ZERO = "zero"
    EXACT = "exact"
    FINITE_UNKNOWN = "finite_unknown"

    def __str__(self) -> str:
        return self.value


class CheckMode(str, Enum):
    """Enumeration strategy for identity checks."""

    EXHAUSTIVE = "exhaustive"
    SAMPLE = "sample"

    def __str__(self) -> str:
        return self.value


class Rule(str, Enum):
    """Rewrite rules of the derivation calculus."""

    ROOT_EXCHANGE = "ROOT_EXCHANGE"
    EXPAND = "EXPAND"
    CONJUGATE = "CONJUGATE"
    STAGES = "STAGES"
    AXIOM = "AXIOM"

    def __str__(self) -> str:
        return self.value


class StepRelation(str, Enum):
    """How a step's output coefficient relates to its input coefficient."""

    ISOMORPHISM = "isomorphism"
    VANISHING_EQUIVALENCE = "vanishing_equivalence"
    # output vanishing implies input vanishing
    IMPLIES_VANISHING = "implies_vanishing"
    # output nonvanishing implies input nonvanishing
    IMPLIES_NONVANISHING = "implies_nonvanishing"

    def __str__(self) -> str:
        return self.value


class ExpandMode(str, Enum):
    """Variants of the Fourier expansion rule."""

    EQUIVALENCE = "equivalence"
    EXHAUSTIVE = "exhaustive"
    QUOTIENT = "quotient"

    def __str__(self) -> str:
        return self.value


class ConjugationKind(str, Enum):
    """Kinds of conjugation accepted by the CONJUGATE rule."""

    PERMUTATION = "permutation"
    TORUS = "torus"

    def __str__(self) -> str:
        return self.value


class Status(str, Enum):
    """Terminal status of a derivation."""

    VANISHING = "Vanishing"
    NONVANISHING = "Nonvanishing"
    EQUIVALENT = "EquivalentTo"

    def __str__(self) -> str:
        return self.value


class OutputMode(str, Enum):
    """CLI output format."""

    JSON = "json"
    TEXT = "text"

    def __str__(self) -> str:
        return self.value


class LogAction(str, Enum):
    """Log action types for structured logging."""

    STARTUP = "STARTUP"
    SHUTDOWN = "SHUTDOWN"
    SUCCESS = "SUCCESS"
    LOADING = "LOADING"
    CACHE_HIT = "CACHE_HIT"
    CACHE_MISS = "CACHE_MISS"
    CHECK = "CHECK"
    TRACE = "TRACE"
    SUITE = "SUITE"

    def __str__(self) -> str:
        return self.value
