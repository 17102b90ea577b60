"""Utility modules for the metaplectic theta toolkit."""

from src.utils.parsing import (
    cover_degree,
    non_negative_int,
    parse_block_dims,
    parse_check_mode,
    parse_composition,
    parse_element,
    parse_partition,
    positive_int,
)
from src.utils.time_utils import elapsed_ms, format_duration

__all__ = [
    # Parsing
    "cover_degree",
    "non_negative_int",
    "parse_block_dims",
    "parse_check_mode",
    "parse_composition",
    "parse_element",
    "parse_partition",
    "positive_int",
    # Time utilities
    "elapsed_ms",
    "format_duration",
]
