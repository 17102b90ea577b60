"""Parsers for command-line values.

Each parser raises ``argparse.ArgumentTypeError`` so malformed flags are
reported as usage errors before any computation starts.
"""

import argparse
from typing import Optional

from src.constants import CheckMode
from src.exceptions import InvalidParameterError
from src.models import FieldElement
from src.partitions_orbits import Composition, Partition


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        )
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def parse_composition(text: str) -> Composition:
    """'2,1' -> Composition((2, 1))."""
    try:
        return Composition(tuple(_int_list(text)))
    except InvalidParameterError as exc:
        raise argparse.ArgumentTypeError(exc.message)


def parse_partition(text: str) -> Partition:
    """'3,3,1' -> Partition((3, 3, 1)); parts must be weakly decreasing."""
    try:
        return Partition(tuple(_int_list(text)))
    except InvalidParameterError as exc:
        raise argparse.ArgumentTypeError(exc.message)


def parse_element(text: str) -> FieldElement:
    """'v,u' -> pi^v * omega^u."""
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected 'v,u', got {text!r}")
    return FieldElement(v=values[0], u=values[1])


def parse_block_dims(text: str) -> dict[int, int]:
    """'0=1,2=3' -> {0: 1, 2: 3} (block index to known dimension)."""
    dims: dict[int, int] = {}
    for item in text.split(","):
        index, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected index=value, got {item!r}")
        try:
            block, dim = int(index), int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected integers in {item!r}")
        if block < 0 or dim < 0:
            raise argparse.ArgumentTypeError(
                f"expected non-negative values in {item!r}"
            )
        dims[block] = dim
    return dims


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def cover_degree(text: str) -> int:
    """Cover degree n >= 2."""
    value = positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"n must be at least 2, got {value}")
    return value


def non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(
            f"expected a non-negative integer, got {value}"
        )
    return value


def parse_check_mode(text: str) -> tuple[CheckMode, Optional[int]]:
    """'exhaustive' or 'sample=K' (K optional)."""
    mode, _, count = text.partition("=")
    if mode == CheckMode.EXHAUSTIVE.value and not count:
        return CheckMode.EXHAUSTIVE, None
    if mode == CheckMode.SAMPLE.value:
        return CheckMode.SAMPLE, positive_int(count) if count else None
    raise argparse.ArgumentTypeError(
        f"expected 'exhaustive' or 'sample=K', got {text!r}"
    )
