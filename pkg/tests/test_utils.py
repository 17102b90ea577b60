"""Tests for utility functions."""

import argparse
import time

import pytest

from src.constants import CheckMode
from src.models import FieldElement
from src.utils import (
    cover_degree,
    elapsed_ms,
    format_duration,
    non_negative_int,
    parse_block_dims,
    parse_check_mode,
    parse_composition,
    parse_element,
    parse_partition,
)


class TestParsing:
    """Test suite for command-line parsers."""

    def test_parse_composition(self) -> None:
        assert parse_composition("2, 1,3").parts == (2, 1, 3)

    def test_parse_partition_requires_order(self) -> None:
        """Partitions are weakly decreasing."""
        assert parse_partition("3,3,1").parts == (3, 3, 1)
        with pytest.raises(argparse.ArgumentTypeError):
            parse_partition("1,3")

    @pytest.mark.parametrize("text", ["", "a,b", "2,0"])
    def test_parse_composition_rejects(self, text: str) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_composition(text)

    def test_parse_element(self) -> None:
        assert parse_element("1,2") == FieldElement(v=1, u=2)
        with pytest.raises(argparse.ArgumentTypeError):
            parse_element("1")

    def test_parse_block_dims(self) -> None:
        assert parse_block_dims("0=1,2=3") == {0: 1, 2: 3}
        with pytest.raises(argparse.ArgumentTypeError):
            parse_block_dims("0:1")

    @pytest.mark.parametrize("text", ["0=-1", "-1=1"])
    def test_parse_block_dims_rejects_negative(self, text: str) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_block_dims(text)

    @pytest.mark.parametrize(
        ("text", "expected"),
        [
            ("exhaustive", (CheckMode.EXHAUSTIVE, None)),
            ("sample", (CheckMode.SAMPLE, None)),
            ("sample=50", (CheckMode.SAMPLE, 50)),
        ],
    )
    def test_parse_check_mode(self, text: str, expected: tuple) -> None:
        assert parse_check_mode(text) == expected

    @pytest.mark.parametrize("text", ["random", "sample=0", "exhaustive=3"])
    def test_parse_check_mode_rejects(self, text: str) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_check_mode(text)

    def test_integer_bounds(self) -> None:
        assert cover_degree("2") == 2
        assert non_negative_int("0") == 0
        with pytest.raises(argparse.ArgumentTypeError):
            cover_degree("1")
        with pytest.raises(argparse.ArgumentTypeError):
            non_negative_int("-1")


class TestTimeUtils:
    """Test suite for time utilities."""

    @pytest.mark.parametrize(
        ("ms", "expected"),
        [(230, "230ms"), (1500, "1.50s"), (90_000, "1.50m"), (5_400_000, "1.50h")],
    )
    def test_format_duration(self, ms: int, expected: str) -> None:
        assert format_duration(ms) == expected

    def test_elapsed_ms(self) -> None:
        assert elapsed_ms(time.perf_counter()) >= 0
