"""Tests for data models."""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.constants import SCHEMA_VERSION, CheckMode, DimKind
from src.models import (
    CheckReport,
    CocycleParams,
    DimValue,
    FieldElement,
    FieldModel,
    IndexData,
    JacquetReport,
    Violation,
    with_schema,
)


class TestFieldModel:
    """Test suite for FieldModel."""

    def test_valid_field(self) -> None:
        """Test creating a valid field model."""
        model = FieldModel(n=3, q=7)

        assert model.pi_pi_exponent == 0
        assert model.minus_one() == FieldElement(v=0, u=3)
        assert len(model.all_classes()) == 9

    @pytest.mark.parametrize(("n", "q"), [(2, 15), (2, 4), (3, 5), (1, 3)])
    def test_invalid_field(self, n: int, q: int) -> None:
        """q must be an odd prime power with q = 1 mod n."""
        with pytest.raises(ValidationError):
            FieldModel(n=n, q=q)

    def test_pi_pi_exponent(self) -> None:
        """(pi, pi) = (-1, pi), nontrivial for n = 2 when q = 3 mod 4."""
        assert FieldModel(n=2, q=3).pi_pi_exponent == 1
        assert FieldModel(n=2, q=5).pi_pi_exponent == 0

    def test_element_arithmetic(self) -> None:
        model = FieldModel(n=2, q=5)
        x = model.element(1, 6)

        assert x.u == 2
        assert x * x.inverse() == FieldElement(v=0, u=0)
        assert x**3 == FieldElement(v=3, u=6)


class TestCocycleParams:
    """Test suite for CocycleParams."""

    def test_twist_must_be_below_n(self) -> None:
        with pytest.raises(ValidationError):
            CocycleParams(model=FieldModel(n=2, q=3), c=2, r=2)

    def test_with_rank(self) -> None:
        params = CocycleParams(model=FieldModel(n=3, q=7), c=1, r=2)
        assert params.with_rank(4).cache_key() == (3, 7, 1, 4)


class TestCheckReport:
    """Test suite for CheckReport."""

    def test_merge(self) -> None:
        """Merging adds counts and keeps every violation."""
        left = CheckReport(name="cocycle", checked=4)
        right = CheckReport(
            name="cocycle",
            checked=2,
            violations=[Violation(kind="cocycle", witness=[1, 2, 3])],
        )

        merged = left.merge(right)

        assert merged.checked == 6
        assert not merged.passed
        assert left.passed

    def test_payload(self) -> None:
        report = CheckReport(name="hilbert", mode=CheckMode.SAMPLE, checked=10)
        assert report.to_payload() == {
            "name": "hilbert",
            "mode": "sample",
            "checked": 10,
            "violations": [],
        }


class TestDimValue:
    """Test suite for DimValue."""

    def test_constructors(self) -> None:
        assert DimValue.zero().is_zero
        assert DimValue.exact(2).value == 2
        unknown = DimValue.unknown((0, 2), Fraction(1, 2))
        assert unknown.kind is DimKind.FINITE_UNKNOWN
        assert unknown.coefficient == "1/2"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": DimKind.EXACT},
            {"kind": DimKind.ZERO, "value": 1},
            {"kind": DimKind.FINITE_UNKNOWN},
            {"kind": DimKind.EXACT, "value": 0},
        ],
    )
    def test_invalid_shapes(self, kwargs: dict) -> None:
        with pytest.raises(ValidationError):
            DimValue(**kwargs)

    def test_payloads(self) -> None:
        assert DimValue.zero().to_payload() == {"kind": "zero"}
        assert DimValue.exact(1).to_payload() == {"kind": "exact", "value": 1}
        assert DimValue.unknown((1,)).to_payload() == {
            "kind": "finite_unknown",
            "coefficient": "1",
            "unknown_blocks": [1],
        }

    def test_report_payload(self) -> None:
        report = JacquetReport(
            n=2,
            q=3,
            c=0,
            composition=[2, 2],
            dim=DimValue.exact(1),
            indices=IndexData(numerators=[2, 2], denominator=4),
            d_blocks=[DimValue.exact(1), DimValue.exact(1)],
        )
        payload = report.to_payload()
        assert payload["value"] == 1
        assert payload["indices"] == {"numerators": [2, 2], "denominator": 4}


class TestSchema:
    """Test suite for with_schema."""

    def test_schema_first(self) -> None:
        payload = with_schema({"n": 2})
        assert list(payload) == ["schema", "n"]
        assert payload["schema"] == SCHEMA_VERSION
