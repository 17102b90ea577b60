"""Data models for the metaplectic theta toolkit.

Pydantic models for the field surrogate, cocycle parameters, check
reports, dimension values and every JSON payload the CLI emits.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import factorint

from src.constants import SCHEMA_VERSION, CheckMode, DimKind


class FieldElement(BaseModel):
    """Element pi^v * omega^u of a tame local field."""

    model_config = ConfigDict(frozen=True)

    v: int = Field(..., description="Valuation")
    u: int = Field(default=0, description="Exponent of the fixed unit generator")

    def __mul__(self, other: FieldElement) -> FieldElement:
        return FieldElement(v=self.v + other.v, u=self.u + other.u)

    def inverse(self) -> FieldElement:
        """Multiplicative inverse."""
        return FieldElement(v=-self.v, u=-self.u)

    def __pow__(self, exponent: int) -> FieldElement:
        return FieldElement(v=self.v * exponent, u=self.u * exponent)


class FieldModel(BaseModel):
    """Tame local field with residue field of size q and an n-fold cover."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2, description="Degree of the cover")
    q: int = Field(..., ge=3, description="Residue field size")

    @field_validator("q")
    @classmethod
    def validate_prime_power(cls, q: int) -> int:
        """Ensure q is an odd prime power."""
        if len(factorint(q)) != 1:
            raise ValueError(f"q={q} is not a prime power")
        if q % 2 == 0:
            raise ValueError(f"q={q} must be odd")
        return q

    @model_validator(mode="after")
    def validate_roots_of_unity(self) -> FieldModel:
        """Require mu_n inside F, i.e. q = 1 mod n."""
        if (self.q - 1) % self.n != 0:
            raise ValueError(f"q={self.q} is not 1 mod n={self.n}")
        return self

    @property
    def zeta_order(self) -> int:
        """Order of the realized roots of unity."""
        return self.n

    @property
    def pi_pi_exponent(self) -> int:
        """Exponent s with (pi, pi) = zeta^s."""
        return ((self.q - 1) // 2) % self.n

    def element(self, v: int, u: int = 0) -> FieldElement:
        """Element with unit exponent reduced mod q - 1."""
        return FieldElement(v=v, u=u % (self.q - 1))

    def uniformizer(self) -> FieldElement:
        return FieldElement(v=1, u=0)

    def minus_one(self) -> FieldElement:
        return FieldElement(v=0, u=(self.q - 1) // 2)

    def all_classes(self) -> list[tuple[int, int]]:
        """The n^2 classes of F^x / F^xn as (v mod n, u mod n)."""
        return [(v, u) for v in range(self.n) for u in range(self.n)]


class CocycleParams(BaseModel):
    """Parameters of the torus cocycle: field, twisting class c and rank r."""

    model_config = ConfigDict(frozen=True)

    model: FieldModel
    c: int = Field(default=0, ge=0, description="Twisting class in Z/n")
    r: int = Field(..., ge=1, description="Rank")

    @model_validator(mode="after")
    def validate_twist(self) -> CocycleParams:
        """Ensure 0 <= c < n."""
        if self.c >= self.model.n:
            raise ValueError(f"c={self.c} must be smaller than n={self.model.n}")
        return self

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def q(self) -> int:
        return self.model.q

    def with_rank(self, r: int) -> CocycleParams:
        """Same field and twist, different rank."""
        return CocycleParams(model=self.model, c=self.c, r=r)

    def cache_key(self) -> tuple[int, int, int, int]:
        return (self.model.n, self.model.q, self.c, self.r)


class Violation(BaseModel):
    """A failed identity or condition with the data that witnesses it."""

    kind: str = Field(..., description="Which identity or condition failed")
    witness: Any = Field(default=None, description="Offending inputs")
    message: str = Field(default="", description="Explanation")


class CheckReport(BaseModel):
    """Outcome of an exhaustive or sampled identity check."""

    name: str = Field(..., description="Identity checked")
    mode: CheckMode = Field(default=CheckMode.EXHAUSTIVE)
    checked: int = Field(default=0, ge=0, description="Number of instances checked")
    violations: list[Violation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: CheckReport) -> CheckReport:
        """Combine two reports by conjunction."""
        return CheckReport(
            name=self.name,
            mode=self.mode,
            checked=self.checked + other.checked,
            violations=self.violations + other.violations,
        )

    def to_payload(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "mode": str(self.mode),
            "checked": self.checked,
            "violations": [v.model_dump() for v in self.violations],
        }


class DimValue(BaseModel):
    """Dimension of a space of functionals: zero, exact, or finite but unknown."""

    model_config = ConfigDict(frozen=True)

    kind: DimKind
    value: Optional[int] = Field(default=None, ge=1)
    coefficient: Optional[str] = Field(
        default=None,
        description="Rational factor multiplying the unknown block dimensions",
    )
    unknown_blocks: tuple[int, ...] = Field(
        default=(),
        description="Indices (0-based) of blocks whose dimension is undetermined",
    )

    @model_validator(mode="after")
    def validate_shape(self) -> DimValue:
        """Exact values carry an integer, unknown values list their blocks."""
        if self.kind is DimKind.EXACT and self.value is None:
            raise ValueError("exact dimension requires a value")
        if self.kind is not DimKind.EXACT and self.value is not None:
            raise ValueError(f"{self.kind} dimension cannot carry a value")
        if self.kind is DimKind.FINITE_UNKNOWN and not self.unknown_blocks:
            raise ValueError("finite_unknown dimension must list its unknown blocks")
        return self

    @classmethod
    def zero(cls) -> DimValue:
        return cls(kind=DimKind.ZERO)

    @classmethod
    def exact(cls, value: int) -> DimValue:
        return cls(kind=DimKind.EXACT, value=value)

    @classmethod
    def unknown(
        cls, blocks: tuple[int, ...], coefficient: Fraction = Fraction(1)
    ) -> DimValue:
        return cls(
            kind=DimKind.FINITE_UNKNOWN,
            unknown_blocks=blocks,
            coefficient=str(coefficient),
        )

    @property
    def is_zero(self) -> bool:
        return self.kind is DimKind.ZERO

    def to_payload(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"kind": str(self.kind)}
        if self.value is not None:
            payload["value"] = self.value
        if self.kind is DimKind.FINITE_UNKNOWN:
            payload["coefficient"] = self.coefficient
            payload["unknown_blocks"] = list(self.unknown_blocks)
        return payload


class IndexData(BaseModel):
    """Index data entering the semi-Whittaker dimension formula."""

    numerators: list[int] = Field(default_factory=list)
    denominator: Optional[int] = None


class JacquetReport(BaseModel):
    """Full evaluation record of a semi-Whittaker dimension."""

    n: int
    q: int
    c: int
    composition: list[int]
    dim: DimValue
    indices: IndexData
    d_blocks: list[DimValue]

    def to_payload(self) -> dict[str, Any]:
        payload = self.dim.to_payload()
        payload["indices"] = self.indices.model_dump()
        payload["d_blocks"] = [d.to_payload() for d in self.d_blocks]
        return payload


class SubgroupSummary(BaseModel):
    """Order data of a subgroup of a finite cover."""

    name: str
    torus_classes: int = Field(..., ge=1)
    order: int = Field(..., ge=1)


def with_schema(payload: dict[str, Any]) -> dict[str, Any]:
    """Attach the schema version to a top-level JSON payload."""
    return {"schema": SCHEMA_VERSION, **payload}
