"""Dimensions of semi-Whittaker functionals on theta representations.

For an ordered composition lambda = (r_1, ..., r_k) of r at a tame place
the dimension is

    prod_i [T_{*,i}^st : T_{o,i}] / [T_*^st : T_o]  *  prod_i d_i

where the indices are taken in the torus covers of GL(r_i) and GL(r)
(T^st = Z * T_o, the standard maximal abelian subgroup) and d_i is the
Whittaker dimension of the rank r_i theta representation.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from math import prod
from typing import Optional

from pydantic import BaseModel, Field

from src.cache import get_cover_cache
from src.constants import DimKind
from src.exceptions import InvalidParameterError, MetaplecticError
from src.metaplectic_cocycle import make_params
from src.models import DimValue, IndexData, JacquetReport
from src.partitions_orbits import Composition, Partition, theta_orbit
from src.torus_cover import CoverGroup, index, named_subgroup


def whittaker_dim_block(n: int, r_i: int, c: int) -> DimValue:
    """Whittaker dimension of the rank r_i theta representation.

    Zero when n <= r_i - 1, one when n = r_i or when n = r_i + 1 and
    2(c + 1) = 0 mod n; otherwise finite but undetermined.
    """
    if n <= r_i - 1:
        return DimValue.zero()
    if n == r_i or (n == r_i + 1 and (2 * (c + 1)) % n == 0):
        return DimValue.exact(1)
    return DimValue.unknown((0,))


def vanishes(n: int, composition: Composition) -> bool:
    """True iff some block exceeds n."""
    return any(part > n for part in composition)


def _cover(n: int, q: int, c: int, r: int, budget: Optional[int]) -> CoverGroup:
    return get_cover_cache().get_or_build(make_params(n, q, c, r), budget)


def standard_index(G: CoverGroup) -> int:
    """[T_*^st : T_o] in the cover G."""
    return index(named_subgroup(G, "std"), named_subgroup(G, "t_o"))


def _block_dims(
    n: int,
    c: int,
    composition: Composition,
    block_dims: Optional[Mapping[int, int]],
) -> list[DimValue]:
    known = dict(block_dims or {})
    outside = sorted(i for i in known if not 0 <= i < len(composition))
    if outside:
        raise InvalidParameterError(
            "Block index out of range",
            parameter="block_dims",
            value=outside,
            details={"blocks": len(composition)},
        )
    negative = sorted(i for i, d in known.items() if d < 0)
    if negative:
        raise InvalidParameterError(
            "Block dimensions must be non-negative",
            parameter="block_dims",
            value={i: known[i] for i in negative},
        )
    dims = []
    for i, r_i in enumerate(composition):
        if i in known:
            dims.append(DimValue.exact(known[i]) if known[i] > 0 else DimValue.zero())
        else:
            dims.append(whittaker_dim_block(n, r_i, c))
    return dims


def _combine(ratio: Fraction, dims: list[DimValue], label: str) -> DimValue:
    """ratio * prod(d_i), keeping undetermined blocks symbolic."""
    unknown = tuple(i for i, d in enumerate(dims) if d.kind is DimKind.FINITE_UNKNOWN)
    known = ratio * prod((d.value for d in dims if d.kind is DimKind.EXACT), start=1)
    if unknown:
        return DimValue.unknown(unknown, known)
    if known.denominator != 1 or known <= 0:
        raise MetaplecticError(
            "Dimension formula produced a non-integral value",
            details={"formula": label, "value": str(known)},
        )
    return DimValue.exact(int(known))


def evaluate_semi_whittaker(
    n: int,
    q: int,
    c: int,
    composition: Composition,
    block_dims: Optional[Mapping[int, int]] = None,
    budget: Optional[int] = None,
) -> JacquetReport:
    """Evaluate the dimension formula with its index data.

    Args:
        n: Degree of the cover
        q: Residue field size (q = 1 mod n)
        c: Twisting class
        composition: Ordered blocks of the Levi subgroup
        block_dims: Known Whittaker dimensions by block index, overriding
            the undetermined ones
        budget: Enumeration budget for the cover groups

    Raises:
        BudgetExceededError: If a cover group is too large to build
        InvalidParameterError: If block_dims names a missing block or holds
            a negative dimension
    """
    d_blocks = _block_dims(n, c, composition, block_dims)
    base = {
        "n": n,
        "q": q,
        "c": c,
        "composition": composition.to_json(),
        "d_blocks": d_blocks,
    }
    if any(d.is_zero for d in d_blocks):
        return JacquetReport(**base, dim=DimValue.zero(), indices=IndexData())

    numerators = [standard_index(_cover(n, q, c, r_i, budget)) for r_i in composition]
    denominator = standard_index(_cover(n, q, c, composition.r, budget))
    ratio = Fraction(prod(numerators), denominator)
    return JacquetReport(
        **base,
        dim=_combine(ratio, d_blocks, "semi_whittaker"),
        indices=IndexData(numerators=numerators, denominator=denominator),
    )


def semi_whittaker_dim(
    n: int,
    q: int,
    c: int,
    composition: Composition,
    block_dims: Optional[Mapping[int, int]] = None,
    budget: Optional[int] = None,
) -> DimValue:
    """Dimension of the semi-Whittaker functionals for lambda."""
    return evaluate_semi_whittaker(n, q, c, composition, block_dims, budget).dim


def final_formula_dim(
    n: int,
    q: int,
    c: int,
    composition: Composition,
    block_dims: Optional[Mapping[int, int]] = None,
    budget: Optional[int] = None,
) -> DimValue:
    """Same dimension through [T_* : T_*^sq] with T_*^sq = Z^(n) T^sq_o.

    Maximal abelian subgroups of a given ambient all have the same order,
    so the ratio of orders of the standard constructions is used.
    """
    d_blocks = _block_dims(n, c, composition, block_dims)
    if any(d.is_zero for d in d_blocks):
        return DimValue.zero()
    ratio = Fraction(1)
    for r_i in composition:
        G = _cover(n, q, c, r_i, budget)
        ratio *= Fraction(
            named_subgroup(G, "std").order, named_subgroup(G, "center_n_sq_o").order
        )
    G = _cover(n, q, c, composition.r, budget)
    ratio /= Fraction(
        named_subgroup(G, "std").order,
        named_subgroup(G, "levi_center_n_sq_o", composition).order,
    )
    return _combine(ratio, d_blocks, "final_formula")


def index_identities(
    n: int,
    q: int,
    c: int,
    composition: Composition,
    budget: Optional[int] = None,
) -> dict[str, Fraction]:
    """Blockwise index ratios, each expected to equal 1."""
    blocks = [_cover(n, q, c, r_i, budget) for r_i in composition]
    G = _cover(n, q, c, composition.r, budget)

    def ratio(
        numerator: str, denominator: str, levi_num: str, levi_den: str
    ) -> Fraction:
        top = prod(
            index(named_subgroup(B, numerator), named_subgroup(B, denominator))
            for B in blocks
        )
        bottom = index(
            named_subgroup(G, levi_num, composition),
            named_subgroup(G, levi_den, composition),
        )
        return Fraction(top, bottom)

    return {
        "torus_over_sq": ratio("full", "sq", "full", "levi_sq"),
        "sq_over_center_n_sq_o": ratio(
            "sq", "center_n_sq_o", "levi_sq", "levi_center_n_sq_o"
        ),
        "torus_over_t_o": ratio("full", "t_o", "full", "t_o"),
    }


class WssCertificate(BaseModel):
    """Evidence for the Whittaker-Speh-Shalika type predicate."""

    n: int
    r: int
    is_wss: bool
    orbit: list[int]
    wss_type: Optional[list[int]] = Field(
        default=None, description="(a, b) for the rectangle (a^b)"
    )
    multiplicity_one_composition: Optional[list[int]] = None
    semi_whittaker: Optional[dict[str, object]] = None


def wss_check(
    n: int,
    r: int,
    q: Optional[int] = None,
    c: int = 0,
    budget: Optional[int] = None,
) -> WssCertificate:
    """Whether the rank r theta representation is of type (n, r/n).

    When q is given the multiplicity-one dimension for (n^m) is evaluated
    and attached to the certificate.
    """
    orbit: Partition = theta_orbit(n, r)
    is_wss = r % n == 0
    certificate = WssCertificate(n=n, r=r, is_wss=is_wss, orbit=orbit.to_json())
    if not is_wss:
        return certificate
    m = r // n
    update: dict[str, object] = {
        "wss_type": [n, m],
        "multiplicity_one_composition": [n] * m,
    }
    if q is not None:
        report = evaluate_semi_whittaker(n, q, c, Composition((n,) * m), budget=budget)
        update["semi_whittaker"] = report.to_payload()
    return certificate.model_copy(update=update)
