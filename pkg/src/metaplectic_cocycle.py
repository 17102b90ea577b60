"""The torus cocycle of the n-fold cover of GL(r) and its identities.

On diagonal elements the cocycle with twisting class c is

    sigma(t, t') = sum_{i<j} (t_i, t'_j) + c * (det t, det t')

written additively in Z/n. It only depends on classes modulo n-th powers
and is bi-additive there, so the exhaustive checks run on numpy arrays of
class vectors of shape (..., r, 2).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError

from src.config import get_settings, resolve_budget
from src.constants import COCYCLE_CHUNK_SIZE, CheckMode
from src.exceptions import BudgetExceededError, InvalidParameterError, RankMismatchError
from src.models import CheckReport, CocycleParams, FieldElement, FieldModel, Violation
from src.partitions_orbits import Composition
from src.tame_local_field import class_of, hilbert, hilbert_array, make_field

MAX_REPORTED_VIOLATIONS = 20

IntArray = NDArray[np.int64]


@dataclass(frozen=True)
class TorusElement:
    """diag(t_1, ..., t_r) with field element entries."""

    entries: tuple[FieldElement, ...]

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __mul__(self, other: TorusElement) -> TorusElement:
        if other.rank != self.rank:
            raise RankMismatchError(expected=self.rank, actual=other.rank)
        return TorusElement(tuple(a * b for a, b in zip(self.entries, other.entries)))

    def det(self) -> FieldElement:
        """Product of the entries."""
        v = sum(e.v for e in self.entries)
        u = sum(e.u for e in self.entries)
        return FieldElement(v=v, u=u)

    def block(self, start: int, size: int) -> TorusElement:
        """Diagonal block of the given size starting at index start."""
        return TorusElement(self.entries[start : start + size])

    def classes(self, m: FieldModel) -> IntArray:
        """Class vector of shape (r, 2)."""
        pairs = [class_of(m, e) for e in self.entries]
        return np.array(pairs, dtype=np.int64).reshape(-1, 2)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> TorusElement:
        return cls(tuple(FieldElement(v=int(v), u=int(u)) for v, u in pairs))


def make_params(n: int, q: int, c: int, r: int) -> CocycleParams:
    """Validated cocycle parameters.

    Raises:
        InvalidParameterError: If the field is not tame or c, r are out of range
    """
    model = make_field(n, q)
    try:
        return CocycleParams(model=model, c=c, r=r)
    except ValidationError as e:
        raise InvalidParameterError(
            "Invalid cocycle parameters",
            details={"n": n, "q": q, "c": c, "r": r},
            original_error=e,
        ) from e


def _check_rank(p: CocycleParams, *elements: TorusElement) -> None:
    for t in elements:
        if t.rank != p.r:
            raise RankMismatchError(expected=p.r, actual=t.rank)


# ============================================================================
# Class-level (vectorized) cocycle
# ============================================================================


def sigma_classes(p: CocycleParams, x: IntArray, y: IntArray) -> IntArray:
    """Cocycle on broadcastable class arrays of shape (..., r, 2)."""
    m = p.model
    prefix = np.cumsum(x, axis=-2) - x
    inner = hilbert_array(m, prefix, y).sum(axis=-1)
    det_x = x.sum(axis=-2)
    det_y = y.sum(axis=-2)
    twisted = inner + p.c * hilbert_array(m, det_x, det_y)
    return np.asarray(twisted % m.n, dtype=np.int64)


def pairing_classes(p: CocycleParams, x: IntArray, y: IntArray) -> IntArray:
    """Commutator pairing on class arrays."""
    return (sigma_classes(p, x, y) - sigma_classes(p, y, x)) % p.n


def class_vectors(n: int, r: int) -> IntArray:
    """Every class of (F^x / F^xn)^r, shape (n^(2r), r, 2)."""
    flat = np.array(list(product(range(n), repeat=2 * r)), dtype=np.int64)
    return flat.reshape(-1, r, 2)


def basis_vectors(r: int) -> IntArray:
    """Unit class vectors ordered v_1, u_1, ..., v_r, u_r."""
    return np.eye(2 * r, dtype=np.int64).reshape(2 * r, r, 2)


def sigma_matrix(p: CocycleParams) -> IntArray:
    """Matrix S with sigma(x, y) = x S y on flattened class vectors."""
    basis = basis_vectors(p.r)
    return sigma_classes(p, basis[:, None], basis[None, :])


# ============================================================================
# Element-level operations
# ============================================================================


def sigma_torus(p: CocycleParams, t: TorusElement, t2: TorusElement) -> int:
    """sigma(t, t') as an exponent in Z/n.

    Raises:
        RankMismatchError: If either element does not have rank p.r
    """
    _check_rank(p, t, t2)
    m = p.model
    total = 0
    for j in range(p.r):
        for i in range(j):
            total += hilbert(m, t.entries[i], t2.entries[j])
    total += p.c * hilbert(m, t.det(), t2.det())
    return total % m.n


def commutator_pairing(p: CocycleParams, t: TorusElement, t2: TorusElement) -> int:
    """<t, t'> = sigma(t, t') - sigma(t', t) in Z/n."""
    return (sigma_torus(p, t, t2) - sigma_torus(p, t2, t)) % p.n


def block_correction(
    p: CocycleParams,
    composition: Composition,
    t: TorusElement,
    t2: TorusElement,
) -> int:
    """Block-diagonal right-hand side of the compatibility identity.

    Sum of the block cocycles sigma_{r_i}(t_i, t'_i) plus the Hilbert symbols
    of block determinants weighted by c + 1 (i < j) and c (i > j).

    Args:
        p: Cocycle parameters of the full rank
        composition: Ordered blocks summing to p.r
        t: Left torus element
        t2: Right torus element

    Returns:
        Exponent in Z/n
    """
    m = p.model
    offsets = composition.offsets()
    blocks = [t.block(o, size) for o, size in zip(offsets, composition)]
    blocks2 = [t2.block(o, size) for o, size in zip(offsets, composition)]
    total = sum(
        sigma_torus(p.with_rank(size), g, g2)
        for size, g, g2 in zip(composition, blocks, blocks2)
    )
    for i in range(len(composition)):
        for j in range(i + 1, len(composition)):
            total += (p.c + 1) * hilbert(m, blocks[i].det(), blocks2[j].det())
            total += p.c * hilbert(m, blocks[j].det(), blocks2[i].det())
    return total % m.n


def check_block_compatibility(
    p: CocycleParams,
    composition: Composition,
    t: TorusElement,
    t2: TorusElement,
) -> bool:
    """Whether sigma_r agrees with the blockwise formula for t, t'.

    Raises:
        RankMismatchError: If the composition or elements do not have rank p.r
    """
    if composition.r != p.r:
        raise RankMismatchError(
            "Composition does not match rank", expected=p.r, actual=composition.r
        )
    _check_rank(p, t, t2)
    return sigma_torus(p, t, t2) == block_correction(p, composition, t, t2)


# ============================================================================
# Exhaustive and sampled checks
# ============================================================================


def _require_budget(required: int, budget: Optional[int]) -> None:
    """Raise BudgetExceededError when required exceeds the resolved budget."""
    limit = resolve_budget(budget)
    if required > limit:
        raise BudgetExceededError(required=required, budget=limit)


def _collect(
    violations: list[Violation],
    kind: str,
    mask: NDArray[np.bool_],
    witnesses: Sequence[IntArray],
) -> None:
    full = [np.broadcast_to(w, mask.shape + w.shape[-2:]) for w in witnesses]
    for idx in np.argwhere(mask)[: MAX_REPORTED_VIOLATIONS - len(violations)]:
        violations.append(
            Violation(kind=kind, witness=[w[tuple(idx)].tolist() for w in full])
        )


def _exhaustive_cocycle(p: CocycleParams, budget: Optional[int]) -> CheckReport:
    classes = class_vectors(p.n, p.r)
    total = len(classes)
    _require_budget(total**3, budget)
    violations: list[Violation] = []
    s_hk = sigma_classes(p, classes[:, None], classes[None, :])
    h = classes[:, None]
    k = classes[None, :]
    hk = (h + k) % p.n
    for start in range(0, total, COCYCLE_CHUNK_SIZE):
        g = classes[start : start + COCYCLE_CHUNK_SIZE][:, None, None]
        gh = (g + h[None]) % p.n
        lhs = sigma_classes(p, g, h[None]) + sigma_classes(p, gh, k[None])
        rhs = sigma_classes(p, g, hk[None]) + s_hk[None]
        bad = (lhs - rhs) % p.n != 0
        if bad.any() and len(violations) < MAX_REPORTED_VIOLATIONS:
            room = MAX_REPORTED_VIOLATIONS - len(violations)
            for gi, hi, ki in np.argwhere(bad)[:room]:
                violations.append(
                    Violation(
                        kind="cocycle",
                        witness=[
                            classes[start + gi].tolist(),
                            classes[hi].tolist(),
                            classes[ki].tolist(),
                        ],
                    )
                )
    return CheckReport(
        name="cocycle_identity",
        mode=CheckMode.EXHAUSTIVE,
        checked=total**3,
        violations=violations,
    )


def random_torus(p: CocycleParams, rng: np.random.Generator) -> TorusElement:
    """A raw (not class-reduced) torus element."""
    vs = rng.integers(-3 * p.n, 3 * p.n + 1, size=p.r)
    us = rng.integers(0, p.q - 1, size=p.r)
    return TorusElement.from_pairs(zip(vs.tolist(), us.tolist()))


def _sampled_cocycle(p: CocycleParams, k: int, seed: int) -> CheckReport:
    rng = np.random.default_rng(seed)
    violations: list[Violation] = []
    for _ in range(k):
        g, h, w = (random_torus(p, rng) for _ in range(3))
        lhs = sigma_torus(p, g, h) + sigma_torus(p, g * h, w)
        rhs = sigma_torus(p, g, h * w) + sigma_torus(p, h, w)
        if (lhs - rhs) % p.n and len(violations) < MAX_REPORTED_VIOLATIONS:
            violations.append(
                Violation(
                    kind="cocycle",
                    witness=[[(e.v, e.u) for e in x.entries] for x in (g, h, w)],
                )
            )
    return CheckReport(
        name="cocycle_identity",
        mode=CheckMode.SAMPLE,
        checked=k,
        violations=violations,
    )


def check_cocycle_identity(
    p: CocycleParams,
    mode: CheckMode = CheckMode.EXHAUSTIVE,
    k: Optional[int] = None,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
) -> CheckReport:
    """Verify sigma(g,h) + sigma(gh,k) = sigma(g,hk) + sigma(h,k).

    Exhaustive mode visits every class triple; sample mode draws k raw
    triples from a seeded generator.

    Raises:
        BudgetExceededError: If the exhaustive triple count exceeds the budget
    """
    if mode is CheckMode.EXHAUSTIVE:
        return _exhaustive_cocycle(p, budget)
    settings = get_settings()
    return _sampled_cocycle(
        p,
        k if k is not None else settings.sample_size,
        seed if seed is not None else settings.default_seed,
    )


def check_block_compatibility_exhaustive(
    p: CocycleParams,
    composition: Composition,
    budget: Optional[int] = None,
) -> CheckReport:
    """Block compatibility over every pair of class vectors."""
    if composition.r != p.r:
        raise RankMismatchError(
            "Composition does not match rank", expected=p.r, actual=composition.r
        )
    classes = class_vectors(p.n, p.r)
    _require_budget(len(classes) ** 2, budget)
    x = classes[:, None]
    y = classes[None, :]
    lhs = sigma_classes(p, x, y)

    m = p.model
    rhs = np.zeros_like(lhs)
    dets_x, dets_y = [], []
    for start, size in zip(composition.offsets(), composition):
        bx = x[..., start : start + size, :]
        by = y[..., start : start + size, :]
        rhs = rhs + sigma_classes(p.with_rank(size), bx, by)
        dets_x.append(bx.sum(axis=-2))
        dets_y.append(by.sum(axis=-2))
    for i in range(len(composition)):
        for j in range(i + 1, len(composition)):
            rhs = rhs + (p.c + 1) * hilbert_array(m, dets_x[i], dets_y[j])
            rhs = rhs + p.c * hilbert_array(m, dets_x[j], dets_y[i])

    violations: list[Violation] = []
    _collect(violations, "block_compatibility", (lhs - rhs) % p.n != 0, [x, y])
    return CheckReport(
        name="block_compatibility", checked=lhs.size, violations=violations
    )


def check_scalar_commutator(
    p: CocycleParams, budget: Optional[int] = None
) -> CheckReport:
    """sigma(g, aI) - sigma(aI, g) = (det g, a^(r-1+2cr)) for all classes.

    Args:
        p: Cocycle parameters
        budget: Enumeration budget (defaults to the configured one)

    Returns:
        Report over every class g and scalar class a

    Raises:
        BudgetExceededError: If n^(2r) * n^2 exceeds the budget
    """
    classes = class_vectors(p.n, p.r)
    scalars_flat = np.array(p.model.all_classes(), dtype=np.int64)
    _require_budget(len(classes) * len(scalars_flat), budget)
    scalars = np.repeat(scalars_flat[:, None, :], p.r, axis=1)
    g = classes[:, None]
    a = scalars[None, :]
    lhs = (sigma_classes(p, g, a) - sigma_classes(p, a, g)) % p.n
    exponent = p.r - 1 + 2 * p.c * p.r
    rhs = hilbert_array(p.model, g.sum(axis=-2), exponent * a[..., 0, :])
    violations: list[Violation] = []
    _collect(violations, "scalar_commutator", (lhs - rhs) % p.n != 0, [g, a])
    return CheckReport(
        name="scalar_commutator", checked=lhs.size, violations=violations
    )


def check_pairing_properties(
    p: CocycleParams, budget: Optional[int] = None
) -> CheckReport:
    """Bi-additivity and alternation of the commutator pairing, exhaustively.

    Raises:
        BudgetExceededError: If n^(6r) triples exceed the budget
    """
    classes = class_vectors(p.n, p.r)
    total = len(classes)
    _require_budget(total**3, budget)
    violations: list[Violation] = []

    diagonal = pairing_classes(p, classes, classes)
    _collect(violations, "alternating", diagonal != 0, [classes])

    base = pairing_classes(p, classes[:, None], classes[None, :])
    for start in range(0, total, COCYCLE_CHUNK_SIZE):
        x1 = classes[start : start + COCYCLE_CHUNK_SIZE][:, None, None]
        x2 = classes[None, :, None]
        y = classes[None, None, :]
        lhs = pairing_classes(p, (x1 + x2) % p.n, y)
        rhs = base[start : start + COCYCLE_CHUNK_SIZE][:, None, :] + base[None, :, :]
        _collect(violations, "bi_additive", (lhs - rhs) % p.n != 0, [x1, x2, y])
    return CheckReport(
        name="pairing_properties",
        checked=total**3 + total,
        violations=violations,
    )
