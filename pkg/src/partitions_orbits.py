"""Partitions, dominance order and orbit-attached unipotent data.

An orbit O = (p1, ..., pk) of GL(r) carries two one-parameter tori:
``h_O`` lists all block weights p-1, p-3, ..., 1-p sorted decreasingly,
``h'_O`` lists the first block's weights followed by ``h`` of the
remaining parts. A root (i, j) has weight w[i] - w[j] under a torus w.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
from sympy.utilities.iterables import multiset_permutations, partitions

from src.constants import ConfigVariant, Relation, WeightVariant
from src.exceptions import InvalidParameterError, MismatchedSizeError
from src.models import CheckReport, Violation
from src.root_system import (
    Character,
    Root,
    RootSet,
    UnipotentConfig,
    closure,
    positive_roots,
    whittaker_character,
)


@dataclass(frozen=True, slots=True)
class Composition:
    """Ordered tuple of positive integers (the blocks of a Levi subgroup)."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p < 1 for p in parts):
            raise InvalidParameterError(
                "Parts must be a nonempty list of positive integers",
                parameter="parts",
                value=list(parts),
            )
        object.__setattr__(self, "parts", parts)

    @property
    def r(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, index: int) -> int:
        return self.parts[index]

    def offsets(self) -> list[int]:
        """0-based start index of every block."""
        return [int(x) for x in np.concatenate(([0], np.cumsum(self.parts)[:-1]))]

    def to_json(self) -> list[int]:
        return list(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True, slots=True)
class Partition(Composition):
    """Weakly decreasing composition; indexes unipotent orbits."""

    def __post_init__(self) -> None:
        Composition.__post_init__(self)
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise InvalidParameterError(
                "Partition parts must be weakly decreasing",
                parameter="parts",
                value=list(self.parts),
            )

    @property
    def rest(self) -> Partition:
        """The partition (p2, ..., pk); requires at least two parts."""
        return Partition(self.parts[1:])


def partitions_of(r: int) -> list[Partition]:
    """Enumerate the partitions of r.

    Args:
        r: Positive integer to partition

    Returns:
        Every partition of r, in decreasing lexicographic order

    Raises:
        InvalidParameterError: If r < 1
    """
    if r < 1:
        raise InvalidParameterError("r must be positive", parameter="r", value=r)
    found = []
    for multiplicities in partitions(r):
        parts = sorted(
            (p for p, m in multiplicities.items() for _ in range(m)), reverse=True
        )
        found.append(Partition(tuple(parts)))
    return sorted(found, key=lambda p: p.parts, reverse=True)


def compositions_of(r: int) -> list[Composition]:
    """All ordered compositions of r."""
    return [
        Composition(tuple(perm))
        for p in partitions_of(r)
        for perm in multiset_permutations(list(p.parts))
    ]


def dominance_compare(p: Partition, q: Partition) -> Relation:
    """Compare two partitions of the same integer under dominance.

    p dominates q when every partial sum of p is at least the matching
    partial sum of q (shorter partitions are padded with zeros).

    Args:
        p: Left partition
        q: Right partition

    Returns:
        Relation of p to q

    Raises:
        MismatchedSizeError: If the partitions have different sums
    """
    if p.r != q.r:
        raise MismatchedSizeError(left=p.r, right=q.r)
    length = max(len(p), len(q))
    pp = np.cumsum(np.pad(np.array(p.parts), (0, length - len(p))))
    qq = np.cumsum(np.pad(np.array(q.parts), (0, length - len(q))))
    geq = bool(np.all(pp >= qq))
    leq = bool(np.all(pp <= qq))
    if geq and leq:
        return Relation.EQUAL
    if geq:
        return Relation.GREATER
    if leq:
        return Relation.LESS
    return Relation.INCOMPARABLE


def theta_orbit(n: int, r: int) -> Partition:
    """Orbit attached to the theta representation of the n-fold cover of GL(r).

    Args:
        n: Cover degree, at least 2
        r: Rank

    Returns:
        The partition (n^a b) with r = a*n + b and 0 <= b < n

    Raises:
        InvalidParameterError: If n < 2 or r < 1
    """
    if n < 2 or r < 1:
        raise InvalidParameterError("Need n >= 2 and r >= 1", details={"n": n, "r": r})
    a, b = divmod(r, n)
    return Partition((n,) * a + ((b,) if b else ()))


def block_weights(p: int) -> list[int]:
    """Weights p-1, p-3, ..., 1-p of a single Jordan block."""
    return list(range(p - 1, -p, -2))


def orbit_weights(
    orbit: Partition, variant: WeightVariant = WeightVariant.STANDARD
) -> tuple[int, ...]:
    """Weight vector of a one-parameter torus attached to an orbit.

    Args:
        orbit: Unipotent orbit
        variant: STANDARD for h_O, PRIME for h'_O

    Returns:
        One weight per coordinate, 0-indexed
    """
    if variant is WeightVariant.STANDARD:
        return tuple(sorted((w for p in orbit for w in block_weights(p)), reverse=True))
    head = block_weights(orbit[0])
    if len(orbit) == 1:
        return tuple(head)
    return tuple(head) + orbit_weights(orbit.rest, WeightVariant.STANDARD)


def weighted_roots(weights: Sequence[int], level: int) -> RootSet:
    """Roots of positive level under a torus.

    Args:
        weights: Weight vector, 0-indexed
        level: Minimum weight; 0 keeps every root of nonnegative weight

    Returns:
        Roots (i, j), i != j, with weights[i] - weights[j] >= level

    Raises:
        InvalidParameterError: If level is negative
    """
    if level < 0:
        raise InvalidParameterError(
            "level must be >= 0", parameter="level", value=level
        )
    w = np.asarray(weights)
    diff = w[:, None] - w[None, :]
    np.fill_diagonal(diff, np.iinfo(diff.dtype).min)
    rows, cols = np.nonzero(diff >= level)
    return frozenset(Root(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols))


def root_weight(weights: Sequence[int], root: Root) -> int:
    """Weight of a root under a torus."""
    return weights[root.i - 1] - weights[root.j - 1]


def semi_whittaker_character(composition: Composition, offset: int = 0) -> Character:
    """Semi-Whittaker character of an ordered composition.

    Args:
        composition: Blocks of the Levi subgroup
        offset: Index shift applied to every root

    Returns:
        Character equal to one on simple roots inside each block and Zero on
        the simple roots joining two blocks
    """
    char = Character()
    for start, size in zip(composition.offsets(), composition):
        char = char.merge(whittaker_character(size, offset + start))
    return char


def composition_from_simple(rank: int, nonzero: Iterable[int]) -> Composition:
    """Blocks cut out by the simple roots (i, i+1) carrying a nonzero tag."""
    linked = set(nonzero)
    parts: list[int] = []
    size = 1
    for i in range(1, rank):
        if i in linked:
            size += 1
        else:
            parts.append(size)
            size = 1
    parts.append(size)
    return Composition(tuple(parts))


@lru_cache(maxsize=None)
def weyl_permutation(orbit: Partition) -> dict[int, int]:
    """Permutation sending positions of h'_O to positions of h_O.

    Positions are matched by a stable descending sort of h'_O.
    """
    prime = orbit_weights(orbit, WeightVariant.PRIME)
    order = sorted(range(len(prime)), key=lambda k: -prime[k])
    return {order[k] + 1: k + 1 for k in range(len(prime))}


def invert(perm: dict[int, int]) -> dict[int, int]:
    return {v: k for k, v in perm.items()}


@lru_cache(maxsize=None)
def v2_character(orbit: Partition) -> Character:
    """Character on V_2(O).

    Whittaker on the first block, then the U_2 character of the rest.
    """
    char = whittaker_character(orbit[0])
    if len(orbit) > 1:
        char = char.merge(u2_character(orbit.rest).shift(orbit[0]))
    return char


@lru_cache(maxsize=None)
def u2_character(orbit: Partition) -> Character:
    """Representative character on U_2(O), transported from V_2(O)."""
    return v2_character(orbit).relabel(weyl_permutation(orbit))


def v2_roots(orbit: Partition) -> RootSet:
    """Roots of h'_O-weight at least 2."""
    return weighted_roots(orbit_weights(orbit, WeightVariant.PRIME), 2)


def u_o_roots(orbit: Partition) -> RootSet:
    """u1 in the first block, all rows a < p1 into the rest, U_2 of the rest."""
    p = orbit[0]
    roots = set(positive_roots(p))
    roots.update(Root(a, x) for a in range(1, p) for x in range(p + 1, orbit.r + 1))
    if len(orbit) > 1:
        rest = orbit.rest
        roots.update(
            root.shift(p)
            for root in weighted_roots(orbit_weights(rest, WeightVariant.STANDARD), 2)
        )
    return frozenset(roots)


def u_o_character(orbit: Partition) -> Character:
    return v2_character(orbit)


def weight_one_roots(orbit: Partition) -> RootSet:
    """Roots (a, x), a < p1, x beyond the first block, of h'_O-weight exactly 1."""
    prime = orbit_weights(orbit, WeightVariant.PRIME)
    p = orbit[0]
    return frozenset(
        Root(a, x)
        for a in range(1, p)
        for x in range(p + 1, orbit.r + 1)
        if root_weight(prime, Root(a, x)) == 1
    )


def orbit_config(orbit: Partition, variant: ConfigVariant) -> UnipotentConfig:
    """Build one of the three configurations attached to an orbit.

    Args:
        orbit: Unipotent orbit
        variant: V2, U_O or U_O_PRIME

    Returns:
        The configuration with its orbit character (restricted for U'_O)
    """
    if variant is ConfigVariant.V2:
        return UnipotentConfig(orbit.r, v2_roots(orbit), v2_character(orbit))
    if variant is ConfigVariant.U_O:
        return UnipotentConfig(orbit.r, u_o_roots(orbit), u_o_character(orbit))
    roots = closure(u_o_roots(orbit) - weight_one_roots(orbit))
    return UnipotentConfig(orbit.r, roots, u_o_character(orbit).restrict(roots))


def same_parity(orbit: Partition) -> bool:
    """True when all parts are odd or all parts are even."""
    return len({p % 2 for p in orbit}) == 1


def orbit_data(orbit: Partition) -> dict[str, Any]:
    """Weight vectors and root sets attached to an orbit.

    Args:
        orbit: Unipotent orbit

    Returns:
        JSON-ready mapping with h, h_prime, the three configurations, the
        parity flag and the Weyl permutation
    """
    u_o = orbit_config(orbit, ConfigVariant.U_O)
    u_o_prime = orbit_config(orbit, ConfigVariant.U_O_PRIME)
    v2 = orbit_config(orbit, ConfigVariant.V2)
    return {
        "orbit": orbit.to_json(),
        "h": list(orbit_weights(orbit, WeightVariant.STANDARD)),
        "h_prime": list(orbit_weights(orbit, WeightVariant.PRIME)),
        "v2": v2.to_json(),
        "u_o": u_o.to_json(),
        "u_o_prime": u_o_prime.to_json(),
        "same_parity": same_parity(orbit),
        "weyl_permutation": [weyl_permutation(orbit)[i] for i in range(1, orbit.r + 1)],
    }


def check_theta_attachment(n: int, r: int) -> CheckReport:
    """Scan the partitions of r against the theta orbit.

    Every orbit that is not dominated by (n^a b) must have a first part
    exceeding n.

    Args:
        n: Cover degree
        r: Rank

    Returns:
        Report with one violation per offending orbit
    """
    theta = theta_orbit(n, r)
    report = CheckReport(name=f"theta_attachment(n={n}, r={r})")
    violations = []
    candidates = partitions_of(r)
    for orbit in candidates:
        relation = dominance_compare(orbit, theta)
        if relation in (Relation.GREATER, Relation.INCOMPARABLE) and orbit[0] <= n:
            violations.append(
                Violation(
                    kind="attachment",
                    witness={"orbit": orbit.to_json(), "relation": str(relation)},
                    message=f"{orbit} is not below {theta} but has no part above n",
                )
            )
    return report.model_copy(
        update={"checked": len(candidates), "violations": violations}
    )
