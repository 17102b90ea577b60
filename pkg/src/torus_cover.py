"""The finite cover of the torus modulo n-th powers.

The group is H = T~ / s(T^n): pairs (x, zeta) with x a class vector in
((Z/n)^2)^r, flattened as [v_1, u_1, ..., v_r, u_r], and zeta in Z/n, with

    (x, zeta)(y, zeta') = (x + y, zeta + zeta' + sigma(x, y)).

s(T^n) is central and contained in every subgroup of interest, so
centers, maximality statements and indices all descend to H. Every
subgroup considered here is the preimage of a subgroup of the class
group and therefore contains all of mu_n; it is stored by the sorted
integer codes of its classes plus a generating set. Because sigma is
bi-additive on classes, the commutator pairing is the bilinear form of
the matrix S - S^T where S is the cocycle on unit vectors.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.config import resolve_budget
from src.exceptions import (
    BudgetExceededError,
    NotASubgroupError,
    NotContainedError,
    RankMismatchError,
    UnknownNameError,
)
from src.models import CocycleParams, SubgroupSummary
from src.partitions_orbits import Composition
from src.metaplectic_cocycle import sigma_matrix

IntArray = NDArray[np.int64]


@dataclass(frozen=True)
class CoverElement:
    """(class vector, mu_n exponent)."""

    classes: tuple[int, ...]
    zeta: int = 0


@dataclass(eq=False)
class Subgroup:
    """Preimage in H of a subgroup of the class group."""

    name: str
    n: int
    codes: IntArray
    generators: IntArray

    @property
    def torus_classes(self) -> int:
        return int(len(self.codes))

    @property
    def order(self) -> int:
        """Order including the mu_n factor."""
        return self.torus_classes * self.n

    def contains(self, other: Subgroup) -> bool:
        """Whether every class of other lies in this subgroup."""
        return bool(np.isin(other.codes, self.codes, assume_unique=True).all())

    def same_members(self, other: Subgroup) -> bool:
        return bool(np.array_equal(self.codes, other.codes))

    def summary(self) -> SubgroupSummary:
        return SubgroupSummary(
            name=self.name, torus_classes=self.torus_classes, order=self.order
        )


@dataclass(eq=False)
class CoverGroup:
    """H = T~ / s(T^n) for fixed cocycle parameters."""

    params: CocycleParams
    sigma: IntArray
    _all_vectors: Optional[IntArray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def dim(self) -> int:
        return 2 * self.r

    @property
    def class_count(self) -> int:
        return self.n**self.dim

    @property
    def order(self) -> int:
        return self.class_count * self.n

    @property
    def pairing(self) -> IntArray:
        """Commutator pairing matrix S - S^T mod n."""
        return (self.sigma - self.sigma.T) % self.n

    @property
    def weights(self) -> IntArray:
        return self.n ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)

    def encode(self, vectors: IntArray) -> IntArray:
        """Class vectors to integer codes, base n, v_1 most significant."""
        return np.asarray((np.asarray(vectors) % self.n) @ self.weights, dtype=np.int64)

    def decode(self, codes: IntArray) -> IntArray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[:, None] // self.weights[None, :]) % self.n

    def all_vectors(self) -> IntArray:
        """Every class vector, built on first use."""
        if self._all_vectors is None:
            self._all_vectors = self.decode(np.arange(self.class_count, dtype=np.int64))
        return self._all_vectors

    def identity(self) -> CoverElement:
        return CoverElement(tuple([0] * self.dim), 0)

    def multiply(self, a: CoverElement, b: CoverElement) -> CoverElement:
        """Group law (x, z)(y, w) = (x + y, z + w + sigma(x, y)).

        Args:
            a: Left factor
            b: Right factor

        Returns:
            The product in H

        Raises:
            RankMismatchError: If an element has the wrong number of classes
        """
        x = np.array(a.classes, dtype=np.int64)
        y = np.array(b.classes, dtype=np.int64)
        if len(x) != self.dim or len(y) != self.dim:
            raise RankMismatchError(expected=self.dim, actual=max(len(x), len(y)))
        zeta = (a.zeta + b.zeta + int(x @ self.sigma @ y)) % self.n
        return CoverElement(tuple(int(v) for v in (x + y) % self.n), zeta)

    def inverse(self, a: CoverElement) -> CoverElement:
        """Inverse with the cocycle correction on the mu_n coordinate."""
        x = np.array(a.classes, dtype=np.int64)
        neg = (-x) % self.n
        zeta = (-a.zeta - int(x @ self.sigma @ neg)) % self.n
        return CoverElement(tuple(int(v) for v in neg), zeta)

    def commutator(self, a: CoverElement, b: CoverElement) -> int:
        """mu_n exponent of a b a^-1 b^-1."""
        x = np.array(a.classes, dtype=np.int64)
        y = np.array(b.classes, dtype=np.int64)
        return int(x @ self.pairing @ y) % self.n


def require_cover_budget(p: CocycleParams, budget: Optional[int] = None) -> int:
    """Check that the cover for p fits the enumeration budget.

    Args:
        p: Cocycle parameters
        budget: Enumeration budget (defaults to the configured one)

    Returns:
        The cover order n^(2r+1)

    Raises:
        BudgetExceededError: If n^(2r+1) exceeds the budget
    """
    limit = resolve_budget(budget)
    order = p.n ** (2 * p.r + 1)
    if order > limit:
        raise BudgetExceededError(required=order, budget=limit)
    return order


def build_cover(p: CocycleParams, budget: Optional[int] = None) -> CoverGroup:
    """Finite model of the torus cover.

    Args:
        p: Cocycle parameters
        budget: Enumeration budget (defaults to the configured one)

    Returns:
        The group of order n^(2r+1) with its cocycle matrix

    Raises:
        BudgetExceededError: If n^(2r+1) exceeds the enumeration budget
    """
    require_cover_budget(p, budget)
    flat = sigma_matrix(p)
    return CoverGroup(params=p, sigma=np.asarray(flat, dtype=np.int64))


# ============================================================================
# Spans and subgroup construction
# ============================================================================


def span(G: CoverGroup, generators: IntArray) -> IntArray:
    """Sorted codes of the subgroup generated by class vectors."""
    elems = np.zeros((1, G.dim), dtype=np.int64)
    for g in np.asarray(generators, dtype=np.int64).reshape(-1, G.dim) % G.n:
        if not g.any():
            continue
        layers = [(elems + k * g) % G.n for k in range(G.n)]
        stacked = np.concatenate(layers)
        elems = G.decode(np.unique(G.encode(stacked)))
    return np.unique(G.encode(elems))


def _unit(G: CoverGroup, position: int, coordinate: int, scale: int = 1) -> IntArray:
    vec = np.zeros(G.dim, dtype=np.int64)
    vec[2 * position + coordinate] = scale % G.n
    return vec


def _scalar(
    G: CoverGroup, positions: Sequence[int], coordinate: int, scale: int
) -> IntArray:
    vec = np.zeros(G.dim, dtype=np.int64)
    for j in positions:
        vec[2 * j + coordinate] = scale % G.n
    return vec


def _differences(
    G: CoverGroup, positions: Sequence[int], coordinate: int
) -> list[IntArray]:
    gens = []
    for a, b in zip(positions, positions[1:]):
        vec = _unit(G, a, coordinate)
        vec[2 * b + coordinate] = G.n - 1
        gens.append(vec)
    return gens


def _make(G: CoverGroup, name: str, generators: list[IntArray]) -> Subgroup:
    gens = np.array(generators, dtype=np.int64).reshape(-1, G.dim)
    return Subgroup(name=name, n=G.n, codes=span(G, gens), generators=gens)


def _center_gens(G: CoverGroup, positions: Sequence[int], step: int) -> list[IntArray]:
    """Scalar classes on positions whose v and u are multiples of step."""
    return [_scalar(G, positions, 0, step), _scalar(G, positions, 1, step)]


def center_step(n: int, r: int, c: int) -> int:
    """n2 = n / gcd(n, 2rc + r - 1)."""
    return n // gcd(n, 2 * r * c + r - 1)


def _full(G: CoverGroup) -> Subgroup:
    codes = np.arange(G.class_count, dtype=np.int64)
    generators = np.eye(G.dim, dtype=np.int64)
    return Subgroup(name="full", n=G.n, codes=codes, generators=generators)


def _t_o(G: CoverGroup) -> list[IntArray]:
    return [_unit(G, j, 1) for j in range(G.r)]


def _sq(G: CoverGroup, positions: Sequence[int], with_v: bool) -> list[IntArray]:
    """Classes over positions with determinant an n-th power."""
    gens = _differences(G, positions, 1)
    if with_v:
        gens += _differences(G, positions, 0)
    return gens


def _blocks(levi: Optional[Composition], r: int, name: str) -> list[list[int]]:
    if levi is None:
        raise UnknownNameError("Levi subgroup requires a composition", name=name)
    if levi.r != r:
        raise RankMismatchError(
            "Levi composition does not match rank", expected=r, actual=levi.r
        )
    return [
        list(range(start, start + size))
        for start, size in zip(levi.offsets(), levi)
    ]


def _named_generators(
    G: CoverGroup, name: str, levi: Optional[Composition]
) -> list[IntArray]:
    n, r, c = G.n, G.r, G.params.c
    everything = list(range(r))
    center = _center_gens(G, everything, center_step(n, r, c))
    center_n = _center_gens(G, everything, n // gcd(n, r))

    if name == "t_o":
        return _t_o(G)
    if name == "center":
        return center
    if name == "center_n":
        return center_n
    if name == "sq":
        return _sq(G, everything, with_v=True)
    if name == "sq_o":
        return _sq(G, everything, with_v=False)
    if name == "std":
        return center + _t_o(G)
    if name == "center_n_sq_o":
        return center_n + _sq(G, everything, with_v=False)
    if name == "alt":
        v_step = n // gcd(n, r * (2 * r * c + r - 1))
        g = gcd(n, r)
        return [
            _scalar(G, everything, 0, v_step),
            _scalar(G, everything, 1, 1),
            *_differences(G, everything, 1),
            _unit(G, 0, 1, g),
        ]

    blocks = _blocks(levi, r, name)
    if name == "levi_center":
        exponent = r - 1 + 2 * c * r
        return _center_gens(G, everything, n // gcd(n, exponent))
    if name == "levi_center_n":
        return [gen for b in blocks for gen in _center_gens(G, b, n // gcd(n, len(b)))]
    if name == "levi_sq":
        return [gen for b in blocks for gen in _sq(G, b, with_v=True)]
    if name == "levi_sq_o":
        return [gen for b in blocks for gen in _sq(G, b, with_v=False)]
    if name == "levi_center_n_sq_o":
        return _named_generators(G, "levi_center_n", levi) + _named_generators(
            G, "levi_sq_o", levi
        )
    raise UnknownNameError(name=name)


SUBGROUP_NAMES: tuple[str, ...] = (
    "full",
    "t_o",
    "center",
    "center_n",
    "sq",
    "sq_o",
    "std",
    "center_n_sq_o",
    "alt",
)
LEVI_SUBGROUP_NAMES: tuple[str, ...] = (
    "levi_center",
    "levi_center_n",
    "levi_sq",
    "levi_sq_o",
    "levi_center_n_sq_o",
)


def named_subgroup(
    G: CoverGroup,
    name: str,
    levi: Optional[Composition] = None,
) -> Subgroup:
    """A named subgroup of the cover.

    Raises:
        UnknownNameError: If the name is unsupported or a Levi variant lacks levi
    """
    if name == "full":
        return _full(G)
    if name not in SUBGROUP_NAMES + LEVI_SUBGROUP_NAMES:
        raise UnknownNameError(name=name)
    return _make(G, name, _named_generators(G, name, levi))


def subgroup_from_vectors(G: CoverGroup, name: str, vectors: IntArray) -> Subgroup:
    """Wrap an explicit member set, checking it is a subgroup.

    Raises:
        NotASubgroupError: If the classes are not closed under addition
    """
    vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, G.dim) % G.n
    codes = np.unique(G.encode(vectors))
    spanned = span(G, vectors)
    if not np.array_equal(codes, spanned):
        raise NotASubgroupError(name=name)
    return Subgroup(name=name, n=G.n, codes=codes, generators=vectors)


# ============================================================================
# Centers, maximality and indices
# ============================================================================


def _centralizing(
    G: CoverGroup, candidates: IntArray, generators: IntArray
) -> IntArray:
    """Mask of candidate vectors pairing trivially with every generator."""
    if len(generators) == 0:
        return np.ones(len(candidates), dtype=bool)
    values = (candidates @ G.pairing @ generators.T) % G.n
    return ~values.any(axis=1)


def centralizer(G: CoverGroup, S: Subgroup, ambient: Subgroup, name: str) -> Subgroup:
    """Elements of ambient commuting with every generator of S.

    Args:
        G: Cover group
        S: Subgroup whose centralizer is taken
        ambient: Group to search in
        name: Name of the resulting subgroup

    Returns:
        The centralizer of S in ambient
    """
    vectors = G.decode(ambient.codes)
    mask = _centralizing(G, vectors, S.generators)
    return Subgroup(
        name=name, n=G.n, codes=ambient.codes[mask], generators=vectors[mask]
    )


def center_bruteforce(G: CoverGroup) -> Subgroup:
    """Exact center of H by scanning every class against the unit vectors."""
    vectors = G.all_vectors()
    mask = _centralizing(G, vectors, np.eye(G.dim, dtype=np.int64))
    codes = np.arange(G.class_count, dtype=np.int64)[mask]
    return Subgroup(
        name="center_bruteforce", n=G.n, codes=codes, generators=vectors[mask]
    )


def center_of(G: CoverGroup, H: Subgroup) -> Subgroup:
    """Center of the subgroup H."""
    return centralizer(G, H, H, name=f"center({H.name})")


def is_abelian(G: CoverGroup, S: Subgroup) -> bool:
    """Whether the pairing vanishes on every pair of generators."""
    values = (S.generators @ G.pairing @ S.generators.T) % G.n
    return not values.any()


def is_maximal_abelian(
    G: CoverGroup, S: Subgroup, ambient: Optional[Subgroup] = None
) -> bool:
    """Whether S is abelian and equal to its centralizer in the ambient group.

    Raises:
        NotASubgroupError: If S is not contained in the ambient group
    """
    ambient = ambient if ambient is not None else _full(G)
    if not ambient.contains(S):
        raise NotASubgroupError(
            "Subgroup is not contained in the ambient group",
            name=S.name,
            details={"ambient": ambient.name},
        )
    if not is_abelian(G, S):
        return False
    centralizing = centralizer(G, S, ambient, name="centralizer")
    return centralizing.torus_classes == S.torus_classes


def index(A: Subgroup, B: Subgroup) -> int:
    """[A : B].

    Raises:
        NotContainedError: If B is not a subgroup of A
    """
    if not A.contains(B):
        raise NotContainedError(inner=B.name, outer=A.name)
    return A.order // B.order


def index_of_names(
    G: CoverGroup,
    numerator: str,
    denominator: str,
    levi: Optional[Composition] = None,
) -> int:
    """Index of one named subgroup in another.

    Args:
        G: Cover group
        numerator: Name of the larger subgroup
        denominator: Name of the smaller subgroup
        levi: Composition for the Levi variants

    Returns:
        [numerator : denominator]

    Raises:
        UnknownNameError: If a name is unsupported
        NotContainedError: If the denominator is not inside the numerator
    """
    return index(
        named_subgroup(G, numerator, levi), named_subgroup(G, denominator, levi)
    )

