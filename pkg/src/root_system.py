"""Type A root combinatorics and unipotent configurations.

A subgroup generated by root subgroups of GL(r) is represented by its set
of roots (i, j), closed under (i, j) + (j, l) = (i, l). A character on it
is a map from roots to coefficient tags; only roots that are not sums of
two member roots may carry a non-zero tag.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional

from src.constants import TagKind
from src.exceptions import ConfigMismatchError, InvalidParameterError


class Root(NamedTuple):
    """The root (i, j), 1-based, i != j."""

    i: int
    j: int

    @property
    def is_positive(self) -> bool:
        return self.i < self.j

    def compose(self, other: Root) -> Optional[Root]:
        """(i, j) + (j, l) = (i, l) when it is a root, else None."""
        if self.j == other.i and self.i != other.j:
            return Root(self.i, other.j)
        return None

    def shift(self, offset: int) -> Root:
        return Root(self.i + offset, self.j + offset)

    def relabel(self, perm: Mapping[int, int]) -> Root:
        return Root(perm.get(self.i, self.i), perm.get(self.j, self.j))

    def to_json(self) -> list[int]:
        return [self.i, self.j]


RootSet = frozenset[Root]


@dataclass(frozen=True, slots=True)
class Tag:
    """Coefficient tag of a character on one root subgroup."""

    kind: TagKind
    param_id: Optional[int] = None

    @property
    def is_zero(self) -> bool:
        return self.kind is TagKind.ZERO

    @property
    def is_definitely_nonzero(self) -> bool:
        return self.kind in (TagKind.ONE, TagKind.NONZERO_PARAM)

    def to_json(self, root: Root) -> dict[str, Any]:
        payload: dict[str, Any] = {"root": root.to_json(), "tag": str(self.kind)}
        if self.param_id is not None:
            payload["id"] = self.param_id
        return payload


ZERO = Tag(TagKind.ZERO)
ONE = Tag(TagKind.ONE)


def param(param_id: int) -> Tag:
    """Arbitrary parameter tag, possibly zero."""
    return Tag(TagKind.PARAM, param_id)


def nonzero_param(param_id: int) -> Tag:
    return Tag(TagKind.NONZERO_PARAM, param_id)


class Character:
    """Immutable map from roots to tags; Zero tags are not stored."""

    __slots__ = ("_tags",)

    def __init__(self, tags: Optional[Mapping[Root, Tag]] = None) -> None:
        cleaned = {
            Root(*root): tag for root, tag in (tags or {}).items() if not tag.is_zero
        }
        object.__setattr__(self, "_tags", cleaned)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Character is immutable")

    def __getitem__(self, root: Root) -> Tag:
        return self._tags.get(root, ZERO)

    def __iter__(self) -> Iterator[Root]:
        return iter(sorted(self._tags))

    def __len__(self) -> int:
        return len(self._tags)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Character) and self._tags == other._tags

    def __hash__(self) -> int:
        return hash(frozenset(self._tags.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{tuple(r)}:{self._tags[r].kind}" for r in self)
        return f"Character({inner})"

    @property
    def support(self) -> RootSet:
        return frozenset(self._tags)

    def items(self) -> list[tuple[Root, Tag]]:
        return [(root, self._tags[root]) for root in self]

    def restrict(self, roots: Iterable[Root]) -> Character:
        """Keep only the tags on the given roots; the rest become Zero."""
        keep = set(roots)
        return Character({r: t for r, t in self._tags.items() if r in keep})

    def with_tag(self, root: Root, tag: Tag) -> Character:
        tags = dict(self._tags)
        tags[root] = tag
        return Character(tags)

    def merge(self, other: Character) -> Character:
        """Union of tags; other wins on shared roots."""
        tags = dict(self._tags)
        tags.update(other._tags)
        return Character(tags)

    def shift(self, offset: int) -> Character:
        return Character({r.shift(offset): t for r, t in self._tags.items()})

    def relabel(self, perm: Mapping[int, int]) -> Character:
        return Character({r.relabel(perm): t for r, t in self._tags.items()})

    def to_json(self) -> list[dict[str, Any]]:
        return [tag.to_json(root) for root, tag in self.items()]

    @classmethod
    def from_json(cls, entries: Iterable[Mapping[str, Any]]) -> Character:
        tags: dict[Root, Tag] = {}
        for entry in entries:
            i, j = entry["root"]
            tags[Root(int(i), int(j))] = Tag(TagKind(entry["tag"]), entry.get("id"))
        return cls(tags)


# ============================================================================
# Root set combinatorics
# ============================================================================


def positive_roots(r: int) -> RootSet:
    """Roots (i, j) with i < j of GL(r).

    Args:
        r: Rank

    Returns:
        The r(r-1)/2 roots of the upper triangular unipotent radical
    """
    return frozenset(Root(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1))


def simple_roots(r: int) -> list[Root]:
    """(1, 2), (2, 3), ..., (r-1, r)."""
    return [Root(i, i + 1) for i in range(1, r)]


def composites(
    left: Iterable[Root], right: Iterable[Root]
) -> list[tuple[Root, Root, Root]]:
    """All (a, b, a+b) and (b, a, b+a) with a in left, b in right that are roots."""
    right = list(right)
    found: list[tuple[Root, Root, Root]] = []
    for a in left:
        for b in right:
            ab = a.compose(b)
            if ab is not None:
                found.append((a, b, ab))
            ba = b.compose(a)
            if ba is not None:
                found.append((b, a, ba))
    return found


def closure(roots: Iterable[Root]) -> RootSet:
    """Smallest set containing roots and closed under composition."""
    closed = set(roots)
    frontier = list(closed)
    while frontier:
        new: list[Root] = []
        for a in frontier:
            for b in list(closed):
                for c in (a.compose(b), b.compose(a)):
                    if c is not None and c not in closed:
                        closed.add(c)
                        new.append(c)
        frontier = new
    return frozenset(closed)


def is_closed(roots: Iterable[Root]) -> bool:
    """Whether every composite of two members is again a member."""
    roots = frozenset(roots)
    return all(c in roots for _, _, c in composites(roots, roots))


def is_abelian(roots: Iterable[Root]) -> bool:
    """No two member roots compose to a root."""
    roots = list(roots)
    return not composites(roots, roots)


def sum_roots(roots: RootSet) -> RootSet:
    """Members that are a composite of two members."""
    return frozenset(c for _, _, c in composites(roots, roots) if c in roots)


# ============================================================================
# Unipotent configurations
# ============================================================================


@dataclass(frozen=True)
class UnipotentConfig:
    """A closed root set with a character, in GL(rank)."""

    rank: int
    roots: RootSet
    character: Character = field(default_factory=Character)

    def __post_init__(self) -> None:
        roots = frozenset(Root(*r) for r in self.roots)
        for root in roots:
            inside = 1 <= root.i <= self.rank and 1 <= root.j <= self.rank
            if root.i == root.j or not inside:
                raise InvalidParameterError(
                    "Root outside GL(rank)", parameter="root", value=tuple(root)
                )
        object.__setattr__(self, "roots", closure(roots))

        stray = self.character.support - self.roots
        if stray:
            raise ConfigMismatchError(
                "Character supported outside the root set",
                reason="support",
                details={"roots": sorted(tuple(r) for r in stray)},
            )
        bad = self.character.support & sum_roots(self.roots)
        if bad:
            raise ConfigMismatchError(
                "Character not trivial on commutators",
                reason="well_defined",
                details={"roots": sorted(tuple(r) for r in bad)},
            )

    def __len__(self) -> int:
        return len(self.roots)

    def tag(self, root: Root) -> Tag:
        return self.character[root]

    def with_roots(
        self, roots: Iterable[Root], character: Optional[Character] = None
    ) -> UnipotentConfig:
        """Same rank with new roots and, optionally, a new character.

        Args:
            roots: Root set, closed on construction
            character: Replacement character (defaults to the current one)

        Raises:
            ConfigMismatchError: If the character does not fit the new roots
        """
        character = self.character if character is None else character
        return UnipotentConfig(self.rank, frozenset(roots), character)

    def relabel(self, perm: Mapping[int, int]) -> UnipotentConfig:
        """Conjugate by a permutation of the coordinates 1..rank."""
        return UnipotentConfig(
            self.rank,
            frozenset(r.relabel(perm) for r in self.roots),
            self.character.relabel(perm),
        )

    def sorted_roots(self) -> list[Root]:
        return sorted(self.roots)

    def to_json(self) -> dict[str, Any]:
        return {
            "rank": self.rank,
            "roots": [r.to_json() for r in self.sorted_roots()],
            "character": self.character.to_json(),
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> UnipotentConfig:
        return cls(
            int(payload["rank"]),
            frozenset(Root(int(i), int(j)) for i, j in payload["roots"]),
            Character.from_json(payload.get("character", [])),
        )


def whittaker_character(size: int, offset: int = 0) -> Character:
    """One on every simple root of a block of the given size."""
    return Character({Root(i, i + 1).shift(offset): ONE for i in range(1, size)})


def rows(rank: int, first: int, last: int) -> RootSet:
    """All positive roots (i, x) with first <= i <= last."""
    return frozenset(
        Root(i, x) for i in range(first, last + 1) for x in range(i + 1, rank + 1)
    )
