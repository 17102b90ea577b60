"""Tests for root combinatorics and unipotent configurations."""

import pytest

from src.constants import TagKind
from src.exceptions import ConfigMismatchError, InvalidParameterError
from src.root_system import (
    ONE,
    Character,
    Root,
    UnipotentConfig,
    closure,
    is_abelian,
    is_closed,
    param,
    positive_roots,
    rows,
    simple_roots,
    sum_roots,
    whittaker_character,
)


class TestRoots:
    """Test suite for Root and root sets."""

    def test_compose(self) -> None:
        assert Root(1, 2).compose(Root(2, 4)) == Root(1, 4)
        assert Root(1, 2).compose(Root(3, 4)) is None
        assert Root(1, 2).compose(Root(2, 1)) is None

    def test_positive_and_simple(self) -> None:
        assert len(positive_roots(4)) == 6
        assert simple_roots(3) == [Root(1, 2), Root(2, 3)]

    def test_closure(self) -> None:
        """Closure adds (1,3) to {(1,2), (2,3)}."""
        assert closure({Root(1, 2), Root(2, 3)}) == positive_roots(3)
        assert not is_closed({Root(1, 2), Root(2, 3)})
        assert is_closed(positive_roots(4))

    def test_abelian_and_sums(self) -> None:
        assert is_abelian({Root(1, 3), Root(2, 3)})
        assert not is_abelian({Root(1, 2), Root(2, 3)})
        assert sum_roots(positive_roots(3)) == {Root(1, 3)}

    def test_rows(self) -> None:
        assert rows(3, 2, 2) == {Root(2, 3)}
        assert rows(3, 1, 0) == frozenset()


class TestCharacter:
    """Test suite for Character."""

    def test_zero_tags_dropped(self) -> None:
        char = Character({Root(1, 2): ONE}).restrict({Root(2, 3)})
        assert len(char) == 0
        assert char[Root(1, 2)].is_zero

    def test_immutable(self) -> None:
        with pytest.raises(AttributeError):
            Character().extra = 1  # type: ignore[attr-defined]

    def test_json_keeps_param_ids(self) -> None:
        char = Character({Root(1, 2): param(3), Root(2, 3): ONE})
        payload = char.to_json()
        assert payload[0] == {"root": [1, 2], "tag": str(TagKind.PARAM), "id": 3}
        assert Character.from_json(payload) == char

    def test_shift_and_relabel(self) -> None:
        char = whittaker_character(2, offset=1)
        assert char.support == {Root(2, 3)}
        assert char.relabel({2: 1, 1: 2}).support == {Root(1, 3)}


class TestUnipotentConfig:
    """Test suite for UnipotentConfig."""

    def test_roots_are_closed(self) -> None:
        cfg = UnipotentConfig(3, frozenset({Root(1, 2), Root(2, 3)}))
        assert cfg.roots == positive_roots(3)

    def test_rejects_root_outside_rank(self) -> None:
        with pytest.raises(InvalidParameterError):
            UnipotentConfig(2, frozenset({Root(1, 3)}))

    def test_rejects_character_on_commutator(self) -> None:
        """A character cannot be nontrivial on a sum of two member roots."""
        with pytest.raises(ConfigMismatchError):
            UnipotentConfig(3, positive_roots(3), Character({Root(1, 3): ONE}))

    def test_rejects_stray_support(self) -> None:
        with pytest.raises(ConfigMismatchError):
            UnipotentConfig(3, frozenset({Root(1, 2)}), Character({Root(2, 3): ONE}))

    def test_json(self) -> None:
        cfg = UnipotentConfig(3, positive_roots(3), whittaker_character(3))
        payload = cfg.to_json()
        assert payload["roots"] == [[1, 2], [1, 3], [2, 3]]
        assert UnipotentConfig.from_json(payload) == cfg
