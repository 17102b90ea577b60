"""Tests for the finite torus cover and its named subgroups."""

import numpy as np
import pytest

from src.exceptions import (
    BudgetExceededError,
    NotASubgroupError,
    NotContainedError,
    RankMismatchError,
    UnknownNameError,
)
from src.metaplectic_cocycle import make_params
from src.partitions_orbits import Composition
from src.torus_cover import (
    SUBGROUP_NAMES,
    CoverElement,
    CoverGroup,
    build_cover,
    center_bruteforce,
    center_of,
    center_step,
    index,
    index_of_names,
    is_abelian,
    is_maximal_abelian,
    named_subgroup,
    subgroup_from_vectors,
)


class TestCoverGroup:
    """Test suite for the group law of the cover."""

    def test_orders(self, cover_2_2: CoverGroup) -> None:
        """|H| = n^(2r+1)."""
        assert cover_2_2.class_count == 16
        assert cover_2_2.order == 32

    def test_encode_decode(self, cover_2_2: CoverGroup) -> None:
        codes = np.arange(cover_2_2.class_count)
        assert np.array_equal(cover_2_2.encode(cover_2_2.decode(codes)), codes)

    def test_inverse(self, cover_2_2: CoverGroup) -> None:
        """a * a^-1 is the identity."""
        a = CoverElement((1, 1, 0, 1), 1)
        assert cover_2_2.multiply(a, cover_2_2.inverse(a)) == cover_2_2.identity()

    def test_commutator_matches_pairing(self, cover_2_2: CoverGroup) -> None:
        """Commutator of diag(pi,1) and diag(1,pi) is (pi, pi)."""
        a = CoverElement((1, 0, 0, 0))
        b = CoverElement((0, 0, 1, 0))
        assert cover_2_2.commutator(a, b) == 1

    def test_rank_mismatch(self, cover_2_2: CoverGroup) -> None:
        with pytest.raises(RankMismatchError):
            cover_2_2.multiply(CoverElement((1, 0)), cover_2_2.identity())

    def test_budget(self) -> None:
        with pytest.raises(BudgetExceededError):
            build_cover(make_params(2, 3, 0, 3), budget=100)


class TestNamedSubgroups:
    """Test suite for named subgroups."""

    @pytest.mark.parametrize("name", SUBGROUP_NAMES)
    def test_contained_in_full(self, cover_2_2: CoverGroup, name: str) -> None:
        """Every named subgroup is a subgroup of H containing mu_n."""
        full = named_subgroup(cover_2_2, "full")
        subgroup = named_subgroup(cover_2_2, name)
        assert full.contains(subgroup)
        assert full.order % subgroup.order == 0
        assert subgroup.order % cover_2_2.n == 0

    def test_t_o_order(self, cover_2_2: CoverGroup) -> None:
        """T_o is the unit part: n^r classes."""
        assert named_subgroup(cover_2_2, "t_o").torus_classes == 4

    def test_unknown_name(self, cover_2_2: CoverGroup) -> None:
        with pytest.raises(UnknownNameError):
            named_subgroup(cover_2_2, "borel")

    def test_levi_requires_composition(self, cover_2_2: CoverGroup) -> None:
        with pytest.raises(UnknownNameError):
            named_subgroup(cover_2_2, "levi_sq")

    def test_levi_rank_mismatch(self, cover_2_2: CoverGroup) -> None:
        with pytest.raises(RankMismatchError):
            named_subgroup(cover_2_2, "levi_sq", Composition((2, 1)))

    def test_levi_center_equals_center(self) -> None:
        G = build_cover(make_params(3, 7, 1, 3))
        levi = named_subgroup(G, "levi_center", Composition((2, 1)))
        assert levi.same_members(named_subgroup(G, "center"))

    def test_subgroup_from_vectors(self, cover_2_2: CoverGroup) -> None:
        """Explicit member sets must be closed."""
        pair = np.array([[0, 0, 0, 0], [0, 1, 0, 1]])
        good = subgroup_from_vectors(cover_2_2, "pair", pair)
        assert good.torus_classes == 2
        with pytest.raises(NotASubgroupError):
            subgroup_from_vectors(
                cover_2_2, "bad", np.array([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
            )


class TestCenters:
    """Test suite for the center formula."""

    @pytest.mark.parametrize(
        ("n", "q", "c", "r"),
        [(2, 3, 0, 1), (2, 3, 1, 2), (2, 3, 0, 3), (3, 7, 0, 2), (3, 7, 2, 3)],
    )
    def test_formula_matches_bruteforce(
        self, n: int, q: int, c: int, r: int
    ) -> None:
        G = build_cover(make_params(n, q, c, r))
        assert center_bruteforce(G).same_members(named_subgroup(G, "center"))

    def test_center_step(self) -> None:
        """n / gcd(n, 2rc + r - 1)."""
        assert center_step(2, 2, 0) == 2
        assert center_step(3, 2, 1) == 3
        assert center_step(4, 3, 0) == 2

    def test_center_of_abelian_subgroup(self, cover_2_2: CoverGroup) -> None:
        """An abelian subgroup is its own center."""
        std = named_subgroup(cover_2_2, "std")
        assert center_of(cover_2_2, std).same_members(std)

    @pytest.mark.parametrize(
        ("n", "q", "c", "r"),
        [(2, 3, 0, 2), (2, 3, 1, 2), (2, 3, 0, 3), (3, 7, 0, 2), (3, 7, 2, 3)],
    )
    def test_center_of_sq_is_center_n(self, n: int, q: int, c: int, r: int) -> None:
        """Inside sq only the scalars with an n-th power determinant commute."""
        G = build_cover(make_params(n, q, c, r))
        sq_center = center_of(G, named_subgroup(G, "sq"))
        assert sq_center.same_members(named_subgroup(G, "center_n"))


class TestMaximalAbelian:
    """Test suite for maximality and indices."""

    @pytest.mark.parametrize(("n", "q", "r"), [(2, 3, 2), (2, 3, 3), (3, 7, 2)])
    def test_standard_is_maximal(self, n: int, q: int, r: int) -> None:
        G = build_cover(make_params(n, q, 0, r))
        assert is_maximal_abelian(G, named_subgroup(G, "std"))

    def test_center_n_sq_o_maximal_in_sq(self) -> None:
        G = build_cover(make_params(2, 3, 0, 3))
        sq = named_subgroup(G, "sq")
        assert is_maximal_abelian(G, named_subgroup(G, "center_n_sq_o"), sq)

    @pytest.mark.parametrize(("n", "q", "c"), [(2, 3, 0), (2, 3, 1), (3, 7, 0)])
    def test_center_n_sq_o_contains_sq_center(self, n: int, q: int, c: int) -> None:
        G = build_cover(make_params(n, q, c, 2))
        sq = named_subgroup(G, "sq")
        subgroup = named_subgroup(G, "center_n_sq_o")

        assert is_maximal_abelian(G, subgroup, sq)
        assert subgroup.contains(center_of(G, sq))

    def test_full_is_not_abelian(self, cover_2_2: CoverGroup) -> None:
        full = named_subgroup(cover_2_2, "full")
        assert not is_abelian(cover_2_2, full)
        assert not is_maximal_abelian(cover_2_2, full)

    def test_ambient_must_contain(self, cover_2_2: CoverGroup) -> None:
        with pytest.raises(NotASubgroupError):
            is_maximal_abelian(
                cover_2_2,
                named_subgroup(cover_2_2, "full"),
                named_subgroup(cover_2_2, "t_o"),
            )

    def test_index(self, cover_2_2: CoverGroup) -> None:
        assert index_of_names(cover_2_2, "full", "t_o") == 4
        with pytest.raises(NotContainedError):
            index(named_subgroup(cover_2_2, "t_o"), named_subgroup(cover_2_2, "full"))


class TestAltSubgroup:
    """Test suite for the tame maximal abelian construction."""

    @pytest.fixture(params=[(2, 3, 0, 2), (2, 3, 0, 3), (3, 7, 0, 2)])
    def cover(self, request: pytest.FixtureRequest) -> CoverGroup:
        return build_cover(make_params(*request.param))

    def test_alt_is_maximal_abelian(self, cover: CoverGroup) -> None:
        assert is_maximal_abelian(cover, named_subgroup(cover, "alt"))

    def test_contains_center(self, cover: CoverGroup) -> None:
        alt = named_subgroup(cover, "alt")
        assert alt.contains(named_subgroup(cover, "center"))

    def test_same_order_as_standard(self, cover: CoverGroup) -> None:
        """Maximal abelian subgroups share the maximal isotropic order."""
        alt = named_subgroup(cover, "alt")
        std = named_subgroup(cover, "std")

        assert std.contains(named_subgroup(cover, "center"))
        assert alt.order == std.order
