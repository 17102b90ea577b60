"""Tests for partitions, dominance and orbit data."""

import numpy as np
import pytest

from src.constants import ConfigVariant, Relation, WeightVariant
from src.exceptions import InvalidParameterError, MismatchedSizeError
from src.partitions_orbits import (
    Composition,
    Partition,
    check_theta_attachment,
    composition_from_simple,
    compositions_of,
    dominance_compare,
    orbit_config,
    orbit_data,
    orbit_weights,
    partitions_of,
    root_weight,
    same_parity,
    semi_whittaker_character,
    theta_orbit,
    u_o_roots,
    v2_roots,
    weight_one_roots,
    weighted_roots,
    weyl_permutation,
)
from src.root_system import Root, positive_roots

MIRRORED = {
    Relation.GREATER: Relation.LESS,
    Relation.LESS: Relation.GREATER,
    Relation.EQUAL: Relation.EQUAL,
    Relation.INCOMPARABLE: Relation.INCOMPARABLE,
}


class TestCompositions:
    """Test suite for Composition and Partition."""

    def test_rejects_empty_and_non_positive(self) -> None:
        """Parts must be positive and nonempty."""
        with pytest.raises(InvalidParameterError):
            Composition(())
        with pytest.raises(InvalidParameterError):
            Composition((2, 0))

    def test_partition_must_be_decreasing(self) -> None:
        """Partitions are weakly decreasing."""
        with pytest.raises(InvalidParameterError):
            Partition((1, 2))

    def test_offsets_and_rank(self) -> None:
        """Offsets are the 0-based block starts."""
        comp = Composition((2, 1, 3))
        assert comp.r == 6
        assert comp.offsets() == [0, 2, 3]
        assert str(comp) == "(2,1,3)"

    def test_partitions_of_four(self) -> None:
        """Partitions come largest first."""
        assert [p.to_json() for p in partitions_of(4)] == [
            [4],
            [3, 1],
            [2, 2],
            [2, 1, 1],
            [1, 1, 1, 1],
        ]

    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
    def test_compositions_count(self, r: int) -> None:
        """There are 2^(r-1) compositions of r."""
        comps = compositions_of(r)
        assert len(comps) == 2 ** (r - 1)
        assert len({c.parts for c in comps}) == len(comps)

    def test_partitions_of_rejects_zero(self) -> None:
        with pytest.raises(InvalidParameterError):
            partitions_of(0)


class TestDominance:
    """Test suite for dominance_compare."""

    @pytest.mark.parametrize(
        ("left", "right", "expected"),
        [
            ((3, 1), (2, 2), Relation.GREATER),
            ((2, 2), (3, 1), Relation.LESS),
            ((2, 2), (2, 2), Relation.EQUAL),
            ((3, 1, 1, 1), (2, 2, 2), Relation.INCOMPARABLE),
        ],
    )
    def test_relations(
        self,
        left: tuple[int, ...],
        right: tuple[int, ...],
        expected: Relation,
    ) -> None:
        """Dominance compares partial sums."""
        assert dominance_compare(Partition(left), Partition(right)) is expected

    def test_mismatched_sizes(self) -> None:
        with pytest.raises(MismatchedSizeError):
            dominance_compare(Partition((3,)), Partition((2, 2)))

    @pytest.mark.parametrize("r", range(1, 13))
    def test_partial_order_laws(self, r: int) -> None:
        """Dominance is reflexive, antisymmetric and transitive."""
        parts = partitions_of(r)
        relations = [[dominance_compare(p, q) for q in parts] for p in parts]
        at_least = (Relation.GREATER, Relation.EQUAL)
        geq = np.array([[rel in at_least for rel in row] for row in relations])
        size = len(parts)

        assert all(relations[i][i] is Relation.EQUAL for i in range(size))
        assert np.array_equal(geq & geq.T, np.eye(size, dtype=bool))
        composed = (geq.astype(np.int64) @ geq.astype(np.int64)) > 0
        assert not np.any(composed & ~geq)
        for i in range(size):
            for j in range(size):
                assert relations[j][i] is MIRRORED[relations[i][j]]


class TestThetaOrbit:
    """Test suite for the orbit attached to theta representations."""

    @pytest.mark.parametrize(
        ("n", "r", "expected"),
        [
            (3, 7, [3, 3, 1]),
            (2, 4, [2, 2]),
            (4, 3, [3]),
            (2, 5, [2, 2, 1]),
        ],
    )
    def test_theta_orbit(self, n: int, r: int, expected: list[int]) -> None:
        """r = a*n + b gives (n^a b)."""
        assert theta_orbit(n, r).to_json() == expected

    def test_rejects_small_degree(self) -> None:
        with pytest.raises(InvalidParameterError):
            theta_orbit(1, 4)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("r", [3, 6, 8])
    def test_attachment_scan(self, n: int, r: int) -> None:
        """Orbits above or beside theta all have a part larger than n."""
        report = check_theta_attachment(n, r)
        assert report.passed
        assert report.checked == len(partitions_of(r))


class TestWeights:
    """Test suite for weight vectors and weighted root sets."""

    def test_weights_of_331(self) -> None:
        """Standard and prime weights of (3,3,1)."""
        orbit = Partition((3, 3, 1))
        assert list(orbit_weights(orbit, WeightVariant.STANDARD)) == [
            2, 2, 0, 0, 0, -2, -2,
        ]
        assert list(orbit_weights(orbit, WeightVariant.PRIME)) == [
            2, 0, -2, 2, 0, 0, -2,
        ]

    def test_weighted_roots_level_two(self) -> None:
        """Weight at least 2 for the regular orbit of GL(3) is every positive root."""
        weights = orbit_weights(Partition((3,)))
        assert weighted_roots(weights, 2) == positive_roots(3)

    def test_weighted_roots_rejects_negative_level(self) -> None:
        with pytest.raises(InvalidParameterError):
            weighted_roots([1, 0], -1)

    @pytest.mark.parametrize("r", range(1, 9))
    def test_prime_weights_permute_standard(self, r: int) -> None:
        """h and h' hold the same multiset of block weights."""
        for orbit in partitions_of(r):
            standard = orbit_weights(orbit, WeightVariant.STANDARD)
            prime = orbit_weights(orbit, WeightVariant.PRIME)
            assert sorted(standard) == sorted(prime)

    @pytest.mark.parametrize("variant", list(WeightVariant))
    def test_weighted_roots_shrink_with_level(self, variant: WeightVariant) -> None:
        for orbit in partitions_of(6):
            weights = orbit_weights(orbit, variant)
            for level in range(2 * orbit[0]):
                assert weighted_roots(weights, level + 1) <= weighted_roots(
                    weights, level
                )

    def test_weighted_roots_level_zero(self) -> None:
        """Level 0 keeps exactly the roots of nonnegative weight."""
        weights = orbit_weights(Partition((3, 2, 1)))
        roots = weighted_roots(weights, 0)
        expected = {
            Root(i, j)
            for i in range(1, 7)
            for j in range(1, 7)
            if i != j and root_weight(weights, Root(i, j)) >= 0
        }

        assert roots == expected
        assert positive_roots(6) <= roots
        assert len(weighted_roots([0, 0, 0, 0], 0)) == 12

    def test_weyl_permutation_is_bijection(self) -> None:
        """The permutation is a bijection of positions."""
        perm = weyl_permutation(Partition((3, 3, 1)))
        assert sorted(perm) == list(range(1, 8))
        assert sorted(perm.values()) == list(range(1, 8))


class TestOrbitConfigs:
    """Test suite for V_2(O), U_O and U'_O."""

    def test_u_o_of_31(self) -> None:
        """U_O(3,1) is U_3 plus the column above the last index."""
        expected = positive_roots(3) | {Root(1, 4), Root(2, 4)}
        assert u_o_roots(Partition((3, 1))) == expected

    def test_v2_of_31_size(self) -> None:
        """V_2(3,1) has the same size as U_O(3,1)."""
        orbit = Partition((3, 1))
        assert len(v2_roots(orbit)) == len(u_o_roots(orbit)) == 5

    def test_u_o_prime_inside_u_o(self) -> None:
        """U'_O is a closed subset of U_O."""
        orbit = Partition((3, 2))
        prime = orbit_config(orbit, ConfigVariant.U_O_PRIME)
        assert weight_one_roots(orbit) == {Root(1, 4), Root(2, 5)}
        assert prime.roots <= u_o_roots(orbit)

    def test_v2_character_is_whittaker_on_first_block(self) -> None:
        """psi is one on the simple roots of the first block."""
        config = orbit_config(Partition((3, 1)), ConfigVariant.V2)
        assert config.tag(Root(1, 2)).is_definitely_nonzero
        assert config.tag(Root(2, 3)).is_definitely_nonzero

    def test_orbit_data_payload(self) -> None:
        """orbit_data exposes both weight vectors and the three configurations."""
        data = orbit_data(Partition((3, 3, 1)))
        assert data["h"] == [2, 2, 0, 0, 0, -2, -2]
        assert data["h_prime"] == [2, 0, -2, 2, 0, 0, -2]
        assert {"v2", "u_o", "u_o_prime"} <= set(data)
        assert data["same_parity"] is True

    def test_same_parity(self) -> None:
        assert same_parity(Partition((3, 1)))
        assert not same_parity(Partition((2, 1)))


class TestSemiWhittaker:
    """Test suite for semi-Whittaker characters."""

    def test_character_support(self) -> None:
        """Simple roots inside blocks only."""
        char = semi_whittaker_character(Composition((2, 1, 2)))
        assert char.support == {Root(1, 2), Root(4, 5)}

    def test_composition_from_simple(self) -> None:
        """Nonzero simple roots glue positions into blocks."""
        assert composition_from_simple(4, {1, 3}).to_json() == [2, 2]
        assert composition_from_simple(3, set()).to_json() == [1, 1, 1]
        assert composition_from_simple(3, {1, 2}).to_json() == [3]
