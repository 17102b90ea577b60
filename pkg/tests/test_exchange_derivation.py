"""Tests for the derivation calculus and its checker."""

import json
from dataclasses import replace

import pytest

from src.constants import (
    ConfigVariant,
    ExpandMode,
    Relation,
    Rule,
    Status,
    StepRelation,
)
from src.exceptions import (
    ConfigMismatchError,
    IncompleteWitnessesError,
    InvalidParameterError,
    TraceFormatError,
    UnsupportedOrbitError,
)
from src.exchange_derivation import (
    DerivationTrace,
    Step,
    apply_conjugate,
    apply_exchange,
    apply_expand,
    axiom_verdict,
    check_trace,
    classify_rank,
    derive_exchange_trace,
    derive_orbit_trace,
    verify_quadruple,
)
from src.partitions_orbits import (
    Partition,
    orbit_config,
    partitions_of,
    same_parity,
    theta_orbit,
    u_o_roots,
)
from src.root_system import Root

ORBIT_31 = Partition((3, 1))


def _supported_orbits(ranks: range) -> list[tuple[int, Partition]]:
    """Orbits with a scripted trace: a part above n, or the theta orbit."""
    return [
        (n, orbit)
        for n in (2, 3, 4)
        for r in ranks
        for orbit in partitions_of(r)
        if orbit[0] > n or orbit == theta_orbit(n, r)
    ]


SUPPORTED_ORBITS = _supported_orbits(range(1, 7))
LARGE_SUPPORTED_ORBITS = _supported_orbits(range(7, 11))


def _first_expand(trace: DerivationTrace, mode: ExpandMode) -> int:
    for index, step in enumerate(trace.steps):
        if step.rule is Rule.EXPAND and step.evidence["mode"] == str(mode):
            return index
    raise AssertionError(f"no {mode} expansion in trace")


class TestRootExchange:
    """Test suite for quadruple verification and exchange."""

    def test_single_step_for_31(self) -> None:
        """V_2(3,1) reaches U_(3,1) by exchanging (4,3) for (2,4)."""
        trace = derive_exchange_trace(ORBIT_31)
        assert len(trace.steps) == 1
        step = trace.steps[0]
        assert step.rule is Rule.ROOT_EXCHANGE
        assert step.evidence["X"] == [[4, 3]]
        assert step.evidence["Y"] == [[2, 4]]
        assert step.relation is StepRelation.ISOMORPHISM
        assert trace.config_at("u_o").roots == u_o_roots(ORBIT_31)
        assert trace.terminal.status is Status.EQUIVALENT

    def test_verify_quadruple_accepts_recorded_evidence(self) -> None:
        step = derive_exchange_trace(ORBIT_31).steps[0]
        ev = step.evidence
        check = verify_quadruple(step.source, ev["C"], ev["X"], ev["Y"])
        assert check.ok
        assert check.require().Y == frozenset({Root(2, 4)})

    def test_verify_quadruple_rejects_unpaired(self) -> None:
        """X without a partner fails the size condition."""
        source = derive_exchange_trace(ORBIT_31).steps[0].source
        C = source.roots - {Root(4, 3)}
        check = verify_quadruple(source, C, [(4, 3)], [])
        assert not check.ok
        assert any(v.kind == "(e)" for v in check.violations)
        with pytest.raises(ConfigMismatchError):
            check.require()

    def test_exchange_is_an_involution(self) -> None:
        """Swapping X and Y exchanges the target back to the source."""
        step = derive_exchange_trace(ORBIT_31).steps[0]
        C = step.evidence["C"]
        forward = verify_quadruple(step.source, C, [(4, 3)], [(2, 4)]).require()
        target = apply_exchange(forward, step.source)

        backward = verify_quadruple(target, C, [(2, 4)], [(4, 3)]).require()
        assert apply_exchange(backward, target) == step.source

    def test_apply_exchange_rejects_wrong_side(self) -> None:
        """The B-side configuration cannot be exchanged again."""
        step = derive_exchange_trace(ORBIT_31).steps[0]
        ev = step.evidence
        quadruple = verify_quadruple(step.source, ev["C"], ev["X"], ev["Y"]).require()
        assert apply_exchange(quadruple, step.source) == step.target
        with pytest.raises(ConfigMismatchError):
            apply_exchange(quadruple, step.target)


class TestOtherRules:
    """Test suite for expansion, conjugation and the axiom layer."""

    def test_equivalence_expand_needs_witness(self) -> None:
        trace = derive_orbit_trace(2, Partition((2, 2)))
        step = trace.steps[_first_expand(trace, ExpandMode.EQUIVALENCE)]
        assert step.witnesses
        R = frozenset(Root(i, j) for i, j in step.evidence["R"])
        N = frozenset(Root(i, j) for i, j in step.evidence["N"])
        with pytest.raises(IncompleteWitnessesError):
            apply_expand(step.source, R, (), inner=N)

    def test_conjugate_rejects_non_permutation(self) -> None:
        cfg = orbit_config(ORBIT_31, ConfigVariant.V2)
        with pytest.raises(InvalidParameterError):
            apply_conjugate(cfg, {1: 2})

    def test_axiom_needs_full_radical(self) -> None:
        with pytest.raises(ConfigMismatchError):
            axiom_verdict(orbit_config(ORBIT_31, ConfigVariant.V2), 2)


class TestOrbitTraces:
    """Test suite for scripted derivations."""

    @pytest.mark.parametrize(
        ("n", "parts", "status"),
        [
            (2, (3, 1), Status.VANISHING),
            (2, (4,), Status.VANISHING),
            (2, (2, 2), Status.NONVANISHING),
            (2, (2, 1), Status.NONVANISHING),
            (3, (3, 3, 1), Status.NONVANISHING),
            (3, (4, 2), Status.VANISHING),
        ],
    )
    def test_status_and_check(
        self, n: int, parts: tuple[int, ...], status: Status
    ) -> None:
        """Every scripted trace re-verifies."""
        trace = derive_orbit_trace(n, Partition(parts))
        assert trace.terminal.status is status
        assert trace.steps[-1].rule is Rule.AXIOM
        assert check_trace(trace).ok

    @pytest.mark.parametrize(("n", "orbit"), SUPPORTED_ORBITS, ids=str)
    def test_supported_orbits_check(self, n: int, orbit: Partition) -> None:
        assert check_trace(derive_orbit_trace(n, orbit)).ok

    @pytest.mark.slow
    @pytest.mark.parametrize(("n", "orbit"), LARGE_SUPPORTED_ORBITS, ids=str)
    def test_large_supported_orbits_check(self, n: int, orbit: Partition) -> None:
        assert check_trace(derive_orbit_trace(n, orbit)).ok

    @pytest.mark.parametrize(
        "parts",
        [(2, 2), (3, 1), (3, 3), (4, 2), (2, 2, 2), (3, 1, 1), (4, 2, 2), (3, 3, 1)],
    )
    def test_exchange_phase_reaches_u_o(self, parts: tuple[int, ...]) -> None:
        """Without weight-one roots the exchanges turn V_2(O) into U_O."""
        orbit = Partition(parts)
        assert same_parity(orbit)
        expected = orbit_config(orbit, ConfigVariant.U_O)

        assert derive_exchange_trace(orbit).terminal.config == expected
        assert derive_orbit_trace(2, orbit).config_at("u_o") == expected

    def test_unsupported_orbit(self) -> None:
        """Orbits below theta need allow_general."""
        with pytest.raises(UnsupportedOrbitError):
            derive_orbit_trace(2, Partition((2, 1, 1)))

    def test_general_script(self) -> None:
        trace = derive_orbit_trace(2, Partition((1, 1, 1)), allow_general=True)
        assert trace.terminal.status is Status.NONVANISHING
        assert check_trace(trace).ok

    def test_parameter_limits(self) -> None:
        with pytest.raises(InvalidParameterError):
            derive_orbit_trace(1, Partition((2,)))
        with pytest.raises(InvalidParameterError):
            derive_orbit_trace(2, Partition((13,)))


class TestCheckTrace:
    """Test suite for rejection of tampered traces."""

    def test_rejects_wrong_target(self) -> None:
        trace = derive_exchange_trace(ORBIT_31)
        step = trace.steps[0]
        mutated = replace(trace, steps=(replace(step, target=step.source),))
        result = check_trace(mutated)
        assert not result.ok
        assert not result
        assert result.to_payload()["ok"] is False

    def test_rejects_zeroed_character_tag(self) -> None:
        """Dropping the tag on the commutator root breaks condition (e)."""
        trace = derive_exchange_trace(ORBIT_31)
        step = trace.steps[0]
        source = step.source
        zeroed = source.with_roots(
            source.roots, source.character.restrict(source.roots - {Root(2, 3)})
        )
        mutated = replace(trace, initial=zeroed, steps=(replace(step, source=zeroed),))

        result = check_trace(mutated)
        assert not result.ok
        assert any(d.kind == "(e)" for d in result.diagnostics)

    def test_rejects_wrong_relation(self) -> None:
        trace = derive_orbit_trace(2, Partition((3, 1)))
        steps = list(trace.steps)
        steps[0] = replace(steps[0], relation=StepRelation.IMPLIES_NONVANISHING)
        assert not check_trace(replace(trace, steps=tuple(steps))).ok

    def test_rejects_wrong_status(self) -> None:
        trace = derive_orbit_trace(2, Partition((3, 1)))
        terminal = replace(trace.terminal, status=Status.NONVANISHING)
        assert not check_trace(replace(trace, terminal=terminal)).ok

    def test_rejects_missing_witness(self) -> None:
        trace = derive_orbit_trace(2, Partition((2, 2)))
        index = _first_expand(trace, ExpandMode.EQUIVALENCE)
        steps = list(trace.steps)
        steps[index] = replace(steps[index], witnesses=())
        result = check_trace(replace(trace, steps=tuple(steps)))
        assert any(d.kind == "witnesses" for d in result.diagnostics)


class TestTraceJson:
    """Test suite for the JSON form of traces."""

    def test_reparsed_trace_checks(self) -> None:
        trace = derive_orbit_trace(2, Partition((2, 2)))
        payload = json.loads(json.dumps(trace.to_json()))
        parsed = DerivationTrace.from_json(payload)
        assert json.loads(json.dumps(parsed.to_json())) == payload
        assert check_trace(parsed).ok

    def test_step_json_keys(self) -> None:
        step = derive_exchange_trace(ORBIT_31).steps[0]
        payload = step.to_json()
        assert set(payload) == {
            "rule",
            "in",
            "out",
            "evidence",
            "relation",
            "witnesses",
        }
        assert Step.from_json(payload).rule is Rule.ROOT_EXCHANGE

    @pytest.mark.parametrize(
        "payload",
        [{"steps": []}, {"terminal": {"status": "Unknown"}, "steps": []}],
    )
    def test_malformed(self, payload: dict) -> None:
        with pytest.raises(TraceFormatError):
            DerivationTrace.from_json(payload)


class TestClassification:
    """Test suite for classify_rank."""

    def test_rank_three(self) -> None:
        """Above theta vanishes; theta and below do not."""
        results = classify_rank(2, 3)
        assert [c.orbit for c in results] == [[3], [2, 1], [1, 1, 1]]
        assert [c.status for c in results] == [
            Status.VANISHING,
            Status.NONVANISHING,
            Status.NONVANISHING,
        ]
        assert [c.relation_to_theta for c in results] == [
            Relation.GREATER,
            Relation.EQUAL,
            Relation.LESS,
        ]
        assert all(c.trace_ok for c in results)
