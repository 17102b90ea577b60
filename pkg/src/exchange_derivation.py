"""Derivation calculus for twisted Jacquet coefficients.

A derivation rewrites a unipotent configuration (V, psi) step by step.
Every step names its rule, its input and output configurations, the
evidence needed to re-verify it in isolation and how the output
coefficient relates to the input one:

- ROOT_EXCHANGE swaps a subgroup X for its pairing partner Y
  (conditions (a)-(e) on a quadruple C, X, Y);
- EXPAND enlarges the group by one row R, either certified by vanishing
  witnesses for every nontrivial character of R, or keeping an arbitrary
  parameter, or passing to the trivial quotient;
- CONJUGATE relabels indices by a permutation or rescales coefficients
  by the diagonal torus;
- STAGES restricts to a normal subconfiguration;
- AXIOM evaluates a character on the full unipotent radical that is
  supported on simple roots against the semi-Whittaker vanishing theorem.

Traces are scripted, not searched. ``check_trace`` re-verifies every step.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from pydantic import BaseModel

from src.constants import (
    MAX_AXIOM_PARAMS,
    MAX_TRACE_RANK,
    ConfigVariant,
    ConjugationKind,
    ExpandMode,
    Relation,
    Rule,
    Status,
    StepRelation,
    TagKind,
    WeightVariant,
)
from src.exceptions import (
    ConfigMismatchError,
    IncompleteWitnessesError,
    InvalidParameterError,
    MetaplecticError,
    TraceFormatError,
    UnsupportedOrbitError,
)
from src.jacquet_dimensions import vanishes
from src.models import Violation
from src.partitions_orbits import (
    Composition,
    Partition,
    composition_from_simple,
    dominance_compare,
    invert,
    orbit_config,
    orbit_weights,
    partitions_of,
    root_weight,
    theta_orbit,
    weyl_permutation,
)
from src.root_system import (
    ONE,
    Character,
    Root,
    RootSet,
    UnipotentConfig,
    closure,
    composites,
    is_abelian,
    is_closed,
    nonzero_param,
    param,
    positive_roots,
    rows,
    simple_roots,
    sum_roots,
)

EXPAND_RELATIONS: dict[ExpandMode, StepRelation] = {
    ExpandMode.EQUIVALENCE: StepRelation.ISOMORPHISM,
    ExpandMode.EXHAUSTIVE: StepRelation.IMPLIES_VANISHING,
    ExpandMode.QUOTIENT: StepRelation.IMPLIES_NONVANISHING,
}

STATUS_RELATIONS: dict[Status, frozenset[StepRelation]] = {
    Status.VANISHING: frozenset(
        {
            StepRelation.ISOMORPHISM,
            StepRelation.VANISHING_EQUIVALENCE,
            StepRelation.IMPLIES_VANISHING,
        }
    ),
    Status.NONVANISHING: frozenset(
        {
            StepRelation.ISOMORPHISM,
            StepRelation.VANISHING_EQUIVALENCE,
            StepRelation.IMPLIES_NONVANISHING,
        }
    ),
}


def _roots_json(roots: Iterable[Root]) -> list[list[int]]:
    return [root.to_json() for root in sorted(roots)]


def _roots_from(value: Iterable[Sequence[int]]) -> RootSet:
    return frozenset(Root(int(i), int(j)) for i, j in value)


# ============================================================================
# Root exchange
# ============================================================================


@dataclass(frozen=True)
class ExchangeQuadruple:
    """A verified exchange datum: base A, subsets C, X, Y and psi_C."""

    base: UnipotentConfig
    C: RootSet
    X: RootSet
    Y: RootSet
    character: Character


@dataclass(frozen=True)
class QuadrupleCheck:
    """Outcome of ``verify_quadruple``."""

    quadruple: ExchangeQuadruple
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def require(self) -> ExchangeQuadruple:
        """Return the quadruple, raising when a condition fails."""
        if self.violations:
            raise ConfigMismatchError(
                "Exchange conditions fail",
                reason="quadruple",
                details={
                    "violations": [f"{v.kind} {v.message}" for v in self.violations]
                },
            )
        return self.quadruple


def _pairing_violations(
    C: RootSet, X: RootSet, Y: RootSet, psi: Character
) -> list[str]:
    """Messages for a pairing matrix that is not a nonzero permutation pattern."""
    xs, ys = sorted(X), sorted(Y)
    entries: dict[tuple[Root, Root], Any] = {}
    for x in xs:
        for y in ys:
            composite = x.compose(y) or y.compose(x)
            if composite is not None and composite in C and not psi[composite].is_zero:
                entries[(x, y)] = psi[composite]

    problems = []
    for (x, y), tag in entries.items():
        if not tag.is_definitely_nonzero:
            problems.append(
                f"entry {tuple(x)}x{tuple(y)} is {tag.kind}, not definitely nonzero"
            )
    for x in xs:
        count = sum(1 for (a, _) in entries if a == x)
        if count != 1:
            problems.append(f"row {tuple(x)} has {count} nonzero entries")
    for y in ys:
        count = sum(1 for (_, b) in entries if b == y)
        if count != 1:
            problems.append(f"column {tuple(y)} has {count} nonzero entries")
    return problems


def verify_quadruple(
    A: UnipotentConfig,
    C: Iterable[Root],
    X: Iterable[Root],
    Y: Iterable[Root],
) -> QuadrupleCheck:
    """Check the exchange conditions (a)-(e) at the level of roots.

    Y (and X) may lie outside A; conditions are then read in the closed
    set generated by A, X and Y. The character on C is A's character
    restricted to C.
    """
    C, X, Y = _roots_from(C), _roots_from(X), _roots_from(Y)
    psi = A.character.restrict(C)
    violations: list[Violation] = []

    def fail(condition: str, message: str, roots: Iterable[Root] = ()) -> None:
        violations.append(
            Violation(
                kind=f"({condition})", witness=_roots_json(roots), message=message
            )
        )

    outside = C - A.roots
    if outside:
        fail("a", "C is not contained in A", outside)

    for name, part in (("X", X), ("Y", Y)):
        if not is_abelian(part):
            fail("b", f"{name} is not abelian", part)
        for a, b, ab in composites(part, C):
            if ab not in C:
                fail("b", f"[{name}, C] leaves C", (a, b, ab))
            elif not psi[ab].is_zero:
                fail("b", f"{name} does not preserve the character of C", (a, b, ab))
        broken = psi.support & sum_roots(C | part)
        if broken:
            message = f"character of C is not trivial on commutators of C{name}"
            fail("b", message, broken)

    for a, b, ab in composites(X, Y):
        if ab not in C:
            fail("c", "[X, Y] is not contained in C", (a, b, ab))

    overlap = (C & X) | (C & Y) | (X & Y)
    if overlap:
        fail("d", "C, X and Y are not pairwise disjoint", overlap)
    for label, part in (("C", C), ("CX", C | X), ("CY", C | Y), ("CXY", C | X | Y)):
        if not is_closed(part):
            fail("d", f"{label} is not closed", part)
    hull = closure(A.roots | X | Y)
    if hull != C | X | Y:
        fail("d", "A, X and Y do not generate exactly CXY", hull ^ (C | X | Y))

    if len(X) != len(Y):
        fail("e", f"|X| = {len(X)} differs from |Y| = {len(Y)}", X | Y)
    else:
        for message in _pairing_violations(C, X, Y, psi):
            fail("e", message, X | Y)

    quadruple = ExchangeQuadruple(base=A, C=C, X=X, Y=Y, character=psi)
    return QuadrupleCheck(quadruple=quadruple, violations=tuple(violations))


def exchange_relation(q: ExchangeQuadruple, cfg: UnipotentConfig) -> StepRelation:
    """Isomorphism from the CX side, vanishing equivalence from C alone.

    Raises:
        ConfigMismatchError: If cfg is neither C nor CX with psi_C
    """
    if cfg.character.restrict(q.X).support:
        raise ConfigMismatchError("Character is not trivial on X", reason="x_tagged")
    if cfg.character.restrict(q.C) != q.character:
        raise ConfigMismatchError(
            "Character on C differs from the quadruple", reason="psi_c"
        )
    if cfg.roots == q.C | q.X:
        return StepRelation.ISOMORPHISM
    if cfg.roots == q.C:
        return StepRelation.VANISHING_EQUIVALENCE
    raise ConfigMismatchError(
        "Configuration is neither C nor CX",
        reason="roots",
        details={"roots": _roots_json(cfg.roots ^ (q.C | q.X))},
    )


def apply_exchange(q: ExchangeQuadruple, cfg: UnipotentConfig) -> UnipotentConfig:
    """Replace the D-side (CX, psi_C) by the B-side (CY, psi_C).

    Raises:
        ConfigMismatchError: If cfg does not match the quadruple
    """
    exchange_relation(q, cfg)
    return cfg.with_roots(q.C | q.Y, cfg.character.restrict(q.C))


# ============================================================================
# Expansion, conjugation, stages
# ============================================================================


def _is_forest(edges: Iterable[Root]) -> bool:
    """True iff the edges {i, j} form no cycle (torus can scale each freely)."""
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for root in edges:
        a, b = find(root.i), find(root.j)
        if a == b:
            return False
        parent[a] = b
    return True


def expansion_row(R: Iterable[Root]) -> tuple[int, frozenset[int]]:
    """Split a row group {(j, x) : x in L} into (j, L).

    Raises:
        ConfigMismatchError: If R is not part of a single positive row
    """
    R = list(R)
    heads = {root.i for root in R}
    if len(heads) != 1 or not all(root.is_positive for root in R):
        raise ConfigMismatchError(
            "Expansion group must lie in a single row", reason="row"
        )
    return heads.pop(), frozenset(root.j for root in R)


def expansion_pivot(R: Iterable[Root]) -> Root:
    j, block = expansion_row(R)
    return Root(j, min(block))


def expansion_violations(
    cfg: UnipotentConfig, R: Iterable[Root], inner: Iterable[Root]
) -> list[Violation]:
    """Conditions under which one character of R represents all nonzero ones."""
    R, N = frozenset(R), frozenset(inner)
    problems: list[Violation] = []

    def fail(message: str, roots: Iterable[Root] = ()) -> None:
        problems.append(
            Violation(kind="expand", witness=_roots_json(roots), message=message)
        )

    try:
        j, block = expansion_row(R)
    except ConfigMismatchError as exc:
        return [Violation(kind="expand", witness=_roots_json(R), message=exc.message)]

    if R & cfg.roots:
        fail("R meets the configuration", R & cfg.roots)
    if not is_abelian(R):
        fail("R is not abelian", R)
    if not N <= cfg.roots:
        fail("inner group is not contained in the configuration", N - cfg.roots)
    if not is_closed(N):
        fail("inner group is not closed", N)
    for a, b, ab in composites(R, N):
        if ab not in N or not cfg.tag(ab).is_zero:
            fail("R does not normalize the inner character", (a, b, ab))

    group = N | R
    hull = cfg.roots | R
    if not is_closed(group):
        fail("inner group times R is not closed", group)
    if not is_closed(hull):
        fail("configuration times R is not closed", hull)
    for a, b, ab in composites(hull - group, group):
        if ab not in group or not cfg.tag(ab).is_zero:
            fail("outer roots do not normalize the expanded group", (a, b, ab))

    for i in range(1, cfg.rank + 1):
        if i in block:
            continue
        reach = {root.j for root in group if root.i == i and root.j in block}
        if reach and reach != block:
            fail(f"row {i} meets the block only partially")
    inside = [root for root in group if root.i in block]
    if inside:
        fail("roots start inside the block", inside)
    touching = [
        root
        for root in group
        if (root.i in block or root.j in block) and not cfg.tag(root).is_zero
    ]
    if touching:
        fail("character is nontrivial on roots touching the block", touching)

    pivot = Root(j, min(block))
    if not _is_forest(cfg.character.restrict(N).support | {pivot}):
        fail("torus cannot normalize the pivot coefficient", [pivot])
    return problems


def _fresh_param_id(character: Character) -> int:
    ids = [tag.param_id for _, tag in character.items() if tag.param_id is not None]
    return max(ids, default=-1) + 1


def _witness_covers(
    witness: DerivationTrace, N: RootSet, R: RootSet, psi_n: Character, pivot: Root
) -> bool:
    start = witness.initial
    return (
        start.roots == N | R
        and start.character.restrict(N) == psi_n
        and start.tag(pivot).kind is TagKind.NONZERO_PARAM
        and start.character.support <= N | {pivot}
        and witness.terminal.status is Status.VANISHING
        and check_trace(witness).ok
    )


def apply_expand(
    cfg: UnipotentConfig,
    R: Iterable[Root],
    witnesses: Sequence[DerivationTrace] = (),
    *,
    inner: Optional[Iterable[Root]] = None,
    mode: ExpandMode = ExpandMode.EQUIVALENCE,
    param_id: Optional[int] = None,
) -> UnipotentConfig:
    """Fourier-expand cfg along the row group R.

    Args:
        cfg: Configuration being expanded
        R: Abelian row group {(j, x) : x in L}
        witnesses: Vanishing traces for the pivot-normalized nontrivial
            characters (equivalence mode)
        inner: Normal subgroup N of cfg that R normalizes (defaults to cfg)
        mode: equivalence, exhaustive or quotient
        param_id: Parameter id placed on the pivot in exhaustive mode

    Raises:
        ConfigMismatchError: If an expansion condition fails
        IncompleteWitnessesError: If equivalence mode lacks a witness
    """
    R = frozenset(R)
    if not R:
        return cfg
    N = cfg.roots if inner is None else frozenset(inner)
    problems = expansion_violations(cfg, R, N)
    if problems:
        raise ConfigMismatchError(
            "Expansion conditions fail",
            reason="expand",
            details={"violations": [p.message for p in problems]},
        )
    pivot = expansion_pivot(R)
    hull = cfg.roots | R

    if mode is ExpandMode.EQUIVALENCE:
        psi_n = cfg.character.restrict(N)
        if not any(_witness_covers(w, N, R, psi_n, pivot) for w in witnesses):
            raise IncompleteWitnessesError(
                uncovered=[
                    f"nonzero character on {_roots_json(R)} "
                    f"normalized at {tuple(pivot)}"
                ]
            )
        return cfg.with_roots(hull, cfg.character)
    if mode is ExpandMode.EXHAUSTIVE:
        pid = _fresh_param_id(cfg.character) if param_id is None else param_id
        return cfg.with_roots(hull, cfg.character.with_tag(pivot, param(pid)))
    return cfg.with_roots(hull, cfg.character)


def apply_conjugate(
    cfg: UnipotentConfig, perm: Optional[Mapping[int, int]] = None
) -> UnipotentConfig:
    """Conjugate by a permutation of indices, or by the torus when perm is None.

    Torus conjugation sends every NonzeroParam coefficient to One; it needs
    the support of the character to be a forest.

    Raises:
        InvalidParameterError: If perm is not a permutation of 1..rank
        ConfigMismatchError: If the torus cannot normalize the coefficients
    """
    if perm is None:
        if not _is_forest(cfg.character.support):
            raise ConfigMismatchError(
                "Character support has a cycle; torus cannot normalize it",
                reason="forest",
            )
        scaled = {
            root: ONE if tag.kind is TagKind.NONZERO_PARAM else tag
            for root, tag in cfg.character.items()
        }
        return cfg.with_roots(cfg.roots, Character(scaled))

    perm = {int(k): int(v) for k, v in perm.items()}
    if set(perm) != set(perm.values()) or not all(1 <= k <= cfg.rank for k in perm):
        raise InvalidParameterError(
            "Not a permutation of 1..rank", parameter="perm", value=sorted(perm.items())
        )
    return cfg.relabel(perm)


def apply_stages(cfg: UnipotentConfig, inner: Iterable[Root]) -> UnipotentConfig:
    """Restrict to a closed normal subgroup whose character is preserved.

    Raises:
        ConfigMismatchError: If inner is not such a subgroup
    """
    N = frozenset(inner)
    if not N <= cfg.roots:
        raise ConfigMismatchError(
            "Subgroup is not contained in the configuration", reason="stages"
        )
    if not is_closed(N):
        raise ConfigMismatchError("Subgroup is not closed", reason="stages")
    for a, b, ab in composites(cfg.roots - N, N):
        if ab not in N or not cfg.tag(ab).is_zero:
            raise ConfigMismatchError(
                "Subgroup is not normal with preserved character",
                reason="stages",
                details={"composite": [a.to_json(), b.to_json(), ab.to_json()]},
            )
    return cfg.with_roots(N, cfg.character.restrict(N))


# ============================================================================
# Axiom layer
# ============================================================================


@dataclass(frozen=True)
class AxiomResult:
    """Semi-Whittaker verdict over all zero/nonzero parameter choices."""

    verdict: Optional[Status]
    compositions: tuple[Composition, ...]


def axiom_verdict(cfg: UnipotentConfig, n: int) -> AxiomResult:
    """Decide (U, psi) with psi on simple roots by the vanishing theorem.

    Every ArbitraryParam is tried zero and nonzero; the verdict is Vanishing
    if all choices vanish, Nonvanishing if none does, undetermined otherwise.

    Raises:
        ConfigMismatchError: If cfg is not the full unipotent radical with a
            character on simple roots, or has too many parameters
    """
    if cfg.roots != positive_roots(cfg.rank):
        raise ConfigMismatchError(
            "Axiom applies to the full unipotent radical", reason="axiom"
        )
    off_simple = cfg.character.support - frozenset(simple_roots(cfg.rank))
    if off_simple:
        raise ConfigMismatchError(
            "Axiom needs a character supported on simple roots",
            reason="axiom",
            details={"roots": _roots_json(off_simple)},
        )

    fixed = {root.i for root, tag in cfg.character.items() if tag.is_definitely_nonzero}
    params: dict[Any, list[int]] = {}
    for root, tag in cfg.character.items():
        if tag.kind is TagKind.PARAM:
            key = tag.param_id if tag.param_id is not None else tuple(root)
            params.setdefault(key, []).append(root.i)
    if len(params) > MAX_AXIOM_PARAMS:
        raise ConfigMismatchError(
            "Too many arbitrary parameters for the axiom",
            reason="axiom",
            details={"params": len(params), "max": MAX_AXIOM_PARAMS},
        )

    found: dict[Composition, bool] = {}
    for choice in itertools.product((False, True), repeat=len(params)):
        linked = set(fixed)
        for on, indices in zip(choice, params.values()):
            if on:
                linked.update(indices)
        composition = composition_from_simple(cfg.rank, linked)
        found[composition] = vanishes(n, composition)

    verdict: Optional[Status] = None
    if all(found.values()):
        verdict = Status.VANISHING
    elif not any(found.values()):
        verdict = Status.NONVANISHING
    return AxiomResult(verdict=verdict, compositions=tuple(found))


# ============================================================================
# Traces
# ============================================================================


@dataclass(frozen=True)
class Step:
    """One rewrite; evidence is stored in its JSON form."""

    rule: Rule
    source: UnipotentConfig
    target: UnipotentConfig
    relation: StepRelation
    evidence: dict[str, Any] = field(default_factory=dict)
    witnesses: tuple[DerivationTrace, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "rule": str(self.rule),
            "in": self.source.to_json(),
            "out": self.target.to_json(),
            "evidence": self.evidence,
            "relation": str(self.relation),
            "witnesses": [w.to_json() for w in self.witnesses],
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> Step:
        return cls(
            rule=Rule(payload["rule"]),
            source=UnipotentConfig.from_json(payload["in"]),
            target=UnipotentConfig.from_json(payload["out"]),
            relation=StepRelation(payload["relation"]),
            evidence=dict(payload.get("evidence", {})),
            witnesses=tuple(
                DerivationTrace.from_json(w) for w in payload.get("witnesses", [])
            ),
        )


@dataclass(frozen=True)
class Terminal:
    """Final status.

    equivalence records how the final config relates to the initial one.
    """

    status: Status
    config: UnipotentConfig
    equivalence: Optional[StepRelation] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config.to_json(),
            "status": str(self.status),
            "equivalence": str(self.equivalence) if self.equivalence else None,
        }


@dataclass(frozen=True)
class DerivationTrace:
    """Immutable, self-contained derivation."""

    n: Optional[int]
    orbit: Optional[Partition]
    initial: UnipotentConfig
    steps: tuple[Step, ...]
    terminal: Terminal
    checkpoints: dict[str, int] = field(default_factory=dict)

    def config_at(self, name: str) -> UnipotentConfig:
        """Configuration reached at a named checkpoint."""
        index = self.checkpoints[name]
        return self.initial if index == 0 else self.steps[index - 1].target

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "orbit": self.orbit.to_json() if self.orbit else None,
            "initial": self.initial.to_json(),
            "steps": [step.to_json() for step in self.steps],
            "terminal": self.terminal.to_json(),
            "checkpoints": dict(self.checkpoints),
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> DerivationTrace:
        """Parse a trace.

        Raises:
            TraceFormatError: If the payload does not describe a trace
        """
        try:
            terminal = payload["terminal"]
            equivalence = terminal.get("equivalence")
            return cls(
                n=payload.get("n"),
                orbit=(
                    Partition(tuple(payload["orbit"])) if payload.get("orbit") else None
                ),
                initial=UnipotentConfig.from_json(payload["initial"]),
                steps=tuple(Step.from_json(s) for s in payload["steps"]),
                terminal=Terminal(
                    status=Status(terminal["status"]),
                    config=UnipotentConfig.from_json(terminal["config"]),
                    equivalence=StepRelation(equivalence) if equivalence else None,
                ),
                checkpoints={
                    str(k): int(v) for k, v in payload.get("checkpoints", {}).items()
                },
            )
        except TraceFormatError:
            raise
        except (
            KeyError,
            TypeError,
            ValueError,
            AttributeError,
            MetaplecticError,
        ) as exc:
            raise TraceFormatError(
                f"Malformed derivation trace: {exc.__class__.__name__}",
                original_error=exc,
            ) from exc


def _equivalence_of(steps: Iterable[Step]) -> Optional[StepRelation]:
    relations = {step.relation for step in steps}
    if relations <= {StepRelation.ISOMORPHISM}:
        return StepRelation.ISOMORPHISM
    if relations <= {StepRelation.ISOMORPHISM, StepRelation.VANISHING_EQUIVALENCE}:
        return StepRelation.VANISHING_EQUIVALENCE
    return None


class _TraceBuilder:
    """Applies rules to a running configuration and records the steps."""

    def __init__(self, initial: UnipotentConfig, n: Optional[int]) -> None:
        self.initial = initial
        self.current = initial
        self.n = n
        self.steps: list[Step] = []
        self.checkpoints: dict[str, int] = {}

    def _push(
        self,
        rule: Rule,
        target: UnipotentConfig,
        relation: StepRelation,
        evidence: dict[str, Any],
        witnesses: tuple[DerivationTrace, ...] = (),
    ) -> None:
        self.steps.append(
            Step(rule, self.current, target, relation, evidence, witnesses)
        )
        self.current = target

    def checkpoint(self, name: str) -> None:
        self.checkpoints[name] = len(self.steps)

    def exchange(self, X: RootSet, Y: RootSet) -> None:
        cfg = self.current
        C = cfg.roots - X
        quadruple = verify_quadruple(cfg, C, X, Y).require()
        relation = exchange_relation(quadruple, cfg)
        evidence = {
            "C": _roots_json(C),
            "X": _roots_json(X),
            "Y": _roots_json(Y),
            "mode": str(relation),
        }
        target = apply_exchange(quadruple, cfg)
        self._push(Rule.ROOT_EXCHANGE, target, relation, evidence)

    def conjugate(self, perm: Optional[dict[int, int]] = None) -> None:
        target = apply_conjugate(self.current, perm)
        if perm is None:
            evidence: dict[str, Any] = {"kind": str(ConjugationKind.TORUS)}
        else:
            evidence = {
                "kind": str(ConjugationKind.PERMUTATION),
                "perm": [[k, v] for k, v in sorted(perm.items())],
            }
        self._push(Rule.CONJUGATE, target, StepRelation.ISOMORPHISM, evidence)

    def stages(self, inner: RootSet) -> None:
        target = apply_stages(self.current, inner)
        self._push(
            Rule.STAGES,
            target,
            StepRelation.IMPLIES_VANISHING,
            {"N": _roots_json(inner)},
        )

    def expand(
        self,
        R: RootSet,
        inner: RootSet,
        mode: ExpandMode,
        witnesses: tuple[DerivationTrace, ...] = (),
    ) -> None:
        evidence: dict[str, Any] = {
            "R": _roots_json(R),
            "N": _roots_json(inner),
            "mode": str(mode),
            "pivot": expansion_pivot(R).to_json(),
        }
        param_id = None
        if mode is ExpandMode.EXHAUSTIVE:
            param_id = _fresh_param_id(self.current.character)
            evidence["param_id"] = param_id
        target = apply_expand(
            self.current, R, witnesses, inner=inner, mode=mode, param_id=param_id
        )
        self._push(Rule.EXPAND, target, EXPAND_RELATIONS[mode], evidence, witnesses)

    def axiom(self) -> Optional[Status]:
        if self.n is None:
            raise InvalidParameterError("Axiom needs the cover degree", parameter="n")
        result = axiom_verdict(self.current, self.n)
        evidence = {
            "n": self.n,
            "compositions": [c.to_json() for c in result.compositions],
            "verdict": str(result.verdict) if result.verdict else None,
        }
        self._push(Rule.AXIOM, self.current, StepRelation.ISOMORPHISM, evidence)
        return result.verdict

    def finish(self, status: Status, orbit: Optional[Partition]) -> DerivationTrace:
        return DerivationTrace(
            n=self.n,
            orbit=orbit,
            initial=self.initial,
            steps=tuple(self.steps),
            terminal=Terminal(status, self.current, _equivalence_of(self.steps)),
            checkpoints=dict(self.checkpoints),
        )


# ============================================================================
# Scripted derivations
# ============================================================================


def _exchange_phase(builder: _TraceBuilder, stage: Partition, offset: int) -> None:
    """Turn V_2(Q) into U_Q for the stage Q sitting at indices offset+1...

    Roots of h'-weight one between the first block and the rest are added
    first (vanishing equivalences). Then, column by column, each negative
    root (x, a) is exchanged for (a-1, x), lowest weight first.
    """
    prime = orbit_weights(stage, WeightVariant.PRIME)
    p, size = stage[0], stage.r
    for a in range(1, p):
        for x in range(p + 1, size + 1):
            if root_weight(prime, Root(a, x)) == 1:
                builder.exchange(
                    frozenset({Root(x, a + 1).shift(offset)}),
                    frozenset({Root(a, x).shift(offset)}),
                )
    for a in range(2, p + 1):
        for x in range(size, p, -1):
            if root_weight(prime, Root(x, a)) >= 2:
                builder.exchange(
                    frozenset({Root(x, a).shift(offset)}),
                    frozenset({Root(a - 1, x).shift(offset)}),
                )


def _vanish_by_rows(builder: _TraceBuilder, first: int) -> None:
    """Exhaustively expand rows first..r-1 of rows(1..first-1), then decide."""
    rank = builder.current.rank
    for k in range(first, rank):
        builder.expand(rows(rank, k, k), builder.current.roots, ExpandMode.EXHAUSTIVE)


def _expansion_witness(
    n: int, cfg: UnipotentConfig, R: RootSet, inner: RootSet
) -> DerivationTrace:
    """Vanishing trace for (N R, psi_N + eps on the pivot), eps nonzero."""
    pivot = expansion_pivot(R)
    psi = cfg.character.restrict(inner)
    start = UnipotentConfig(
        cfg.rank, inner | R, psi.with_tag(pivot, nonzero_param(_fresh_param_id(psi)))
    )
    builder = _TraceBuilder(start, n)
    builder.conjugate()
    _vanish_by_rows(builder, pivot.i + 1)
    verdict = builder.axiom()
    if verdict is not Status.VANISHING:
        raise UnsupportedOrbitError(
            "Expansion witness does not vanish", n=n, details={"pivot": pivot.to_json()}
        )
    return builder.finish(Status.VANISHING, None)


def _vanishing_trace(n: int, orbit: Partition) -> DerivationTrace:
    rank, p = orbit.r, orbit[0]
    builder = _TraceBuilder(orbit_config(orbit, ConfigVariant.V2), n)
    _exchange_phase(builder, orbit, 0)
    builder.checkpoint("u_o")
    head = rows(rank, 1, p - 1)
    if head != builder.current.roots:
        builder.stages(head)
    _vanish_by_rows(builder, p)
    builder.axiom()
    return builder.finish(Status.VANISHING, orbit)


def _nonvanishing_trace(n: int, orbit: Partition) -> DerivationTrace:
    rank = orbit.r
    builder = _TraceBuilder(orbit_config(orbit, ConfigVariant.V2), n)
    offset = 0
    for index, p in enumerate(orbit):
        stage = Partition(orbit.parts[index:])
        if offset > 0:
            back = invert(weyl_permutation(stage))
            perm = {offset + k: offset + v for k, v in back.items() if k != v}
            if perm:
                builder.conjugate(perm)
        _exchange_phase(builder, stage, offset)
        if index == 0:
            builder.checkpoint("u_o")
        end = offset + p
        if end < rank:
            R = rows(rank, end, end)
            inner = rows(rank, 1, end - 1)
            if p == n:
                witness = _expansion_witness(n, builder.current, R, inner)
                builder.expand(R, inner, ExpandMode.EQUIVALENCE, (witness,))
            else:
                builder.expand(R, inner, ExpandMode.QUOTIENT)
        offset = end
    builder.axiom()
    return builder.finish(Status.NONVANISHING, orbit)


def derive_orbit_trace(
    n: int, orbit: Partition, allow_general: bool = False
) -> DerivationTrace:
    """Scripted trace from (V_2(O), psi) to its vanishing status.

    Orbits with a part above n vanish; the theta orbit (n^a b) does not.
    With allow_general the nonvanishing script runs for every orbit whose
    parts are at most n.

    Raises:
        UnsupportedOrbitError: For orbits outside the scripted cases
        InvalidParameterError: For ranks above the supported range
    """
    if n < 2:
        raise InvalidParameterError("n must be at least 2", parameter="n", value=n)
    if orbit.r > MAX_TRACE_RANK:
        raise InvalidParameterError(
            f"Derivations are limited to rank {MAX_TRACE_RANK}",
            parameter="r",
            value=orbit.r,
        )
    if orbit[0] > n:
        return _vanishing_trace(n, orbit)
    if allow_general or orbit == theta_orbit(n, orbit.r):
        return _nonvanishing_trace(n, orbit)
    raise UnsupportedOrbitError(orbit=orbit.to_json(), n=n)


def derive_exchange_trace(orbit: Partition) -> DerivationTrace:
    """Exchange-only trace from V_2(O) to U_O."""
    builder = _TraceBuilder(orbit_config(orbit, ConfigVariant.V2), None)
    _exchange_phase(builder, orbit, 0)
    builder.checkpoint("u_o")
    return builder.finish(Status.EQUIVALENT, orbit)


# ============================================================================
# Checking
# ============================================================================


@dataclass(frozen=True)
class TraceCheck:
    """Per-step diagnostics of ``check_trace``."""

    diagnostics: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __bool__(self) -> bool:
        return self.ok

    def to_payload(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "diagnostics": [d.model_dump() for d in self.diagnostics],
        }


def _compare(
    step: Step, target: UnipotentConfig, relation: StepRelation
) -> list[Violation]:
    problems = []
    if step.target != target:
        problems.append(
            Violation(
                kind="target",
                witness=_roots_json(step.target.roots ^ target.roots),
                message="recorded output differs from the recomputed one",
            )
        )
    if step.relation is not relation:
        problems.append(
            Violation(
                kind="relation",
                witness=str(step.relation),
                message=f"rule yields {relation}, trace records {step.relation}",
            )
        )
    return problems


def _check_exchange(step: Step) -> list[Violation]:
    ev = step.evidence
    check = verify_quadruple(
        step.source, _roots_from(ev["C"]), _roots_from(ev["X"]), _roots_from(ev["Y"])
    )
    if not check.ok:
        return list(check.violations)
    relation = exchange_relation(check.quadruple, step.source)
    return _compare(step, apply_exchange(check.quadruple, step.source), relation)


def _check_expand(step: Step) -> list[Violation]:
    ev = step.evidence
    mode = ExpandMode(ev["mode"])
    R = _roots_from(ev["R"])
    if expansion_pivot(R).to_json() != list(ev["pivot"]):
        return [
            Violation(
                kind="expand", witness=ev["pivot"], message="pivot is not (j, min L)"
            )
        ]
    try:
        target = apply_expand(
            step.source,
            R,
            step.witnesses,
            inner=_roots_from(ev["N"]),
            mode=mode,
            param_id=ev.get("param_id"),
        )
    except IncompleteWitnessesError as exc:
        return [Violation(kind="witnesses", witness=exc.details, message=exc.message)]
    return _compare(step, target, EXPAND_RELATIONS[mode])


def _check_conjugate(step: Step) -> list[Violation]:
    ev = step.evidence
    if ConjugationKind(ev["kind"]) is ConjugationKind.TORUS:
        target = apply_conjugate(step.source)
    else:
        target = apply_conjugate(step.source, {int(k): int(v) for k, v in ev["perm"]})
    return _compare(step, target, StepRelation.ISOMORPHISM)


def _check_stages(step: Step) -> list[Violation]:
    target = apply_stages(step.source, _roots_from(step.evidence["N"]))
    return _compare(step, target, StepRelation.IMPLIES_VANISHING)


def _check_axiom(step: Step) -> list[Violation]:
    result = axiom_verdict(step.source, int(step.evidence["n"]))
    recorded = step.evidence.get("verdict")
    problems = _compare(step, step.source, StepRelation.ISOMORPHISM)
    if (str(result.verdict) if result.verdict else None) != recorded:
        problems.append(
            Violation(
                kind="axiom", witness=recorded, message=f"axiom yields {result.verdict}"
            )
        )
    return problems


_CHECKERS = {
    Rule.ROOT_EXCHANGE: _check_exchange,
    Rule.EXPAND: _check_expand,
    Rule.CONJUGATE: _check_conjugate,
    Rule.STAGES: _check_stages,
    Rule.AXIOM: _check_axiom,
}


def _check_step(step: Step) -> list[Violation]:
    try:
        return _CHECKERS[step.rule](step)
    except (KeyError, TypeError, ValueError) as exc:
        return [Violation(kind="evidence", message=f"unreadable evidence: {exc!r}")]
    except MetaplecticError as exc:
        return [Violation(kind=exc.code, witness=exc.details, message=exc.message)]


def _check_terminal(t: DerivationTrace) -> list[Violation]:
    terminal = t.terminal
    relations = {step.relation for step in t.steps}

    if terminal.status is Status.EQUIVALENT:
        claimed = terminal.equivalence
        actual = _equivalence_of(t.steps)
        allowed = {
            StepRelation.ISOMORPHISM: {StepRelation.ISOMORPHISM},
            StepRelation.VANISHING_EQUIVALENCE: {
                StepRelation.ISOMORPHISM,
                StepRelation.VANISHING_EQUIVALENCE,
            },
        }
        if claimed not in allowed or actual is None or actual not in allowed[claimed]:
            return [
                Violation(
                    kind="status",
                    witness=str(claimed),
                    message=f"steps only support {actual} equivalence",
                )
            ]
        return []

    problems = []
    weak = relations - STATUS_RELATIONS[terminal.status]
    if weak:
        problems.append(
            Violation(
                kind="status",
                witness=sorted(str(r) for r in weak),
                message=f"relations do not transport {terminal.status}",
            )
        )
    if t.n is None:
        problems.append(Violation(kind="status", message="trace has no cover degree"))
        return problems
    try:
        verdict = axiom_verdict(terminal.config, t.n).verdict
    except MetaplecticError as exc:
        problems.append(
            Violation(kind="status", witness=exc.details, message=exc.message)
        )
        return problems
    if verdict is not terminal.status:
        problems.append(
            Violation(
                kind="status",
                witness=str(verdict),
                message=(
                    f"terminal configuration is {verdict}, "
                    f"trace claims {terminal.status}"
                ),
            )
        )
    equivalence = _equivalence_of(t.steps)
    if terminal.equivalence is not None and terminal.equivalence != equivalence:
        problems.append(
            Violation(
                kind="status",
                witness=str(terminal.equivalence),
                message="equivalence marker too strong",
            )
        )
    return problems


def check_trace(t: DerivationTrace) -> TraceCheck:
    """Re-verify every step, the chain and the terminal status."""
    diagnostics: list[Violation] = []

    def note(index: Optional[int], violations: Iterable[Violation]) -> None:
        for v in violations:
            witness = {"step": index, "detail": v.witness}
            diagnostics.append(
                Violation(kind=v.kind, witness=witness, message=v.message)
            )

    expected = t.initial
    for index, step in enumerate(t.steps):
        if step.source != expected:
            message = "step input is not the previous output"
            note(index, [Violation(kind="chain", message=message)])
        note(index, _check_step(step))
        cites_other_n = step.evidence.get("n") != t.n
        if t.n is not None and step.rule is Rule.AXIOM and cites_other_n:
            message = "axiom cites another cover degree"
            note(index, [Violation(kind="axiom", message=message)])
        expected = step.target

    if t.terminal.config != expected:
        note(None, [Violation(kind="chain", message="terminal is not the last output")])
    for name, position in t.checkpoints.items():
        if not 0 <= position <= len(t.steps):
            out_of_range = Violation(
                kind="checkpoint", witness=name, message="index out of range"
            )
            note(None, [out_of_range])
    note(None, _check_terminal(t))
    return TraceCheck(diagnostics=tuple(diagnostics))


# ============================================================================
# Classification
# ============================================================================


class OrbitClassification(BaseModel):
    """Certified vanishing status of one orbit."""

    n: int
    orbit: list[int]
    status: Status
    theta: list[int]
    relation_to_theta: Relation
    steps: int
    trace_ok: bool


def classify_orbit_status(n: int, orbit: Partition) -> OrbitClassification:
    """Vanishing or nonvanishing of the (V_2(O), psi) coefficient.

    Raises:
        UnsupportedOrbitError: If no scripted derivation covers the orbit
    """
    theta = theta_orbit(n, orbit.r)
    relation = dominance_compare(orbit, theta)
    if orbit[0] <= n and relation not in (Relation.LESS, Relation.EQUAL):
        raise UnsupportedOrbitError(orbit=orbit.to_json(), n=n)
    trace = derive_orbit_trace(n, orbit, allow_general=True)
    return OrbitClassification(
        n=n,
        orbit=orbit.to_json(),
        status=trace.terminal.status,
        theta=theta.to_json(),
        relation_to_theta=relation,
        steps=len(trace.steps),
        trace_ok=check_trace(trace).ok,
    )


def classify_rank(n: int, r: int) -> list[OrbitClassification]:
    """Classify every orbit of GL(r), largest first."""
    return [classify_orbit_status(n, orbit) for orbit in partitions_of(r)]
