"""Acceptance battery runner.

Each case is an independent exact check; cases run on a thread pool and
the report lists them in a fixed order, so the output does not depend on
scheduling or on the number of workers.
"""

import json
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Any, Optional

from tqdm import tqdm

from src.config import Settings
from src.constants import CheckMode, DimKind, LogAction, WeightVariant
from src.exceptions import MetaplecticError
from src.exchange_derivation import (
    check_trace,
    derive_exchange_trace,
    derive_orbit_trace,
)
from src.jacquet_dimensions import index_identities, semi_whittaker_dim, vanishes
from src.logging_config import MetaplecticLogger
from src.metaplectic_cocycle import (
    check_block_compatibility_exhaustive,
    check_cocycle_identity,
    make_params,
)
from src.models import with_schema
from src.partitions_orbits import (
    Composition,
    Partition,
    check_theta_attachment,
    compositions_of,
    orbit_weights,
    partitions_of,
    theta_orbit,
)
from src.tame_local_field import check_hilbert_axioms, make_field, tame_primes
from src.torus_cover import (
    build_cover,
    center_bruteforce,
    is_maximal_abelian,
    named_subgroup,
)
from src.utils.time_utils import elapsed_ms, format_duration

CaseOutcome = tuple[bool, dict[str, Any]]


@dataclass(frozen=True)
class SuiteCase:
    """One acceptance case."""

    number: int
    name: str
    run: Callable[[], CaseOutcome]


def _smallest_q(n: int) -> int:
    return tame_primes(n, 1)[0]


def _multiplicity_one() -> CaseOutcome:
    cases = [
        (2, 0, (2, 2)),
        (2, 1, (2, 2)),
        (3, 0, (3, 3)),
        (3, 1, (3, 3)),
        (3, 2, (3, 3)),
    ]
    results = {}
    for n, c, parts in cases:
        dim = semi_whittaker_dim(n, _smallest_q(n), c, Composition(parts))
        results[f"n={n},c={c},lambda={list(parts)}"] = dim.to_payload()
    passed = all(v == {"kind": "exact", "value": 1} for v in results.values())
    return passed, results


def _odd_rank() -> CaseOutcome:
    dim = semi_whittaker_dim(2, 3, 0, Composition((2, 1)))
    return dim.kind is DimKind.EXACT and dim.value == 1, dim.to_payload()


def _vanishing() -> CaseOutcome:
    failures = []
    checked = 0
    for r in range(1, 7):
        for composition in compositions_of(r):
            if not vanishes(2, composition):
                continue
            checked += 1
            if not semi_whittaker_dim(2, 3, 0, composition).is_zero:
                failures.append(composition.to_json())
    return not failures, {"checked": checked, "failures": failures}


def _hilbert_axioms() -> CaseOutcome:
    reports = {
        f"n={n},q={q}": check_hilbert_axioms(make_field(n, q))
        for n, q in ((2, 3), (3, 7), (4, 5))
    }
    return all(r.passed for r in reports.values()), {
        k: len(r.violations) for k, r in reports.items()
    }


def _cocycle() -> CaseOutcome:
    reports = {}
    for n, r, c in ((2, 2, 0), (2, 2, 1), (3, 2, 0)):
        p = make_params(n, _smallest_q(n), c, r)
        key = f"n={n},r={r},c={c}"
        reports[key] = check_cocycle_identity(p, CheckMode.EXHAUSTIVE)
    return all(r.passed for r in reports.values()), {
        k: len(r.violations) for k, r in reports.items()
    }


def _block_compatibility() -> CaseOutcome:
    reports = {}
    for n, c in ((2, 0), (2, 1), (3, 0)):
        p = make_params(n, _smallest_q(n), c, 3)
        reports[f"n={n},c={c}"] = check_block_compatibility_exhaustive(
            p, Composition((2, 1))
        )
    return all(r.passed for r in reports.values()), {
        k: len(r.violations) for k, r in reports.items()
    }


def _centers() -> CaseOutcome:
    cases = [(n, r, c) for n in (2, 3) for r in (1, 2, 3) for c in range(n)]
    cases.append((3, 4, 0))
    results = {}
    for n, r, c in cases:
        G = build_cover(make_params(n, _smallest_q(n), c, r))
        results[f"n={n},r={r},c={c}"] = center_bruteforce(G).same_members(
            named_subgroup(G, "center")
        )
    return all(results.values()), results


def _maximal_abelian() -> CaseOutcome:
    results = {}
    for (n, r), c in product(((2, 2), (2, 3), (3, 2)), (0, 1)):
        G = build_cover(make_params(n, _smallest_q(n), c, r))
        sq = named_subgroup(G, "sq")
        results[f"n={n},r={r},c={c}"] = {
            "std": is_maximal_abelian(G, named_subgroup(G, "std")),
            "center_n_sq_o": is_maximal_abelian(
                G, named_subgroup(G, "center_n_sq_o"), sq
            ),
        }
    passed = all(all(v.values()) for v in results.values())
    return passed, results


def _orbit_attachment() -> CaseOutcome:
    failures = []
    for n in range(2, 6):
        for r in range(1, 13):
            report = check_theta_attachment(n, r)
            if not report.passed:
                failures.append(
                    {"n": n, "r": r, "violations": len(report.violations)}
                )
    orbit = Partition((3, 3, 1))
    h = list(orbit_weights(orbit, WeightVariant.STANDARD))
    h_prime = list(orbit_weights(orbit, WeightVariant.PRIME))
    vectors_ok = h == [2, 2, 0, 0, 0, -2, -2] and h_prime == [2, 0, -2, 2, 0, 0, -2]
    detail = {"failures": failures, "h": h, "h_prime": h_prime}
    return not failures and vectors_ok, detail


def _derivations() -> CaseOutcome:
    failures = []
    checked = 0
    for n in range(2, 5):
        for r in range(1, 11):
            theta = theta_orbit(n, r)
            for orbit in partitions_of(r):
                if orbit[0] <= n and orbit != theta:
                    continue
                checked += 1
                if not check_trace(derive_orbit_trace(n, orbit)).ok:
                    failures.append({"n": n, "orbit": orbit.to_json()})
    single = derive_exchange_trace(Partition((3, 1)))
    one_step = len(single.steps) == 1 and check_trace(single).ok
    step = single.steps[0]
    mutated = replace(single, steps=(replace(step, target=step.source),))
    rejected = not check_trace(mutated).ok
    return not failures and one_step and rejected, {
        "checked": checked,
        "failures": failures,
        "exchange_31_steps": len(single.steps),
        "mutation_rejected": rejected,
    }


def _index_identities() -> CaseOutcome:
    results = {}
    for n in (2, 3):
        for parts in ((2, 1), (2, 2)):
            ratios = index_identities(n, _smallest_q(n), 0, Composition(parts))
            key = f"n={n},lambda={list(parts)}"
            results[key] = {k: str(v) for k, v in ratios.items()}
    passed = all(v == "1" for ratios in results.values() for v in ratios.values())
    return passed, results


ACCEPTANCE_CASES: tuple[SuiteCase, ...] = (
    SuiteCase(1, "multiplicity_one", _multiplicity_one),
    SuiteCase(2, "odd_rank_multiplicity_one", _odd_rank),
    SuiteCase(3, "vanishing", _vanishing),
    SuiteCase(4, "hilbert_axioms", _hilbert_axioms),
    SuiteCase(5, "cocycle_identity", _cocycle),
    SuiteCase(6, "block_compatibility", _block_compatibility),
    SuiteCase(7, "center_lemmas", _centers),
    SuiteCase(8, "maximal_abelian", _maximal_abelian),
    SuiteCase(9, "orbit_attachment", _orbit_attachment),
    SuiteCase(10, "derivation_engine", _derivations),
    SuiteCase(11, "index_identities", _index_identities),
)


class SuiteReport:
    """Pass/fail table of an acceptance run."""

    def __init__(self) -> None:
        self.results: dict[int, dict[str, Any]] = {}
        self.start_time = time.perf_counter()
        self.duration_ms: Optional[int] = None

    def add_result(self, case: SuiteCase, passed: bool, detail: Any) -> None:
        """Record a finished case."""
        self.results[case.number] = {
            "case": case.number,
            "name": case.name,
            "passed": passed,
            "detail": detail,
        }

    def add_error(self, case: SuiteCase, error: MetaplecticError) -> None:
        """Record a case aborted by a computation error."""
        self.results[case.number] = {
            "case": case.number,
            "name": case.name,
            "passed": False,
            "detail": error.to_payload(),
        }

    def finalize(self) -> None:
        self.duration_ms = elapsed_ms(self.start_time)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r["passed"] for r in self.results.values())

    def ordered(self) -> list[dict[str, Any]]:
        return [self.results[k] for k in sorted(self.results)]

    def to_payload(self) -> dict[str, Any]:
        """Deterministic JSON form (no timings)."""
        return with_schema(
            {
                "passed": self.passed,
                "summary": {
                    "total": len(self.results),
                    "passed": sum(1 for r in self.results.values() if r["passed"]),
                    "failed": sum(
                        1 for r in self.results.values() if not r["passed"]
                    ),
                },
                "cases": self.ordered(),
            }
        )

    def print_summary(self) -> None:
        """Print the pass/fail table."""
        payload = self.to_payload()
        print("\n" + "=" * 70)
        print("📊 ACCEPTANCE SUITE")
        print("=" * 70)
        for row in payload["cases"]:
            mark = "✅" if row["passed"] else "❌"
            print(f"{mark} {row['case']:>2}. {row['name']}")
        print("=" * 70)
        summary = payload["summary"]
        print(f"✅ Passed: {summary['passed']}")
        print(f"❌ Failed: {summary['failed']}")
        print("=" * 70)

    def save_json(self, output_path: Path) -> None:
        """Write the deterministic payload to a file."""
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(self.to_payload(), f, indent=2, ensure_ascii=False)


class SuiteService:
    """Runs acceptance cases on a thread pool.

    Attributes:
        settings: Application settings
        logger: Logger instance
    """

    def __init__(self, settings: Settings, logger: MetaplecticLogger) -> None:
        self.settings = settings
        self.logger = logger

    def _run_case(
        self, case: SuiteCase
    ) -> tuple[SuiteCase, Optional[CaseOutcome], Optional[MetaplecticError]]:
        start = time.perf_counter()
        try:
            outcome = case.run()
        except MetaplecticError as e:
            self.logger.error(
                f"Case {case.number} failed with an error",
                action=LogAction.SUITE,
                case=case.name,
                error=str(e),
            )
            return case, None, e
        self.logger.debug(
            f"Case {case.number} finished",
            action=LogAction.CHECK,
            case=case.name,
            passed=outcome[0],
            duration=format_duration(elapsed_ms(start)),
        )
        return case, outcome, None

    def run(
        self,
        workers: Optional[int] = None,
        cases: Optional[tuple[SuiteCase, ...]] = None,
        progress: bool = True,
        report_path: Optional[Path] = None,
    ) -> SuiteReport:
        """Run the battery and return its report.

        Args:
            workers: Thread pool size (defaults to settings.workers)
            cases: Subset of cases to run (defaults to all)
            progress: Show a tqdm progress bar
            report_path: Optional JSON report destination
        """
        selected = cases if cases is not None else ACCEPTANCE_CASES
        max_workers = workers or self.settings.workers
        report = SuiteReport()
        self.logger.info(
            "Running acceptance suite",
            action=LogAction.SUITE,
            cases=len(selected),
            workers=max_workers,
        )

        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = [executor.submit(self._run_case, case) for case in selected]
            completed = as_completed(futures)
            iterator = (
                tqdm(completed, total=len(futures), desc="Acceptance cases")
                if progress
                else completed
            )
            for future in iterator:
                case, outcome, error = future.result()
                if error is not None:
                    report.add_error(case, error)
                elif outcome is not None:
                    report.add_result(case, *outcome)

        report.finalize()
        self.logger.info(
            "Acceptance suite finished",
            action=LogAction.SUCCESS if report.passed else LogAction.SUITE,
            passed=report.passed,
            duration=format_duration(report.duration_ms or 0),
        )
        if report_path is not None:
            report.save_json(report_path)
            self.logger.info(
                "Suite report saved", action=LogAction.SUCCESS, path=str(report_path)
            )
        return report
