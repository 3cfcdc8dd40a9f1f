"""
HK computations: counts non-members over the quotient basis with the classifier,
the oracle or both, and cross-checks the two per monomial.
"""

import collections
import dataclasses
import time
from fractions import Fraction
from typing import Counter, Dict, List, Optional, Sequence, Tuple

from contextlog import get_logger

from hkcalc import lib
from hkcalc.classifier import (
    Branch,
    MembershipDecision,
    MutationInvariants,
    Verdict,
    get_classifier,
)
from hkcalc.errors import BudgetError, ContractError, InputError
from hkcalc.monomial import Monomial, Trinomial, format_monomial, iter_monomials_desc
from hkcalc.oracle import MembershipOracle
from hkcalc.parallel import Parallel


class Mode:
    CLASSIFIER = "classifier"
    ORACLE = "oracle"
    BOTH = "both"
    ALL = (CLASSIFIER, ORACLE, BOTH)


@dataclasses.dataclass(frozen=True)
class HKPoint:
    n: int
    q: int
    hk: int
    multiplicity: Fraction

    @property
    def multiplicity_decimal(self) -> float:
        return float(self.multiplicity)


@dataclasses.dataclass(frozen=True)
class HKSeries:
    p: int
    f: Trinomial
    mode: str
    points: Tuple[HKPoint, ...]
    rank_test_count: int = 0
    mismatch_points: Tuple[int, ...] = ()


@dataclasses.dataclass(frozen=True)
class VerifyRow:
    monomial: Monomial
    decision: MembershipDecision
    oracle_verdict: Verdict

    @property
    def agrees(self) -> bool:
        return self.decision.verdict == self.oracle_verdict


RankKey = Tuple[int, int, int, int]  # rank(C), rank([C|e]), rows, cols


@dataclasses.dataclass(frozen=True)
class VerifyReport:
    p: int
    n: int
    q: int
    f: Trinomial
    rows: Tuple[VerifyRow, ...]
    histogram: Dict[Branch, int]
    agreement: Dict[Branch, Tuple[int, int]]
    disagreements: Tuple[VerifyRow, ...]
    clamp_log: Tuple[VerifyRow, ...]
    rank_statistics: Dict[Branch, Dict[RankKey, int]]

    @property
    def hk(self) -> int:
        return sum(1 for row in self.rows if row.oracle_verdict == Verdict.NOT_MEMBER)


@dataclasses.dataclass(frozen=True)
class Explanation:
    monomial: Monomial
    q: int
    invariants: MutationInvariants
    decision: MembershipDecision
    oracle_verdict: Optional[Verdict] = None


# ===== classifier sweep
def _classify_degree(degree: int, f: Trinomial, q: int, detailed: bool):
    classifier = get_classifier(f, q)
    if detailed:
        return [(a, classifier.classify(a)) for a in iter_monomials_desc(f.m, q, degree)]
    counts: Counter[Tuple[Branch, Verdict]] = collections.Counter()
    for a in iter_monomials_desc(f.m, q, degree):
        decision = classifier.classify(a)
        counts[(decision.branch, decision.verdict)] += 1
    return counts


def _sweep(f: Trinomial, q: int, threads: Optional[int], detailed: bool) -> list:
    # one task per total degree; each degree is a contiguous run of the decreasing deglex order
    degrees = list(range(f.m * (q - 1), -1, -1))
    pool = Parallel(_classify_degree, f, q, detailed).tune(parallel=lib.worker_count(threads))
    success, _ = pool.run(degrees, tolerate_fails=False)
    return [success[degree] for degree in degrees]


def classify_all(f: Trinomial, q: int, threads: Optional[int] = None) -> List[Tuple[Monomial, MembershipDecision]]:
    """Decisions for every monomial of the quotient basis, in decreasing deglex"""
    return [item for chunk in _sweep(f, q, threads, detailed=True) for item in chunk]


def branch_counts(f: Trinomial, q: int, threads: Optional[int] = None) -> Counter[Tuple[Branch, Verdict]]:
    total: Counter[Tuple[Branch, Verdict]] = collections.Counter()
    for chunk in _sweep(f, q, threads, detailed=False):
        total.update(chunk)
    return total


# ===== series
def _check_instance(f: Trinomial, p: int, n: int):
    if p != f.p:
        raise ContractError("trinomial was parsed over F_%d, not F_%d" % (f.p, p))
    if n < 1:
        raise InputError("n must be at least 1, got %d" % n)


def _check_enumeration(f: Trinomial, q: int, budget: Optional[int]):
    if budget is None:
        budget = lib.get_context()["enumeration_budget"]
    if q ** f.m > budget:
        raise BudgetError("classifier enumeration", q ** f.m, budget)


def _oracle_budget(budget: Optional[int]) -> int:
    return lib.get_context()["oracle_budget"] if budget is None else budget


def _classifier_hk(f: Trinomial, q: int, threads: Optional[int]) -> Tuple[int, int]:
    counts = branch_counts(f, q, threads)
    hk = sum(count for (_, verdict), count in counts.items() if verdict == Verdict.NOT_MEMBER)
    rank_tests = sum(count for (branch, _), count in counts.items() if branch.is_rank_test)
    return hk, rank_tests


def hk_function(
    f: Trinomial,
    p: int,
    n_max: int,
    mode: str = Mode.CLASSIFIER,
    oracle_budget: Optional[int] = None,
    enumeration_budget: Optional[int] = None,
    threads: Optional[int] = None,
) -> HKSeries:
    _check_instance(f, p, n_max)
    if mode not in Mode.ALL:
        raise InputError("unknown mode %r, expected one of %s" % (mode, ", ".join(Mode.ALL)))
    points = []
    rank_test_count = 0
    mismatches = []
    for n in range(1, n_max + 1):
        q = p ** n
        _logger = get_logger(p=p, n=n, mode=mode)
        started = time.monotonic()
        _logger.info("computing HK(%d) for %s over %d monomials", q, f, q ** f.m)
        if mode in (Mode.CLASSIFIER, Mode.BOTH):
            _check_enumeration(f, q, enumeration_budget)
        if mode in (Mode.ORACLE, Mode.BOTH):
            oracle_hk = MembershipOracle(f, n, _oracle_budget(oracle_budget)).global_dimension()
        if mode == Mode.ORACLE:
            hk = oracle_hk
        else:
            hk, rank_tests = _classifier_hk(f, q, threads)
            rank_test_count += rank_tests
        if mode == Mode.BOTH and hk != oracle_hk:
            _logger.warning("classifier gives HK=%d, oracle gives %d", hk, oracle_hk)
            mismatches.append(n)
        points.append(HKPoint(n, q, hk, Fraction(hk, q ** (f.m - 1))))
        _logger.info("HK(%d)=%d in %.2fs", q, hk, time.monotonic() - started)
    return HKSeries(p, f, mode, tuple(points), rank_test_count, tuple(mismatches))


def multiplicity_estimate(series: HKSeries) -> List[Fraction]:
    if not series.points:
        raise ContractError("empty series")
    return [Fraction(point.hk, point.q ** (series.f.m - 1)) for point in series.points]


# ===== verification
def verify(
    f: Trinomial,
    p: int,
    n: int,
    budget: Optional[int] = None,
    threads: Optional[int] = None,
) -> VerifyReport:
    _check_instance(f, p, n)
    oracle = MembershipOracle(f, n, _oracle_budget(budget))
    members = oracle.members()
    rows = []
    for a, decision in classify_all(f, oracle.q, threads):
        oracle_verdict = Verdict.of(oracle.basis.index(a) in members)
        rows.append(VerifyRow(a, decision, oracle_verdict))
    report = build_report(f, n, oracle.q, rows)
    _logger = get_logger(p=p, n=n, poly=f.serialize())
    for row in report.disagreements:
        _logger.warning(
            "%s on %s: classifier says %s, oracle says %s",
            row.decision.branch.value, format_monomial(row.monomial),
            row.decision.verdict.value, row.oracle_verdict.value,
        )
    _logger.info("verified %d monomials, %d disagreements", len(rows), len(report.disagreements))
    return report


def build_report(f: Trinomial, n: int, q: int, rows: Sequence[VerifyRow]) -> VerifyReport:
    histogram: Counter[Branch] = collections.Counter()
    agree: Counter[Branch] = collections.Counter()
    ranks: Dict[Branch, Counter[RankKey]] = {}
    for row in rows:
        branch = row.decision.branch
        histogram[branch] += 1
        agree[branch] += row.agrees
        witness = row.decision.rank_witness
        if witness is not None:
            key = (witness.rank_c, witness.rank_ce, witness.rows, witness.cols)
            ranks.setdefault(branch, collections.Counter())[key] += 1
    order = [branch for branch in Branch if branch in histogram]
    return VerifyReport(
        p=f.p,
        n=n,
        q=q,
        f=f,
        rows=tuple(rows),
        histogram={branch: histogram[branch] for branch in order},
        agreement={branch: (agree[branch], histogram[branch] - agree[branch]) for branch in order},
        disagreements=tuple(row for row in rows if not row.agrees),
        clamp_log=tuple(row for row in rows if row.decision.rank_witness and row.decision.rank_witness.clamped),
        rank_statistics={
            branch: dict(sorted(ranks[branch].items()))
            for branch in order if branch in ranks
        },
    )


def explain(
    f: Trinomial,
    p: int,
    n: int,
    monomial: Monomial,
    check: bool = False,
    budget: Optional[int] = None,
) -> Explanation:
    _check_instance(f, p, n)
    q = p ** n
    if monomial.m != f.m or any(e >= q for e in monomial):
        raise InputError("%s is not in the quotient basis for q=%d over %d variables" % (monomial, q, f.m))
    classifier = get_classifier(f, q)
    oracle_verdict = None
    if check:
        oracle_verdict = Verdict.of(MembershipOracle(f, n, _oracle_budget(budget)).member_direct(monomial))
    return Explanation(monomial, q, classifier.invariants(monomial), classifier.classify(monomial), oracle_verdict)
