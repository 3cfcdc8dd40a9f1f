"""
Per-monomial membership decisions from the four mutation invariants.

The classifier only looks at exponents: coefficients of the trinomial are never read,
so any rescaling of the three terms gives the same decisions.
"""

import dataclasses
import enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from contextlog import get_logger

from hkcalc.field import rank
from hkcalc.monomial import Monomial, Trinomial
from hkcalc.tables import EntryContext, Subcase, build_C, is_member_by_rank


class Verdict(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not_member"

    @classmethod
    def of(cls, member: bool) -> "Verdict":
        return cls.MEMBER if member else cls.NOT_MEMBER


class Branch(enum.Enum):
    COND_I = "Cond_i"
    COND_II = "Cond_ii"
    NO_TERM_DIVIDES = "NoTermDivides"
    ALWAYS_SOLVABLE_I1 = "AlwaysSolvable_I1"
    ALWAYS_SOLVABLE_II1 = "AlwaysSolvable_II1"
    RANK_TEST_T5 = "RankTest_T5"
    RANK_TEST_T6 = "RankTest_T6"
    RANK_TEST_T8 = "RankTest_T8"
    IFF_1MIN_LE_NEG2MAX = "Iff_1min_le_neg2max"
    UNSOLVABLE_REMARK = "Unsolvable_Remark"
    UNSOLVABLE_II3A = "Unsolvable_II3a"
    UNSOLVABLE_II3B = "Unsolvable_II3b"
    UNSOLVABLE_II3C = "Unsolvable_II3c"

    @property
    def is_rank_test(self) -> bool:
        return self in RANK_TEST_TABLES


RANK_TEST_TABLES: Dict[Branch, Subcase] = {
    Branch.RANK_TEST_T5: Subcase.T5,
    Branch.RANK_TEST_T6: Subcase.T6,
    Branch.RANK_TEST_T8: Subcase.T8,
}

# branches proven outright; a disagreement with the oracle there is a bug, not a finding
SETTLED_BRANCHES = frozenset(branch for branch in Branch if not branch.is_rank_test)


@dataclasses.dataclass(frozen=True)
class MutationInvariants:
    one_min: int
    two_min: int
    neg2_max: int
    neg3_max: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.one_min, self.two_min, self.neg2_max, self.neg3_max)


@dataclasses.dataclass(frozen=True)
class RankWitness:
    rows: int
    cols: int
    rank_c: int
    rank_ce: int
    clamped: bool = False

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)


@dataclasses.dataclass(frozen=True)
class MembershipDecision:
    verdict: Verdict
    branch: Branch
    rank_witness: Optional[RankWitness] = None

    @property
    def is_member(self) -> bool:
        return self.verdict == Verdict.MEMBER


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class Classifier:
    """Decision tree bound to one trinomial and one q; supports are precomputed"""

    def __init__(self, f: Trinomial, q: int):
        self.f = f
        self.q = q
        self.p = f.p
        self._supports: List[Tuple[Tuple[int, int], ...]] = [
            tuple((i, e) for i, e in enumerate(term.monomial) if e)
            for term in f.terms
        ]

    def _divides(self, label: int, a: Sequence[int]) -> bool:
        return all(a[i] >= e for i, e in self._supports[label])

    def _needed(self, label: int, a: Sequence[int]) -> int:
        return min(_ceil_div(self.q - a[i], e) for i, e in self._supports[label])

    def _removable(self, label: int, a: Sequence[int]) -> int:
        return min(a[i] // e for i, e in self._supports[label])

    def invariants(self, a: Sequence[int]) -> MutationInvariants:
        return MutationInvariants(
            one_min=self._needed(0, a),
            two_min=self._needed(1, a),
            neg2_max=self._removable(1, a),
            neg3_max=self._removable(2, a),
        )

    def classify(self, a: Sequence[int]) -> MembershipDecision:
        if self._divides(0, a):
            return MembershipDecision(Verdict.MEMBER, Branch.COND_I)
        inv = self.invariants(a)
        one, two, neg2, neg3 = inv.as_tuple()
        if neg2 >= 1 and one <= neg2:
            return MembershipDecision(Verdict.MEMBER, Branch.COND_II)
        if neg3 == 0:
            return MembershipDecision(Verdict.NOT_MEMBER, Branch.NO_TERM_DIVIDES)

        low, high = max(one, two), one + two - 1
        if neg2 == 0:
            if neg3 >= high:
                return MembershipDecision(Verdict.MEMBER, Branch.ALWAYS_SOLVABLE_II1)
            if neg3 >= low:
                return self._rank_test(inv, Branch.RANK_TEST_T8)
            if neg3 < two:
                branch = Branch.UNSOLVABLE_II3A if neg3 >= one else Branch.UNSOLVABLE_II3B
            else:
                branch = Branch.UNSOLVABLE_II3C
            return MembershipDecision(Verdict.NOT_MEMBER, branch)

        if neg3 >= high:
            return MembershipDecision(Verdict.MEMBER, Branch.ALWAYS_SOLVABLE_I1)
        if neg3 >= low:
            return self._rank_test(inv, Branch.RANK_TEST_T5)
        if neg3 < two:
            if neg3 >= one or one <= neg2 + neg3:
                return MembershipDecision(Verdict.of(one <= neg2), Branch.IFF_1MIN_LE_NEG2MAX)
            return MembershipDecision(Verdict.NOT_MEMBER, Branch.UNSOLVABLE_REMARK)
        return self._rank_test(inv, Branch.RANK_TEST_T6)

    def _rank_test(self, inv: MutationInvariants, branch: Branch) -> MembershipDecision:
        member, witness = rank_decision(EntryContext.from_invariants(inv, self.p), RANK_TEST_TABLES[branch])
        return MembershipDecision(Verdict.of(member), branch, witness)


@lru_cache(maxsize=4096)
def rank_decision(ctx: EntryContext, subcase: Subcase) -> Tuple[bool, RankWitness]:
    """Builds the closed-form system for a rank-test branch and records its ranks"""
    system = build_C(ctx, subcase)
    member = is_member_by_rank(system)
    rank_c = rank(system.C)
    # with no rows left the unit of e is still owed, count it as an extra rank
    rank_ce = rank(system.C.augment(system.e)) if system.C.rows else 1
    get_logger(table=subcase.value).debug(
        "rank test %dx%d: rank(C)=%d rank([C|e])=%d", system.C.rows, system.C.cols, rank_c, rank_ce,
    )
    return member, RankWitness(system.C.rows, system.C.cols, rank_c, rank_ce, system.clamped)


@lru_cache(maxsize=64)
def get_classifier(f: Trinomial, q: int) -> Classifier:
    return Classifier(f, q)


def invariants(a: Monomial, f: Trinomial, q: int) -> MutationInvariants:
    return get_classifier(f, q).invariants(a)


def classify(a: Monomial, f: Trinomial, q: int) -> MembershipDecision:
    return get_classifier(f, q).classify(a)
