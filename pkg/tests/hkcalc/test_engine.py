import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hkcalc import engine
from hkcalc.classifier import SETTLED_BRANCHES, Branch, Verdict
from hkcalc.engine import Mode
from hkcalc.errors import BudgetError, ContractError, InputError
from hkcalc.monomial import Monomial, build_trinomial, parse_trinomial
from hkcalc.oracle import MembershipOracle

from .hk_data import get_samples, sample_trinomial


LINEAR_P2 = parse_trinomial("x1 + x2 + x3", 2)


def _mode_samples():
    for fname, sample in get_samples():
        for mode in sample["modes"]:
            yield pytest.param(sample, mode, id="%s-%s" % (fname, mode))


@pytest.mark.parametrize("sample, mode", _mode_samples())
def test_hk_samples(sample, mode):
    f = sample_trinomial(sample)
    expected = sample["hk"]
    series = engine.hk_function(f, sample["prime"], max(expected), mode)
    assert {point.n: point.hk for point in series.points} == expected
    assert series.mismatch_points == ()
    for point in series.points:
        assert point.q == sample["prime"] ** point.n
        assert point.multiplicity == Fraction(point.hk, point.q ** (f.m - 1))


def test_linear_multiplicity():
    series = engine.hk_function(LINEAR_P2, 2, 2)
    assert engine.multiplicity_estimate(series) == [Fraction(1), Fraction(1)]
    assert series.points[0].multiplicity_decimal == 1.0


def test_rank_test_count():
    series = engine.hk_function(LINEAR_P2, 2, 1)
    # only x2*x3 reaches a rank test
    assert series.rank_test_count == 1
    assert engine.hk_function(LINEAR_P2, 2, 1, Mode.ORACLE).rank_test_count == 0


def test_hk_function_errors():
    with pytest.raises(InputError):
        engine.hk_function(LINEAR_P2, 2, 1, "guess")
    with pytest.raises(InputError):
        engine.hk_function(LINEAR_P2, 2, 0)
    with pytest.raises(ContractError):
        engine.hk_function(LINEAR_P2, 3, 1)
    with pytest.raises(BudgetError):
        engine.hk_function(LINEAR_P2, 2, 2, enumeration_budget=10)
    with pytest.raises(BudgetError):
        engine.hk_function(LINEAR_P2, 2, 2, Mode.ORACLE, oracle_budget=10)


def test_empty_series_has_no_multiplicity():
    series = engine.HKSeries(2, LINEAR_P2, Mode.CLASSIFIER, ())
    with pytest.raises(ContractError):
        engine.multiplicity_estimate(series)


def test_verify_linear_p2():
    report = engine.verify(LINEAR_P2, 2, 1)
    assert report.histogram == {
        Branch.COND_I: 4,
        Branch.NO_TERM_DIVIDES: 2,
        Branch.RANK_TEST_T6: 1,
        Branch.UNSOLVABLE_II3B: 1,
    }
    assert report.disagreements == ()
    assert report.hk == 4
    assert report.agreement[Branch.COND_I] == (4, 0)
    assert [row.monomial for row in report.clamp_log] == [Monomial((0, 1, 1))]
    assert report.rank_statistics == {Branch.RANK_TEST_T6: {(0, 1, 1, 1): 1}}
    assert [row.monomial for row in report.rows][:2] == [Monomial((1, 1, 1)), Monomial((0, 1, 1))]


@pytest.mark.parametrize("text, p, n", [
    ("x1 + x2 + x3", 2, 2),
    ("x1 + x2 + x3", 3, 1),
    ("x1^2 + x2^2 + x3^3", 3, 1),
    ("x1^2 + x2^3 + x3^5", 2, 3),
    ("x1^2 + x2^2 + x3^2", 5, 1),
])
def test_settled_branches_agree_with_oracle(text, p, n):
    report = engine.verify(parse_trinomial(text, p), p, n)
    assert len(report.rows) == (p ** n) ** 3
    for row in report.disagreements:
        assert row.decision.branch not in SETTLED_BRANCHES, row


@st.composite
def small_instances(draw):
    m = draw(st.sampled_from([3, 4, 5]))
    # every term owns a variable, the other variables may be free
    extra = draw(st.lists(st.sampled_from([0, 1, 2, None]), min_size=m - 3, max_size=m - 3))
    owners = draw(st.permutations([0, 1, 2] + extra))
    exponents = [[0] * m for _ in range(3)]
    for var, owner in enumerate(owners):
        if owner is not None:
            exponents[owner][var] = draw(st.integers(min_value=1, max_value=4))
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.sampled_from([n for n in (1, 2, 3) if p ** n <= 9 and p ** (n * m) <= 4096]))
    coefficients = draw(st.lists(st.integers(min_value=1, max_value=p - 1), min_size=3, max_size=3))
    return build_trinomial(list(zip(coefficients, exponents)), p), n


@settings(max_examples=40, deadline=None)
@given(small_instances())
def test_random_corpus(instance):
    f, n = instance
    report = engine.verify(f, f.p, n)
    oracle = MembershipOracle(f, n)
    assert report.hk == oracle.global_dimension()
    for row in report.disagreements:
        assert row.decision.branch not in SETTLED_BRANCHES, row


def _coefficient_triples(p, count=20):
    triples = list(itertools.product(range(1, p), repeat=3))
    if len(triples) <= count:
        return triples
    rng = np.random.default_rng(p)
    return [triples[i] for i in rng.choice(len(triples), size=count, replace=False)]


@pytest.mark.parametrize("text, p, n", [
    ("x1^2 + x2^2 + x3^3", 3, 2),
    ("x1*x4 + x2^2 + x3", 3, 1),
    ("x1^2*x5 + x2*x4 + x3^2", 3, 1),
    ("x1 + x2^2 + x3^3", 5, 1),
    ("x1^2 + x2*x4 + x3^3", 5, 1),
    ("x1^3 + x2^2 + x3^4", 7, 1),
])
def test_colength_ignores_coefficients(text, p, n):
    # over the algebraic closure a rescaling of the variables absorbs every coefficient
    f = parse_trinomial(text, p)
    expected = MembershipOracle(f, n).global_dimension()
    for coefficients in _coefficient_triples(p):
        assert MembershipOracle(f.with_coefficients(coefficients), n).global_dimension() == expected, coefficients


def test_every_branch_agrees_on_mixed_instance():
    f = parse_trinomial("x1^3 + x2^3 + x3^2*x4^2", 2)
    report = engine.verify(f, 2, 3)
    assert set(report.histogram) == set(Branch)
    assert report.disagreements == ()
    for branch, (agree, disagree) in report.agreement.items():
        assert agree == report.histogram[branch] and disagree == 0, branch


def test_classify_all_is_deterministic():
    f = parse_trinomial("x1^2 + x2^3 + x3^4", 3)
    single = engine.classify_all(f, 9, threads=1)
    pooled = engine.classify_all(f, 9, threads=2)
    assert single == pooled
    assert len(single) == 9 ** 3
    assert engine.branch_counts(f, 9, threads=1) == engine.branch_counts(f, 9, threads=2)


def test_both_mode_reports_no_mismatch():
    series = engine.hk_function(parse_trinomial("x1 + x2 + x3", 3), 3, 1, Mode.BOTH)
    assert series.mismatch_points == ()
    assert series.points[0].hk == 9


def test_explain():
    explanation = engine.explain(LINEAR_P2, 2, 1, Monomial((0, 1, 1)), check=True)
    assert explanation.invariants.as_tuple() == (2, 1, 1, 1)
    assert explanation.decision.branch == Branch.RANK_TEST_T6
    assert explanation.oracle_verdict == Verdict.NOT_MEMBER
    assert engine.explain(LINEAR_P2, 2, 1, Monomial((1, 1, 0))).oracle_verdict is None


def test_explain_outside_basis():
    with pytest.raises(InputError):
        engine.explain(LINEAR_P2, 2, 1, Monomial((2, 0, 0)))
    with pytest.raises(InputError):
        engine.explain(LINEAR_P2, 2, 1, Monomial((1, 0)))
