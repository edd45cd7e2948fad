from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from novelty_oracle.partitions import EMPTY, enumerate_partitions, parse_partition
from novelty_oracle.rules import (
    DeMorgan,
    Ewens,
    InvalidRuleError,
    Kuipers,
    MixtureRule,
    RuleSyntaxError,
    TabulatedRule,
    TwoParameter,
    parse_rule,
    predictive,
    tabulate,
    validate,
)
from oracles import kuipers_predictive, two_param_predictive

RULES = [
    TwoParameter(0.5, 1.0),
    TwoParameter(0.0, 0.3),
    TwoParameter(0.9, -0.8),
    Ewens(2.0),
    Ewens(0.1),
    DeMorgan(),
    Kuipers(2.0, 2.0),
    Kuipers(0.3, 5.0),
    MixtureRule((TwoParameter(0.2, 1.0), TwoParameter(0.7, 3.0)), (0.5, 0.5)),
]


def test_validate_ok():
    validate(TwoParameter(0.5, 1))


@pytest.mark.parametrize("rule,bound", [
    (TwoParameter(1.0, 1), "alpha < 1"),
    (TwoParameter(-0.1, 1), "0 <= alpha"),
    (TwoParameter(0.5, -0.5), "theta > -alpha"),
    (Ewens(0), "theta > 0"),
    (Kuipers(0, 1), "lambda > 0"),
    (Kuipers(1, -1), "delta > 0"),
    (TwoParameter(0.5, float("nan")), "finite"),
])
def test_validate_errors(rule, bound):
    with pytest.raises(InvalidRuleError, match=bound):
        validate(rule)


def test_demorgan_example():
    d = predictive(DeMorgan(), parse_partition("{1}"))
    assert d.known == (0.5,) and d.novelty == 0.5


def test_two_param_symbolic_example():
    # exact route: rational alpha, theta
    for a, th in [(F(1, 2), F(1)), (F(0), F(3)), (F(3, 10), F(-1, 5))]:
        d = predictive(TwoParameter(a, th), parse_partition("{1}{2,3}"))
        assert d.known == ((1 - a) / (3 + th), (2 - a) / (3 + th))
        assert d.novelty == (2 * a + th) / (3 + th)


def test_kuipers_example():
    d = predictive(Kuipers(2, 2), parse_partition("{1}{2}"), exact=True)
    assert d.novelty == F(3, 4)
    assert d.known == (F(1, 8), F(1, 8))
    assert d.total() == 1


@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.literal)
def test_empty_history_is_novel(rule):
    d = predictive(rule, EMPTY)
    assert d.known == () and d.novelty == 1


@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.literal)
def test_normalization_exhaustive(rule):
    for T in range(1, 9):
        for p in enumerate_partitions(T):
            d = rule.predictive(p)
            assert len(d.known) == p.k
            assert all(x >= 0 for x in d.probs())
            assert abs(d.total() - 1) <= 1e-12


@pytest.mark.parametrize("T", range(1, 7))
def test_exact_mode_matches_oracle_formulas(T):
    a, th = F(3, 10), F(7, 4)
    lam, de = F(5, 2), F(3, 2)
    for p in enumerate_partitions(T):
        assert list(predictive(TwoParameter(a, th), p).probs()) == two_param_predictive(a, th, p.rgs)
        assert list(predictive(Kuipers(lam, de), p, exact=True).probs()) == kuipers_predictive(lam, de, p.rgs)
        assert predictive(Kuipers(2, 2), p, exact=True).total() == 1


def test_two_param_frequency_dependence():
    rule = TwoParameter(0.35, 0.8)
    for T in range(1, 9):
        known, nov = {}, {}
        for p in enumerate_partitions(T):
            d = rule.predictive(p)
            for n, q in zip(p.block_sizes, d.known):
                assert known.setdefault(n, q) == q
            assert nov.setdefault(p.k, d.novelty) == d.novelty


def test_ewens_novelty_depends_on_T_only():
    rule = Ewens(2.5)
    for T in range(1, 9):
        values = {rule.predictive(p).novelty for p in enumerate_partitions(T)}
        assert len(values) == 1


def test_demorgan_bitwise_equals_ewens_one():
    for T in range(1, 9):
        for p in enumerate_partitions(T):
            assert DeMorgan().predictive(p) == Ewens(1).predictive(p) == Ewens(1.0).predictive(p)


@given(st.floats(0.01, 50))
def test_two_param_alpha_zero_is_ewens(theta):
    for T in range(1, 6):
        for p in enumerate_partitions(T):
            a, b = TwoParameter(0.0, theta).predictive(p), Ewens(theta).predictive(p)
            assert all(abs(x - y) <= 1e-15 for x, y in zip(a.probs(), b.probs()))


def test_kuipers_block_count_dependence_witness():
    rule = Kuipers(2, 2)
    # same T = 4, block of size 2, different block counts
    q1 = rule.predictive(parse_partition("1,1,2,2")).known[0]
    q2 = rule.predictive(parse_partition("1,1,2,3")).known[0]
    assert q1 != q2


@pytest.mark.parametrize("text,rule", [
    ("two-param:alpha=0.5,theta=1", TwoParameter(0.5, 1.0)),
    ("ewens:theta=2", Ewens(2.0)),
    ("demorgan", DeMorgan()),
    ("kuipers:lambda=2,delta=2", Kuipers(2.0, 2.0)),
    ("Kuipers: delta=2, lambda=3", Kuipers(3.0, 2.0)),
])
def test_parse_rule(text, rule):
    assert parse_rule(text) == rule


@pytest.mark.parametrize("rule", RULES[:8], ids=lambda r: r.literal)
def test_literal_round_trip(rule):
    assert parse_rule(rule.literal) == rule


@pytest.mark.parametrize("text", [
    "pitman", "ewens", "ewens:theta", "ewens:theta=x", "two-param:alpha=0.5",
    "kuipers:lambda=1,delta=1,lambda=2", "demorgan:theta=1", "table:",
])
def test_parse_rule_errors(text):
    with pytest.raises(RuleSyntaxError):
        parse_rule(text)


def test_parse_rule_rejects_out_of_range():
    with pytest.raises(InvalidRuleError):
        parse_rule("two-param:alpha=1,theta=1")


def test_table_round_trip(tmp_path):
    rule = TwoParameter(0.25, 2.0)
    tab = tabulate(rule, 4)
    path = tmp_path / "rule.json"
    import json

    path.write_text(json.dumps(tab.to_json()))
    loaded = parse_rule(f"table:{path}")
    assert isinstance(loaded, TabulatedRule)
    for T in range(1, 5):
        for p in enumerate_partitions(T):
            assert loaded.predictive(p).probs() == pytest.approx(rule.predictive(p).probs(), abs=1e-15)


def test_table_validation():
    with pytest.raises(InvalidRuleError, match="sum to 1"):
        TabulatedRule.from_json({"rule": "table", "entries": {"1": [0.5, 0.4]}})
    with pytest.raises(InvalidRuleError, match="needs 3"):
        TabulatedRule.from_json({"rule": "table", "entries": {"1,2": [0.5, 0.5]}})
    tab = TabulatedRule.from_json({"rule": "table", "entries": {"1": [0.5, 0.5]}})
    with pytest.raises(InvalidRuleError, match="no entry"):
        tab.predictive(parse_partition("1,1"))


def test_mixture_of_one_component_is_that_component():
    mix = MixtureRule((TwoParameter(0.4, 1.5),), (1.0,))
    for T in range(1, 6):
        for p in enumerate_partitions(T):
            assert mix.predictive(p).probs() == pytest.approx(TwoParameter(0.4, 1.5).predictive(p).probs(), rel=1e-12)
