from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pmcdag import oracle
from pmcdag.acir import DagStore, eval_exact
from pmcdag.corpus import bundled
from pmcdag.elim import reach_probability
from pmcdag.errors import IndexOutOfRange
from pmcdag.modelio import parse_model
from pmcdag.pmc import (Pmc, UnderlyingGraph, bsccs, check_stochastic, post,
                        pre, reachable_from, sccs, trim_unreachable)

from randmodels import random_lra_model, random_reach_model, rng_for, valuation


@pytest.fixture(scope="module")
def dice():
    return bundled("dice")


def test_dice_pre_post(dice):
    assert post(dice, 0) == {1, 2}
    assert pre(dice, 1) == {0, 3}
    assert post(dice, 7) == set()
    assert dice.successors(7) == [7]


def test_dice_shape(dice):
    assert dice.n == 13 and dice.parameters == ["x"]
    for s in range(7):
        assert len(dice.rows[s]) == 2
    assert dice.label("six") == {12}
    assert len(dice.label("done")) == 6


def test_dice_bsccs(dice):
    found = bsccs(dice)
    assert found == [frozenset({s}) for s in range(7, 13)]
    matrix = oracle.instantiate(dice, {"x": Fraction(1, 3)})
    assert sorted(oracle.brute_force_bsccs(matrix), key=min) == found


def chain(text_rows, n, initial=0, params=("x",)):
    s = DagStore(params)
    rows = [{} for _ in range(n)]
    for src, dst, value in text_rows:
        rows[src][dst] = value(s) if callable(value) else s.const(value)
    return Pmc(s, n, initial, rows)


def test_two_cycle_is_one_bscc():
    m = chain([(0, 1, 1), (1, 0, 1)], 2)
    assert bsccs(m) == [frozenset({0, 1})]


def test_absorbing_singleton():
    m = chain([(0, 1, 1), (1, 1, 1)], 2)
    assert bsccs(m) == [frozenset({1})]


def test_trim_drops_isolated_state_and_remaps():
    text = """@states 6
@initial 0
@labels
4: "goal"
5: "goal" "lost"
@transitions
0 4 1
4 4 1
5 5 1
@rewards r
4: 3
5: 7
"""
    full = parse_model(text, trim=False)
    assert full.n == 6
    m = trim_unreachable(full)
    assert m.n == 2
    assert m.label("goal") == {1}
    assert m.label("lost") == frozenset()
    assert [m.store.const_value(r) for r in m.reward("r")] == [0, 3]
    assert trim_unreachable(m) is m
    assert reachable_from(full, 0) == {0, 4}


def test_pmc_rejects_bad_indices():
    s = DagStore()
    with pytest.raises(IndexOutOfRange):
        Pmc(s, 2, 0, [{5: s.one}, {}])
    with pytest.raises(IndexOutOfRange):
        Pmc(s, 1, 3, [{}])
    with pytest.raises(IndexOutOfRange):
        Pmc(s, 1, 0, [{}], labels={"a": {4}})


def test_label_and_reward_lookup(dice):
    with pytest.raises(KeyError):
        dice.label("seven")
    with pytest.raises(KeyError):
        dice.reward("nope")


def test_check_stochastic_examples(dice):
    rep = check_stochastic(dice, "exact", [{"x": Fraction(1, 3)}, {"x": Fraction(4, 5)}])
    assert rep.ok and rep.checked == 13
    assert check_stochastic(dice, "sz").ok

    half = chain([(0, 1, Fraction(1, 2)), (0, 2, Fraction(2, 5)),
                  (1, 1, 1), (2, 2, 1)], 3)
    rep = check_stochastic(half, "exact", [{"x": Fraction(1, 2)}])
    assert rep.bad_rows == [0] and rep.deficits[0] == Fraction(1, 10)

    xy = chain([(0, 1, lambda s: s.param("x")),
                (0, 2, lambda s: s.one_minus(s.param("y"))),
                (1, 1, 1), (2, 2, 1)], 3, params=("x", "y"))
    assert check_stochastic(xy, "sz").bad_rows == [0]
    with pytest.raises(ValueError):
        check_stochastic(xy, "other")


def test_tarjan_deep_chain_no_recursion():
    n = 50_000
    succ = [[i + 1] for i in range(n - 1)] + [[0]]
    comps = sccs(succ)
    assert len(comps) == 1 and len(comps[0]) == n


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_random_graph_properties(seed):
    m = random_lra_model(rng_for(seed))
    graph = UnderlyingGraph.of(m)
    for s in range(m.n):
        for t in post(m, s):
            assert s in pre(m, t)
        for t in pre(m, s):
            assert s in post(m, t)
        assert set(graph.succ[s]) == set(m.successors(s))
    found = bsccs(m)
    matrix = oracle.instantiate(m, valuation(rng_for(seed), m.store))
    assert sorted(oracle.brute_force_bsccs(matrix), key=min) == found
    seen = set()
    for comp in found:
        assert not seen & comp
        seen |= comp
        for s in comp:
            assert set(m.successors(s)) <= comp
            assert comp <= reachable_from(m, s)


def test_trim_preserves_reachability():
    for seed in range(30):
        rng = rng_for(seed)
        m = random_reach_model(rng)
        if "goal" not in m.labels or not m.label("goal"):
            continue
        # random_reach_model trims; rebuild an untrimmed twin with a stray state
        rows = [dict(r) for r in m.rows] + [{0: m.store.one}]
        labels = {"goal": set(m.label("goal")) | {m.n}}
        untrimmed = Pmc(m.store, m.n + 1, m.initial, rows, labels)
        trimmed = trim_unreachable(untrimmed)
        assert trimmed.n == m.n
        v = valuation(rng, m.store)
        got = eval_exact(m.store, reach_probability(trimmed, trimmed.label("goal")), v)
        assert got == oracle.solve_reach(untrimmed, untrimmed.label("goal"), v)
