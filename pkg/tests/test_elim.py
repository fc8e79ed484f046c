from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pmcdag import oracle
from pmcdag.acir import DagStore, eval_exact, signatures
from pmcdag.corpus import bundled
from pmcdag.elim import (ALL, BFS, MIN_PROD, NUM_NEW, RANDOM, REVERSE_BFS,
                         TARGET_BFS, Heuristic, Workspace, accumulated_reward,
                         lra, new_transitions, order_states, pair_count,
                         reach_probability)
from pmcdag.errors import (AbsorbingState, DenominatorZero,
                           NonAlmostSureReachability)
from pmcdag.modelio import parse_model
from pmcdag.pmc import Pmc

from randmodels import (random_absorbing_model, random_lra_model,
                        random_reach_model, rng_for, valuation)

HALF = {"x": Fraction(1, 2)}


def model(rows, n, params=("x",), initial=0, rewards=None):
    """Rows as (src, dst, builder) with builder a constant or store -> node."""
    s = DagStore(params)
    table = [{} for _ in range(n)]
    for src, dst, value in rows:
        table[src][dst] = value(s) if callable(value) else s.const(value)
    rew = {}
    for name, values in (rewards or {}).items():
        rew[name] = [v(s) if callable(v) else s.const(v) for v in values]
    return Pmc(s, n, initial, table, rewards=rew)


x = lambda s: s.param("x")               # noqa: E731
not_x = lambda s: s.one_minus(s.param("x"))  # noqa: E731


# -- workspace primitives ----------------------------------------------------

def test_normalize_self_loop_renormalizes():
    m = model([(0, 0, x), (0, 1, not_x), (1, 1, 1)], 2)
    ws = Workspace(m)
    ws.normalize_self_loop(0)
    node = ws.succ[0][1]
    sig = signatures(m.store, [node, m.store.one])
    assert sig[node] == sig[m.store.one]
    assert eval_exact(m.store, node, {"x": Fraction(2, 9)}) == 1


def test_normalize_without_loop_is_noop():
    m = model([(0, 1, x), (0, 2, not_x)], 3)
    ws = Workspace(m)
    before = dict(ws.succ[0])
    ws.normalize_self_loop(0)
    assert ws.succ[0] == before


def test_normalize_only_self_loop_raises():
    m = model([(0, 0, 1)], 1)
    with pytest.raises(AbsorbingState):
        Workspace(m).normalize_self_loop(0)


def test_eliminate_chain():
    m = model([(0, 1, x), (0, 3, not_x), (1, 2, 1)], 4)
    ws = Workspace(m)
    ws.eliminate_state(1)
    assert ws.succ[0][2] == m.store.param("x")
    assert 1 not in ws.succ[0] and ws.pred[2] == {0}
    ws.audit()


def test_eliminate_diamond():
    m = model([(0, 1, x), (0, 2, not_x), (1, 3, 1), (2, 3, 1)], 4)
    ws = Workspace(m)
    ws.eliminate_state(1)
    ws.eliminate_state(2)
    assert eval_exact(m.store, ws.succ[0][3], {"x": Fraction(1, 7)}) == 1
    assert set(ws.succ[0]) == {3}
    ws.audit()


def test_dice_self_return():
    dice = bundled("dice")
    ws = Workspace(dice)
    ws.eliminate_state(3)
    loop = ws.succ[1][1]
    xx = dice.store.mul(dice.store.param("x"), dice.store.param("x"))
    assert loop == xx
    ws.audit()


def test_eliminated_state_is_detached():
    dice = bundled("dice")
    ws = Workspace(dice)
    for s in (3, 4, 5, 6):
        ws.eliminate(s)
        ws.audit()
        assert not ws.succ[s] and not ws.pred[s]
        assert all(s not in row for row in ws.succ)


# -- heuristics ----------------------------------------------------------------

def weights_graph(existing):
    # state 2 has predecessors 0, 1 and successors 3, 4, 5
    succ = [{2}, {2}, {3, 4, 5}, set(), set(), set()]
    if existing:
        succ[0].add(3)
    pred = [set(), set(), {0, 1}, {2} | ({0} if existing else set()), {2}, {2}]
    return succ, pred


def test_num_new_and_min_prod_weights():
    assert new_transitions(*weights_graph(False), 2) == 6
    assert new_transitions(*weights_graph(True), 2) == 5
    assert pair_count(*weights_graph(False), 2) == 6
    assert pair_count(*weights_graph(True), 2) == 6


def test_target_bfs_line():
    m = model([(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 3, 1)], 4)
    assert order_states(m, {3}, TARGET_BFS) == [2, 1, 0]


def test_orders_are_permutations():
    dice = bundled("dice")
    targets = dice.label("six")
    for h in ALL + (RANDOM(7),):
        order = order_states(dice, targets, h)
        assert sorted(order) == [s for s in range(13) if s not in targets]
        assert order == order_states(dice, targets, h)
    assert order_states(dice, targets, BFS)[0] == 0
    assert order_states(dice, targets, REVERSE_BFS) == order_states(dice, targets, BFS)[::-1]
    assert order_states(dice, targets, RANDOM(1)) != order_states(dice, targets, RANDOM(2))


def test_dynamic_tie_break_smallest_index():
    # 0 has no predecessors (weight 0); 1, 2, 3 look alike
    m = model([(0, 1, Fraction(1, 3)), (0, 2, Fraction(1, 3)), (0, 3, Fraction(1, 3)),
               (1, 4, 1), (2, 4, 1), (3, 4, 1), (4, 4, 1)], 5)
    assert order_states(m, {4}, NUM_NEW) == [0, 1, 2, 3]
    assert order_states(m, {4}, MIN_PROD) == [0, 1, 2, 3]


def test_unknown_heuristic():
    with pytest.raises(ValueError):
        Heuristic("greedy")


# -- reachability ----------------------------------------------------------------

@pytest.mark.parametrize("h", ALL, ids=str)
def test_dice_six(h):
    dice = bundled("dice")
    root = reach_probability(dice, dice.label("six"), h)
    assert eval_exact(dice.store, root, HALF) == Fraction(1, 6)
    v = {"x": Fraction(3, 10)}
    assert eval_exact(dice.store, root, v) == Fraction(49, 170)


def test_reach_trivial_cases():
    m = model([(0, 1, 1), (1, 1, 1), (2, 2, 1)], 3)
    assert reach_probability(m, {0}) == m.store.one
    assert reach_probability(m, {2}) == m.store.zero


def test_reach_does_not_mutate_model():
    dice = bundled("dice")
    rows = [dict(r) for r in dice.rows]
    reach_probability(dice, dice.label("six"), NUM_NEW)
    assert dice.rows == rows


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_reach_matches_oracle(seed):
    rng = rng_for(seed)
    m = random_reach_model(rng)
    targets = m.label("goal") if "goal" in m.labels else frozenset()
    v = valuation(rng, m.store)
    expect = oracle.solve_reach(m, targets, v)
    for h in ALL:
        assert eval_exact(m.store, reach_probability(m, targets, h), v) == expect


# -- accumulated reward ------------------------------------------------------------

def geometric():
    p = lambda s: s.param("p")  # noqa: E731
    q = lambda s: s.one_minus(s.param("p"))  # noqa: E731
    return model([(0, 0, p), (0, 1, q), (1, 1, 1)], 2, params=("p",),
                 rewards={"r": [1, 0], "zero": [0, 0]})


@pytest.mark.parametrize("p", [Fraction(1, 3), Fraction(1, 2)])
def test_geometric_reward(p):
    m = geometric()
    root = accumulated_reward(m, "r", {1})
    v = {"p": p}
    assert eval_exact(m.store, root, v) == 1 / (1 - p)
    assert oracle.solve_acc(m, "r", {1}, v) == 1 / (1 - p)


def test_zero_reward_is_zero():
    m = geometric()
    assert accumulated_reward(m, "zero", {1}) == m.store.zero


def test_two_step_path():
    m = model([(0, 1, 1), (1, 2, 1), (2, 2, 1)], 3, params=("a", "b"),
              rewards={"r": [lambda s: s.param("a"), lambda s: s.param("b"), 5]})
    root = accumulated_reward(m, "r", {2})
    v = {"a": Fraction(3), "b": Fraction(4, 7)}
    assert eval_exact(m.store, root, v) == 3 + Fraction(4, 7)


def test_target_reward_not_collected():
    m = geometric()
    assert accumulated_reward(m, "r", {0}) == m.store.zero


def test_dice_expected_tosses():
    dice = bundled("dice")
    for h in ALL:
        root = accumulated_reward(dice, "tosses", dice.label("done"), h)
        assert eval_exact(dice.store, root, HALF) == Fraction(11, 3)


def test_non_almost_sure_reachability():
    m = model([(0, 1, Fraction(1, 2)), (0, 2, Fraction(1, 2)), (1, 1, 1), (2, 2, 1)], 3,
              rewards={"r": [1, 1, 1]})
    with pytest.raises(NonAlmostSureReachability):
        accumulated_reward(m, "r", {1})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_accumulated_matches_oracle(seed):
    rng = rng_for(seed)
    m = random_absorbing_model(rng)
    targets = m.label("goal")
    v = valuation(rng, m.store)
    expect = oracle.solve_acc(m, "r", targets, v)
    for h in ALL:
        assert eval_exact(m.store, accumulated_reward(m, "r", targets, h), v) == expect


# -- long-run average ---------------------------------------------------------------

def test_two_cycle_lra():
    m = bundled("two_cycle")
    root = lra(m, "u", "l")
    v = {"a": Fraction(3), "b": Fraction(5)}
    assert eval_exact(m.store, root, v) == 4


def test_lazy_cycle_lra():
    m = bundled("lazy_cycle")
    assert eval_exact(m.store, lra(m, "u", "l"), {}) == Fraction(2, 3)
    assert eval_exact(m.store, lra(m, "u", "l2"), {}) == Fraction(2, 5)


def test_lra_zero_denominator():
    m = bundled("lazy_cycle")
    zero = [m.store.zero] * m.n
    with pytest.raises(DenominatorZero):
        lra(m, "u", zero)


def test_lra_transient_prefix():
    text = """@parameters
x
@states 3
@initial 0
@transitions
0 1 x
0 2 1-x
1 1 1
2 2 1
@rewards u
1: 4
2: 1
@rewards l
1: 1
2: 2
"""
    m = parse_model(text)
    v = {"x": Fraction(1, 4)}
    expect = Fraction(1, 4) * 4 + Fraction(3, 4) * Fraction(1, 2)
    for h in ALL:
        assert eval_exact(m.store, lra(m, "u", "l", h), v) == expect


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_lra_matches_oracle(seed):
    rng = rng_for(seed)
    m = random_lra_model(rng)
    v = valuation(rng, m.store)
    expect = oracle.solve_lra(m, "u", "l", v)
    for h in ALL:
        assert eval_exact(m.store, lra(m, "u", "l", h), v) == expect


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(ALL))
def test_audit_after_every_step(seed, h):
    m = random_lra_model(rng_for(seed))
    ws = Workspace(m, [m.reward("u")])
    for se in order_states(m, set(), h):
        if se != m.initial and ws.eliminate(se):
            ws.audit()
            assert all(se not in row for t, row in enumerate(ws.succ) if t != se)
