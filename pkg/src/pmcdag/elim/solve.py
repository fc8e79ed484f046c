"""State elimination for reachability, accumulated reward and fractional LRA."""
from fractions import Fraction

from ..acir import eval_float
from ..errors import (AbsorbingState, DenominatorZero, DivisionByZero,
                      EvalDivisionByZero, NonAlmostSureReachability)
from ..pmc import bsccs
from .order import TARGET_BFS, plan

REACH_TOLERANCE = 1e-9


class Workspace:
    """Private, mutable copy of a chain's transitions and reward vectors.

    ``succ[s]`` maps successors (self-loop included) to nodes; ``pred[s]``
    holds the predecessors of ``s`` other than ``s``.
    """

    def __init__(self, pmc, rewards=()):
        self.pmc = pmc
        self.store = pmc.store
        zero = self.store.zero
        self.succ = [{t: node for t, node in row.items() if node != zero}
                     for row in pmc.rows]
        self.pred = [set() for _ in range(pmc.n)]
        for s, row in enumerate(self.succ):
            for t in row:
                if t != s:
                    self.pred[t].add(s)
        self.rewards = [list(r) for r in rewards]

    def post(self, s):
        return [t for t in self.succ[s] if t != s]

    def make_absorbing(self, s):
        """Drop every outgoing transition of ``s``."""
        for t in self.succ[s]:
            if t != s:
                self.pred[t].discard(s)
        self.succ[s] = {}

    def normalize_self_loop(self, se):
        """Fold a self-loop on ``se`` into its other outgoing transitions.

        Rewards of ``se`` are scaled by the same factor 1/(1 - P(se,se)), the
        expected number of visits per entry.
        """
        row = self.succ[se]
        loop = row.get(se)
        if loop is None:
            return
        if len(row) == 1:
            raise AbsorbingState(se)
        store = self.store
        factor = store.inv(store.one_minus(loop))
        del row[se]
        for t in sorted(row):
            row[t] = store.mul(row[t], factor)
        for r in self.rewards:
            r[se] = store.mul(r[se], factor)

    def eliminate_state(self, se):
        """Reroute every pre(se) x post(se) path around ``se`` and remove it."""
        store = self.store
        row = self.succ[se]
        if se in row:
            raise ValueError(f"state {se} still has a self-loop")
        outgoing = sorted(row.items())
        for s1 in sorted(self.pred[se]):
            row1 = self.succ[s1]
            p1 = row1.pop(se)
            for s2, p2 in outgoing:
                bypass = store.mul(p1, p2)
                old = row1.get(s2)
                row1[s2] = bypass if old is None else store.add(old, bypass)
                if s2 != s1:
                    self.pred[s2].add(s1)
            for r in self.rewards:
                r[s1] = store.add(r[s1], store.mul(p1, r[se]))
        for s2, _ in outgoing:
            self.pred[s2].discard(se)
        self.succ[se] = {}
        self.pred[se] = set()

    def eliminate(self, se):
        """Normalize and eliminate ``se``; states without exits are kept."""
        if not self.post(se):
            return False
        self.normalize_self_loop(se)
        self.eliminate_state(se)
        return True

    def order(self, candidates, h, initial=None, targets=(), skip=()):
        return plan(self.succ, self.pred, candidates, h, initial, targets, skip)

    def audit(self):
        """Check that forward rows and reverse sets are exact transposes."""
        for s, row in enumerate(self.succ):
            for t in row:
                if t != s and s not in self.pred[t]:
                    raise AssertionError(f"edge {s}->{t} missing from pred")
        for t, ps in enumerate(self.pred):
            for s in ps:
                if t not in self.succ[s]:
                    raise AssertionError(f"pred {s} of {t} has no edge")


def _reward_vector(pmc, r):
    return pmc.reward(r) if isinstance(r, str) else list(r)


def _default_witness(store):
    return {p: Fraction(1, 2) for p in store.parameters}


def order_states(pmc, targets, h=TARGET_BFS):
    """The elimination order used for ``pmc`` and ``targets``.

    Covers every non-target state, the initial state included; the solvers
    skip the initial state when its turn comes.
    """
    targets = set(targets)
    ws = Workspace(pmc)
    for t in targets:
        ws.make_absorbing(t)
    candidates = [s for s in range(pmc.n) if s not in targets]
    return ws.order(candidates, h, pmc.initial, targets, skip={pmc.initial})


def _eliminate_transient(ws, pmc, targets, h):
    for t in targets:
        ws.make_absorbing(t)
    candidates = [s for s in range(pmc.n) if s not in targets]
    for se in ws.order(candidates, h, pmc.initial, targets, skip={pmc.initial}):
        if se != pmc.initial:
            ws.eliminate(se)
    if ws.post(pmc.initial):
        ws.normalize_self_loop(pmc.initial)


def reach_probability(pmc, targets, h=TARGET_BFS):
    """Circuit for the probability of eventually reaching ``targets``."""
    store = pmc.store
    targets = set(targets)
    if pmc.initial in targets:
        return store.one
    ws = Workspace(pmc)
    _eliminate_transient(ws, pmc, targets, h)
    row = ws.succ[pmc.initial]
    return store.sum(row[t] for t in sorted(targets) if t in row)


def _check_reach(store, reach, witness):
    try:
        value = eval_float(store, reach, witness)
    except EvalDivisionByZero:
        value = float("nan")
    if not abs(value - 1.0) <= REACH_TOLERANCE:
        raise NonAlmostSureReachability(
            f"targets are reached with probability {value} at the witness "
            f"valuation, not 1")


def accumulated_reward(pmc, r, targets, h=TARGET_BFS, witness=None):
    """Circuit for the expected reward collected before reaching ``targets``.

    The reward of the target state itself is not collected.  Reaching the
    targets almost surely is checked at ``witness`` (default: every parameter
    set to 1/2).
    """
    store = pmc.store
    targets = set(targets)
    if pmc.initial in targets:
        return store.zero
    ws = Workspace(pmc, rewards=[_reward_vector(pmc, r)])
    _eliminate_transient(ws, pmc, targets, h)
    row = ws.succ[pmc.initial]
    reach = store.sum(row[t] for t in sorted(targets) if t in row)
    _check_reach(store, reach, witness or _default_witness(store))
    return ws.rewards[0][pmc.initial]


def lra(pmc, r_up, r_low, h=TARGET_BFS, witness=None):
    """Circuit for the fractional long-run average reward r_up / r_low.

    Each BSCC is collapsed onto its smallest state, which leaves that state
    with a self-loop of probability one and the expected rewards of one
    recurrence cycle.  Transient states are then eliminated to get the
    probability of ending in each BSCC.
    """
    store = pmc.store
    witness = witness or _default_witness(store)
    ws = Workspace(pmc, rewards=[_reward_vector(pmc, r_up),
                                 _reward_vector(pmc, r_low)])
    components = bsccs(pmc)
    cycle = []
    for comp in components:
        rep = min(comp)
        rest = [s for s in comp if s != rep]
        for se in ws.order(rest, h, pmc.initial, {rep}):
            ws.eliminate(se)
        cycle.append((comp, rep, ws.rewards[0][rep], ws.rewards[1][rep]))

    terms = []
    for comp, rep, up, low in cycle:
        try:
            denominator = eval_float(store, low, witness)
        except EvalDivisionByZero:
            denominator = 0.0
        if denominator == 0.0:
            raise DenominatorZero(f"recurrence reward of r_low is 0 on the "
                                  f"component of state {rep} at the witness")
        try:
            terms.append((comp, rep, store.mul(up, store.inv(low))))
        except DivisionByZero:
            raise DenominatorZero(f"recurrence reward of r_low is constant 0 "
                                  f"on the component of state {rep}") from None

    for comp, _, ratio in terms:
        if pmc.initial in comp:
            return ratio

    ws.rewards = []
    reps = {rep for _, rep, _ in terms}
    recurrent = set().union(*components) if components else set()
    transient = [s for s in range(pmc.n)
                 if s not in recurrent and s != pmc.initial]
    for se in ws.order(transient, h, pmc.initial, reps):
        ws.eliminate(se)
    if ws.post(pmc.initial):
        ws.normalize_self_loop(pmc.initial)
    row = ws.succ[pmc.initial]
    return store.sum(store.mul(row[rep], ratio)
                     for _, rep, ratio in terms if rep in row)
