"""Parametric Markov chains over a shared DagStore, plus graph analyses.

A transition exists exactly when its expression is not the constant-zero
node, i.e. the underlying graph is taken to be the same for every admissible
parameter valuation.
"""
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .acir import eval_exact, signatures
from .errors import IndexOutOfRange


class Pmc:
    """States ``0..n-1``, an initial state, sparse rows ``{successor: node}``.

    ``labels`` maps a label name to a frozenset of states; ``rewards`` maps a
    reward-structure name to a dense list of node ids (one per state).
    """

    def __init__(self, store, n, initial, rows, labels=None, rewards=None):
        self.store = store
        self.n = n
        self.initial = initial
        self.rows = [dict(r) for r in rows]
        self.labels = {k: frozenset(v) for k, v in (labels or {}).items()}
        self.rewards = {k: list(v) for k, v in (rewards or {}).items()}
        self._check()

    def _check(self):
        if len(self.rows) != self.n:
            raise IndexOutOfRange(f"{len(self.rows)} rows for {self.n} states")
        if not 0 <= self.initial < self.n:
            raise IndexOutOfRange(f"initial state {self.initial} out of range")
        nodes = len(self.store)
        for s, row in enumerate(self.rows):
            for t, node in row.items():
                if not 0 <= t < self.n:
                    raise IndexOutOfRange(f"transition {s} -> {t} out of range")
                if not 0 <= node < nodes:
                    raise IndexOutOfRange(f"transition {s} -> {t}: bad node {node}")
        for name, states in self.labels.items():
            if any(not 0 <= s < self.n for s in states):
                raise IndexOutOfRange(f"label {name!r} names a missing state")
        for name, r in self.rewards.items():
            if len(r) != self.n:
                raise IndexOutOfRange(f"reward {name!r} has {len(r)} entries")

    @property
    def parameters(self):
        return self.store.parameters

    def __repr__(self):
        return (f"Pmc(states={self.n}, transitions={self.num_transitions()}, "
                f"initial={self.initial}, parameters={self.parameters!r})")

    def num_transitions(self):
        return sum(len(r) for r in self.rows)

    def label(self, name):
        try:
            return self.labels[name]
        except KeyError:
            raise KeyError(f"no label {name!r}") from None

    def reward(self, name):
        try:
            return self.rewards[name]
        except KeyError:
            raise KeyError(f"no reward structure {name!r}") from None

    def transition_nodes(self):
        for s, row in enumerate(self.rows):
            for t, node in row.items():
                yield s, t, node

    # -- underlying graph --------------------------------------------------

    def successors(self, s):
        """Successors in the underlying graph, self-loop included."""
        zero = self.store.zero
        return [t for t, node in self.rows[s].items() if node != zero]

    def graph(self):
        return UnderlyingGraph.of(self)


@dataclass
class UnderlyingGraph:
    succ: list
    pred: list

    @classmethod
    def of(cls, pmc):
        succ = [sorted(pmc.successors(s)) for s in range(pmc.n)]
        pred = [[] for _ in range(pmc.n)]
        for s, ts in enumerate(succ):
            for t in ts:
                pred[t].append(s)
        return cls(succ, pred)


def post(pmc, s):
    """Immediate successors of ``s``, excluding ``s`` itself."""
    return {t for t in pmc.successors(s) if t != s}


def pre(pmc, s):
    """Immediate predecessors of ``s``, excluding ``s`` itself."""
    zero = pmc.store.zero
    return {u for u in range(pmc.n)
            if u != s and pmc.rows[u].get(s, zero) != zero}


def reachable_from(pmc, s):
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for t in pmc.successors(u):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def trim_unreachable(pmc):
    """Drop states unreachable from the initial state, renumbering densely."""
    keep = sorted(reachable_from(pmc, pmc.initial))
    if len(keep) == pmc.n:
        return pmc
    new_index = {old: i for i, old in enumerate(keep)}
    rows = [{new_index[t]: node for t, node in pmc.rows[s].items() if t in new_index}
            for s in keep]
    labels = {name: {new_index[s] for s in states if s in new_index}
              for name, states in pmc.labels.items()}
    rewards = {name: [r[s] for s in keep] for name, r in pmc.rewards.items()}
    return Pmc(pmc.store, len(keep), new_index[pmc.initial], rows, labels, rewards)


def sccs(succ):
    """Strongly connected components of an adjacency list, iterative Tarjan."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    out = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def bsccs(pmc):
    """Bottom SCCs as frozensets, ordered by their smallest member."""
    succ = [pmc.successors(s) for s in range(pmc.n)]
    result = []
    for comp in sccs(succ):
        members = set(comp)
        if all(t in members for s in comp for t in succ[s]):
            result.append(frozenset(members))
    result.sort(key=min)
    return result


@dataclass
class StochasticReport:
    """Rows whose outgoing probabilities do not sum to one.

    ``deficits`` maps a state to ``1 - row sum`` at the first failing
    valuation (exact mode) or to None (signature mode).
    """
    mode: str
    checked: int
    deficits: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.deficits

    @property
    def bad_rows(self):
        return sorted(self.deficits)


def row_sum(pmc, s):
    store = pmc.store
    return store.sum(pmc.rows[s][t] for t in sorted(pmc.rows[s]))


def check_stochastic(pmc, mode="exact", valuations=(), k=2, seed=0):
    """Report rows that are not stochastic; never modifies the model.

    ``mode="exact"`` evaluates every row sum at each of ``valuations``;
    ``mode="sz"`` compares each row sum's signature with that of constant 1.
    States without outgoing transitions are skipped.
    """
    store = pmc.store
    sums = {s: row_sum(pmc, s) for s in range(pmc.n) if pmc.rows[s]}
    report = StochasticReport(mode, len(sums))
    if mode == "exact":
        for v in valuations:
            for s, node in sums.items():
                if s in report.deficits:
                    continue
                total = eval_exact(store, node, v)
                if total != 1:
                    report.deficits[s] = Fraction(1) - total
    elif mode == "sz":
        sigs = signatures(store, list(sums.values()) + [store.one], k, seed)
        one = sigs[store.one]
        for s, node in sums.items():
            if sigs[node] != one:
                report.deficits[s] = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report
