"""Exact reference solutions at a fixed parameter valuation.

Everything here instantiates the chain as a dense rational matrix and solves
linear systems by Gaussian elimination over Fractions.  Meant for small
models (tens of states) in tests; independent of the circuit solvers.
"""
from collections import deque
from fractions import Fraction

from .acir import eval_exact_many
from .errors import SingularSystem


def instantiate(pmc, valuation):
    """Dense n x n Fraction matrix of the chain at ``valuation``."""
    nodes = [node for _, _, node in pmc.transition_nodes()]
    values = eval_exact_many(pmc.store, nodes, valuation) if nodes else {}
    matrix = [[Fraction(0)] * pmc.n for _ in range(pmc.n)]
    for s, t, node in pmc.transition_nodes():
        matrix[s][t] = values[node]
    return matrix


def instantiate_rewards(pmc, r, valuation):
    r = pmc.reward(r) if isinstance(r, str) else r
    values = eval_exact_many(pmc.store, list(r), valuation)
    return [values[node] for node in r]


def solve_linear(a, b):
    """Solve ``a x = b`` exactly; raises SingularSystem."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"no pivot in column {col}")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        row = [x * inv for x in m[col]]
        m[col] = row
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], row)]
    return [m[r][n] for r in range(n)]


def _can_reach(matrix, targets):
    n = len(matrix)
    pred = [[] for _ in range(n)]
    for s in range(n):
        for t in range(n):
            if matrix[s][t] != 0:
                pred[t].append(s)
    seen = set(targets)
    queue = deque(targets)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return seen


def solve_reach(pmc, targets, valuation):
    """Probability of eventually reaching ``targets`` from the initial state."""
    targets = set(targets)
    if pmc.initial in targets:
        return Fraction(1)
    p = instantiate(pmc, valuation)
    live = _can_reach(p, targets)
    if pmc.initial not in live:
        return Fraction(0)
    unknown = sorted(live - targets)
    pos = {s: i for i, s in enumerate(unknown)}
    a = [[(1 if i == j else 0) - p[s][t] for j, t in enumerate(unknown)]
         for i, s in enumerate(unknown)]
    b = [sum((p[s][t] for t in targets), Fraction(0)) for s in unknown]
    return solve_linear(a, b)[pos[pmc.initial]]


def solve_acc(pmc, r, targets, valuation):
    """Expected reward collected before the first visit to ``targets``."""
    targets = set(targets)
    if pmc.initial in targets:
        return Fraction(0)
    p = instantiate(pmc, valuation)
    rew = instantiate_rewards(pmc, r, valuation)
    transient = [s for s in range(pmc.n) if s not in targets]
    pos = {s: i for i, s in enumerate(transient)}
    a = [[(1 if i == j else 0) - p[s][t] for j, t in enumerate(transient)]
         for i, s in enumerate(transient)]
    return solve_linear(a, [rew[s] for s in transient])[pos[pmc.initial]]


def stationary(pmc, states, valuation):
    """Stationary distribution of the chain restricted to ``states``.

    Returns a dict state -> probability.  ``states`` must form one BSCC.
    """
    states = sorted(states)
    p = instantiate(pmc, valuation)
    k = len(states)
    # pi (P - I) = 0 with one balance equation replaced by sum(pi) = 1
    a = [[p[states[j]][states[i]] - (1 if i == j else 0) for j in range(k)]
         for i in range(k)]
    a[-1] = [Fraction(1)] * k
    b = [Fraction(0)] * (k - 1) + [Fraction(1)]
    return dict(zip(states, solve_linear(a, b)))


def brute_force_bsccs(matrix):
    """BSCCs from pairwise reachability (quadratic; small chains only)."""
    n = len(matrix)
    reach = []
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for t in range(n):
                if matrix[u][t] != 0 and t not in seen:
                    seen.add(t)
                    stack.append(t)
        reach.append(seen)
    out = []
    for s in range(n):
        comp = {t for t in reach[s] if s in reach[t]}
        if reach[s] == comp and min(comp) == s:
            out.append(frozenset(comp))
    return out


def solve_lra(pmc, r_up, r_low, valuation, components=None):
    """Sum over BSCCs of Pr(reach C) * (pi_C . r_up) / (pi_C . r_low)."""
    if components is None:
        components = brute_force_bsccs(instantiate(pmc, valuation))
    up = instantiate_rewards(pmc, r_up, valuation)
    low = instantiate_rewards(pmc, r_low, valuation)
    total = Fraction(0)
    for comp in components:
        pi = stationary(pmc, comp, valuation)
        num = sum((pi[s] * up[s] for s in comp), Fraction(0))
        den = sum((pi[s] * low[s] for s in comp), Fraction(0))
        total += solve_reach(pmc, comp, valuation) * num / den
    return total
