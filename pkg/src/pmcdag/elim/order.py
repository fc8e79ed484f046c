"""Elimination-order heuristics (the ``choose`` step of state elimination).

Traversal orders (BFS, reverse BFS, backward BFS from the targets, random)
are computed once.  ``num-new`` and ``min-prod`` are dynamic: every pick uses
weights against the graph as it looks after the previous eliminations, which
is simulated here on a structural copy.  Ties go to the smallest state.
"""
import heapq
import random
from collections import deque
from dataclasses import dataclass

NAMES = ("num-new", "min-prod", "target-bfs", "random", "bfs", "reverse-bfs")


@dataclass(frozen=True)
class Heuristic:
    name: str
    seed: int = 0

    def __post_init__(self):
        if self.name not in NAMES:
            raise ValueError(f"unknown heuristic {self.name!r}; "
                             f"expected one of {', '.join(NAMES)}")

    @property
    def dynamic(self):
        return self.name in ("num-new", "min-prod")

    def __str__(self):
        return f"random({self.seed})" if self.name == "random" else self.name


NUM_NEW = Heuristic("num-new")
MIN_PROD = Heuristic("min-prod")
TARGET_BFS = Heuristic("target-bfs")
BFS = Heuristic("bfs")
REVERSE_BFS = Heuristic("reverse-bfs")


def RANDOM(seed=0):
    return Heuristic("random", seed)


ALL = (NUM_NEW, MIN_PROD, TARGET_BFS, RANDOM(0), BFS, REVERSE_BFS)


def _bfs(start, adjacency):
    seen = set(start)
    order = list(start)
    queue = deque(start)
    while queue:
        u = queue.popleft()
        for t in sorted(adjacency(u)):
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def _complete(discovered, candidates):
    """Discovery order restricted to candidates, then the rest ascending."""
    cand = set(candidates)
    out = [s for s in discovered if s in cand]
    seen = set(out)
    out.extend(s for s in sorted(cand) if s not in seen)
    return out


def new_transitions(succ, pred, s):
    """Predecessor/successor pairs of ``s`` that are not yet an edge."""
    post = [t for t in succ[s] if t != s]
    return sum(1 for s1 in pred[s] for s2 in post if s2 not in succ[s1])


def pair_count(succ, pred, s):
    post = sum(1 for t in succ[s] if t != s)
    return len(pred[s]) * post


def _dynamic(succ, pred, candidates, weigh, skip):
    # private structural copy: succ as sets (self-loops kept), pred without self
    succ = [set(r) for r in succ]
    pred = [set(p) for p in pred]
    remaining = set(candidates)
    current = {s: weigh(succ, pred, s) for s in remaining}
    heap = [(w, s) for s, w in current.items()]
    heapq.heapify(heap)
    order = []
    while heap:
        w, s = heapq.heappop(heap)
        if s not in remaining or current[s] != w:
            continue
        remaining.discard(s)
        order.append(s)
        post = [t for t in succ[s] if t != s]
        if s in skip or not post:
            continue
        preds = list(pred[s])
        affected = set(preds) | set(post)
        for s1 in preds:
            affected.update(succ[s1])
            succ[s1].discard(s)
            for s2 in post:
                succ[s1].add(s2)
                if s1 != s2:
                    pred[s2].add(s1)
        for s2 in post:
            pred[s2].discard(s)
        succ[s] = set()
        pred[s] = set()
        for t in affected:
            if t in remaining:
                nw = weigh(succ, pred, t)
                if nw != current[t]:
                    current[t] = nw
                    heapq.heappush(heap, (nw, t))
    return order


def plan(succ, pred, candidates, h, initial=None, targets=(), skip=()):
    """Order ``candidates`` for elimination.

    ``succ[s]`` is an iterable of successors (self-loop included) and
    ``pred[s]`` a set of predecessors excluding ``s``.  States in ``skip``
    (and states without successors other than themselves) are kept in the
    order but leave the graph untouched when their turn comes.
    """
    candidates = sorted(candidates)
    if h.name == "num-new":
        return _dynamic(succ, pred, candidates, new_transitions, set(skip))
    if h.name == "min-prod":
        return _dynamic(succ, pred, candidates, pair_count, set(skip))
    if h.name == "random":
        order = list(candidates)
        random.Random(h.seed).shuffle(order)
        return order
    if h.name == "target-bfs":
        return _complete(_bfs(sorted(targets), lambda u: pred[u]), candidates)
    start = [] if initial is None else [initial]
    forward = _complete(_bfs(start, lambda u: succ[u]), candidates)
    if h.name == "bfs":
        return forward
    return forward[::-1]
