"""Evaluation backends: exact rationals, binary64, and outward-rounded intervals.

Each evaluation makes one bottom-up pass over the sub-DAG reachable from the
root, memoizing into a scratch table private to the call.  The ``*_batch``
variants evaluate a whole set of points at once with numpy arrays, which is
how grid sweeps are run.
"""
from fractions import Fraction

import numpy as np

from ..errors import EvalDivisionByZero, IntervalDividesZero
from .interval import Interval
from .store import ADD, CONST, INV, MUL, NEG, OPERAND_MASK, PARAM


def _program(store, roots):
    """Decode the reachable nodes once: list of (node, kind, a, b)."""
    words = store.words
    prog = []
    for node in store.reachable(roots):
        word = words[node]
        kind = word & 0xF
        if kind <= PARAM:
            prog.append((node, kind, word >> 4, 0))
        else:
            prog.append((node, kind, (word >> 4) & OPERAND_MASK, word >> 34))
    return prog


def eval_exact_many(store, roots, valuation):
    """Exact values of every node reachable from ``roots`` as a dict."""
    v = [Fraction(x) for x in store.valuation(valuation)]
    consts = store.constants
    val = {}
    for node, kind, a, b in _program(store, roots):
        if kind == CONST:
            val[node] = consts[a]
        elif kind == PARAM:
            val[node] = v[a]
        elif kind == ADD:
            val[node] = val[a] + val[b]
        elif kind == MUL:
            val[node] = val[a] * val[b]
        elif kind == NEG:
            val[node] = -val[a]
        else:
            x = val[a]
            if x == 0:
                raise EvalDivisionByZero(node)
            val[node] = 1 / x
    return val


def eval_exact(store, root, valuation):
    return eval_exact_many(store, (root,), valuation)[root]


def eval_float(store, root, valuation):
    v = [float(x) for x in store.valuation(valuation)]
    consts = store.constants
    val = {}
    for node, kind, a, b in _program(store, (root,)):
        if kind == CONST:
            val[node] = float(consts[a])
        elif kind == PARAM:
            val[node] = v[a]
        elif kind == ADD:
            val[node] = val[a] + val[b]
        elif kind == MUL:
            val[node] = val[a] * val[b]
        elif kind == NEG:
            val[node] = -val[a]
        else:
            x = val[a]
            if x == 0.0:
                raise EvalDivisionByZero(node)
            val[node] = 1.0 / x
    return val[root]


def _as_interval(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, tuple):
        return Interval(*x)
    return Interval.point(x)


def eval_interval(store, root, valuation):
    """Interval enclosure of the root for a box of parameter intervals.

    Plain numbers in the valuation are turned into their tightest enclosing
    interval first.
    """
    v = [_as_interval(x) for x in store.valuation(valuation)]
    consts = store.constants
    val = {}
    for node, kind, a, b in _program(store, (root,)):
        if kind == CONST:
            val[node] = Interval.point(consts[a])
        elif kind == PARAM:
            val[node] = v[a]
        elif kind == ADD:
            val[node] = val[a] + val[b]
        elif kind == MUL:
            val[node] = val[a] * val[b]
        elif kind == NEG:
            val[node] = -val[a]
        else:
            x = val[a]
            if x.contains_zero():
                raise IntervalDividesZero(node)
            val[node] = x.reciprocal()
    return val[root]


# -- batched evaluation --------------------------------------------------------

def _use_counts(prog, root):
    uses = {}
    for _, kind, a, b in prog:
        if kind >= ADD:
            uses[a] = uses.get(a, 0) + 1
            if kind <= MUL:
                uses[b] = uses.get(b, 0) + 1
    uses[root] = uses.get(root, 0) + 1
    return uses


def _release(val, uses, node):
    uses[node] -= 1
    if not uses[node]:
        del val[node]


def eval_float_batch(store, root, columns):
    """Evaluate ``root`` at many points.

    ``columns`` holds one 1-D array per parameter (index order); all have the
    same length.  Returns a float64 array of that length.  Intermediate arrays
    are dropped as soon as their last consumer has run.
    """
    columns = [np.asarray(c, dtype=np.float64) for c in columns]
    n = len(columns[0]) if columns else 1
    prog = _program(store, (root,))
    uses = _use_counts(prog, root)
    consts = store.constants
    val = {}
    for node, kind, a, b in prog:
        if kind == CONST:
            out = np.full(n, float(consts[a]))
        elif kind == PARAM:
            out = columns[a]
        elif kind == ADD:
            out = val[a] + val[b]
            _release(val, uses, a)
            _release(val, uses, b)
        elif kind == MUL:
            out = val[a] * val[b]
            _release(val, uses, a)
            _release(val, uses, b)
        elif kind == NEG:
            out = -val[a]
            _release(val, uses, a)
        else:
            x = val[a]
            if not np.all(x):
                raise EvalDivisionByZero(node)
            out = 1.0 / x
            _release(val, uses, a)
        val[node] = out
    return val[root]


_NINF = -np.inf
_PINF = np.inf


def interval_columns(values):
    """Tight ``(lo, hi)`` arrays enclosing a sequence of exact rationals."""
    lo = np.empty(len(values))
    hi = np.empty(len(values))
    for i, x in enumerate(values):
        iv = Interval.point(x)
        lo[i] = iv.lo
        hi[i] = iv.hi
    return lo, hi


def eval_interval_batch(store, root, lo_columns, hi_columns):
    """Batched interval evaluation; returns ``(lo, hi)`` float64 arrays."""
    lo_columns = [np.asarray(c, dtype=np.float64) for c in lo_columns]
    hi_columns = [np.asarray(c, dtype=np.float64) for c in hi_columns]
    n = len(lo_columns[0]) if lo_columns else 1
    prog = _program(store, (root,))
    uses = _use_counts(prog, root)
    consts = store.constants
    val = {}
    nextafter = np.nextafter
    for node, kind, a, b in prog:
        if kind == CONST:
            iv = Interval.point(consts[a])
            out = (np.full(n, iv.lo), np.full(n, iv.hi))
        elif kind == PARAM:
            out = (lo_columns[a], hi_columns[a])
        elif kind == ADD:
            (alo, ahi), (blo, bhi) = val[a], val[b]
            out = (nextafter(alo + blo, _NINF), nextafter(ahi + bhi, _PINF))
            _release(val, uses, a)
            _release(val, uses, b)
        elif kind == MUL:
            (alo, ahi), (blo, bhi) = val[a], val[b]
            p1, p2, p3, p4 = alo * blo, alo * bhi, ahi * blo, ahi * bhi
            lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
            hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
            out = (nextafter(lo, _NINF), nextafter(hi, _PINF))
            _release(val, uses, a)
            _release(val, uses, b)
        elif kind == NEG:
            alo, ahi = val[a]
            out = (-ahi, -alo)
            _release(val, uses, a)
        else:
            alo, ahi = val[a]
            if np.any((alo <= 0.0) & (ahi >= 0.0)):
                raise IntervalDividesZero(node)
            out = (nextafter(1.0 / ahi, _NINF), nextafter(1.0 / alo, _PINF))
            _release(val, uses, a)
        val[node] = out
    return val[root]


def max_diameter(lo, hi):
    if len(lo) == 0:
        return 0.0
    return float(np.max(hi - lo))
