"""Schwartz-Zippel identification of equal functions.

Nodes are evaluated at ``k`` random points of the prime field Z_p with
p = 2^61 - 1.  Two nodes with the same tuple of residues are taken to denote
the same rational function.  For functions of total degree at most d the
chance of a false identification is at most (d/p)^k per pair.
"""
import random

from ..errors import ResampleLimitExceeded
from .evaluate import _program
from .store import ADD, CONST, INV, MUL, NEG, PARAM

PRIME = (1 << 61) - 1
MAX_REDRAWS = 64
DEFAULT_POINTS = 2


class _Redraw(Exception):
    pass


def _residue(fraction):
    den = fraction.denominator % PRIME
    if den == 0:
        raise ResampleLimitExceeded(f"constant {fraction} has no residue mod 2^61-1")
    return fraction.numerator % PRIME * pow(den, -1, PRIME) % PRIME


def _eval_point(store, prog, point):
    consts = store.constants
    val = {}
    for node, kind, a, b in prog:
        if kind == CONST:
            val[node] = _residue(consts[a])
        elif kind == PARAM:
            val[node] = point[a]
        elif kind == ADD:
            val[node] = (val[a] + val[b]) % PRIME
        elif kind == MUL:
            val[node] = val[a] * val[b] % PRIME
        elif kind == NEG:
            val[node] = -val[a] % PRIME
        else:
            x = val[a]
            if x == 0:
                raise _Redraw
            val[node] = pow(x, -1, PRIME)
    return val


def signatures(store, roots, k=DEFAULT_POINTS, seed=0):
    """Map every node reachable from ``roots`` to its k-tuple of residues.

    A point at which some inverted node evaluates to 0 is thrown away and a
    new one is drawn; more than ``MAX_REDRAWS`` of those raises
    :class:`ResampleLimitExceeded`.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(roots, int):
        roots = (roots,)
    prog = _program(store, roots)
    rng = random.Random(seed)
    nparams = len(store.parameters)
    columns = []
    redraws = 0
    while len(columns) < k:
        point = [rng.randrange(PRIME) for _ in range(nparams)]
        try:
            columns.append(_eval_point(store, prog, point))
        except _Redraw:
            redraws += 1
            if redraws > MAX_REDRAWS:
                raise ResampleLimitExceeded(
                    f"{redraws} random points hit an inverse of zero") from None
    return {node: tuple(col[node] for col in columns) for node, *_ in prog}


def sz_canonicalize(store, roots, k=DEFAULT_POINTS, seed=0):
    """Merge reachable nodes with equal signatures into the lowest index.

    Returns a dict mapping every reachable node to its representative.
    """
    sigs = signatures(store, roots, k, seed)
    rep_of_sig = {}
    subst = {}
    for node in sorted(sigs):
        subst[node] = rep_of_sig.setdefault(sigs[node], node)
    return subst


def apply_substitution(store, root, subst):
    """Rebuild ``root`` with every node replaced by its representative.

    The rebuilt circuit reuses the representative's structure (its own
    operands substituted in turn), so it never has more reachable nodes than
    the original.
    """
    built = {}
    for node in sorted(subst):
        rep = subst.get(node, node)
        if rep != node:
            built[node] = built[rep]
            continue
        kind = store.kind(node)
        ops = [built.get(c, c) for c in store.operands(node)]
        if kind == ADD:
            built[node] = store.add(*ops)
        elif kind == MUL:
            built[node] = store.mul(*ops)
        elif kind == NEG:
            built[node] = store.neg(*ops)
        elif kind == INV:
            built[node] = store.inv(*ops)
        else:
            built[node] = node
    return built.get(root, root)


def simplify(store, root, k=DEFAULT_POINTS, seed=0):
    return apply_substitution(store, root, sz_canonicalize(store, (root,), k, seed))
