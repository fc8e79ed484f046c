"""Hash-consed arithmetic circuit store.

Every node is one packed 64-bit word::

    bits [0, 4)    node kind
    bits [4, 34)   left operand / child        (Add, Mul, Neg, Inv)
    bits [34, 64)  right operand, 0 for unary  (Add, Mul)
    bits [4, 64)   table index                 (Const, Param)

Because a word fully determines the node's structure, the word itself is the
hash-cons key.  Constants are exact :class:`fractions.Fraction` values kept in
a side table; the word of a ``Const`` node holds the table index.
"""
from array import array
from fractions import Fraction
from collections.abc import Mapping

from ..errors import (CapacityExceeded, DivisionByZero, StoreFrozen,
                      UnknownParameter)

CONST, PARAM, ADD, MUL, NEG, INV = range(6)
KIND_NAMES = ("const", "param", "add", "mul", "neg", "inv")

MAX_NODES = 1 << 30
OPERAND_MASK = (1 << 30) - 1
PAYLOAD_MASK = (1 << 60) - 1


def pack_leaf(kind, index):
    return kind | (index << 4)


def pack_binary(kind, left, right):
    return kind | (left << 4) | (right << 34)


def pack_unary(kind, child):
    return kind | (child << 4)


def unpack(word):
    """Return ``(kind, a, b)``; for leaves ``a`` is the table index."""
    kind = word & 0xF
    if kind <= PARAM:
        return kind, word >> 4, 0
    return kind, (word >> 4) & OPERAND_MASK, word >> 34


def to_rational(value):
    """Convert ints, Fractions, decimal strings and binary64 floats exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


class DagStore:
    """Append-only store of arithmetic-circuit nodes over a fixed parameter list.

    The constructors ``const``, ``param``, ``add``, ``mul``, ``neg`` and ``inv``
    apply constant folding, neutral-element rules, double-negation and
    double-inversion collapse, and order commutative operands before the
    hash-cons lookup.
    """

    def __init__(self, parameters=()):
        self.words = array("Q")
        self.hashcons = {}
        self.constants = []
        self._const_index = {}
        self.parameters = []
        self._param_index = {}
        self.frozen = False
        for name in parameters:
            self.add_parameter(name)
        self.zero = self.const(0)
        self.one = self.const(1)

    def __len__(self):
        return len(self.words)

    def __repr__(self):
        return (f"DagStore(nodes={len(self.words)}, "
                f"parameters={self.parameters!r})")

    # -- registration -------------------------------------------------------

    def add_parameter(self, name):
        if name in self._param_index:
            return self._param_index[name]
        self._check_mutable()
        self._param_index[name] = len(self.parameters)
        self.parameters.append(name)
        return self._param_index[name]

    def parameter_index(self, name):
        try:
            return self._param_index[name]
        except KeyError:
            raise UnknownParameter(name) from None

    def freeze(self):
        """Forbid further construction; evaluation stays available."""
        self.frozen = True
        return self

    def _check_mutable(self):
        if self.frozen:
            raise StoreFrozen("store is frozen")

    def _intern(self, word):
        node = self.hashcons.get(word)
        if node is not None:
            return node
        self._check_mutable()
        node = len(self.words)
        if node + 1 >= MAX_NODES:
            raise CapacityExceeded("node count would reach 2^30")
        self.words.append(word)
        self.hashcons[word] = node
        return node

    # -- inspection ---------------------------------------------------------

    def kind(self, node):
        return self.words[node] & 0xF

    def operands(self, node):
        kind, a, b = unpack(self.words[node])
        if kind in (ADD, MUL):
            return (a, b)
        if kind in (NEG, INV):
            return (a,)
        return ()

    def const_value(self, node):
        """The Fraction held by a Const node, or None for any other kind."""
        word = self.words[node]
        if word & 0xF != CONST:
            return None
        return self.constants[word >> 4]

    def is_zero(self, node):
        return node == self.zero

    def is_one(self, node):
        return node == self.one

    # -- constructors -------------------------------------------------------

    def const(self, value):
        value = to_rational(value)
        index = self._const_index.get(value)
        if index is None:
            word = pack_leaf(CONST, len(self.constants))
            # reserve the node first so a CapacityExceeded leaves no orphan
            self._check_mutable()
            if len(self.words) + 1 >= MAX_NODES:
                raise CapacityExceeded("node count would reach 2^30")
            index = len(self.constants)
            self.constants.append(value)
            self._const_index[value] = index
            return self._intern(word)
        return self.hashcons[pack_leaf(CONST, index)]

    def param(self, name):
        if isinstance(name, int):
            if not 0 <= name < len(self.parameters):
                raise UnknownParameter(name)
            index = name
        else:
            index = self.parameter_index(name)
        return self._intern(pack_leaf(PARAM, index))

    def add(self, a, b):
        ca = self.const_value(a)
        cb = self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca + cb)
        if ca == 0:
            return b
        if cb == 0:
            return a
        if b < a:
            a, b = b, a
        return self._intern(pack_binary(ADD, a, b))

    def mul(self, a, b):
        ca = self.const_value(a)
        cb = self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca * cb)
        if ca == 0 or cb == 0:
            return self.zero
        if ca == 1:
            return b
        if cb == 1:
            return a
        if b < a:
            a, b = b, a
        return self._intern(pack_binary(MUL, a, b))

    def neg(self, a):
        word = self.words[a]
        kind = word & 0xF
        if kind == CONST:
            return self.const(-self.constants[word >> 4])
        if kind == NEG:
            return (word >> 4) & OPERAND_MASK
        return self._intern(pack_unary(NEG, a))

    def inv(self, a):
        word = self.words[a]
        kind = word & 0xF
        if kind == CONST:
            value = self.constants[word >> 4]
            if value == 0:
                raise DivisionByZero("multiplicative inverse of constant 0")
            return self.const(1 / value)
        if kind == INV:
            return (word >> 4) & OPERAND_MASK
        return self._intern(pack_unary(INV, a))

    # derived helpers, all expressed through the primitive constructors

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def one_minus(self, a):
        return self.add(self.one, self.neg(a))

    def sum(self, nodes):
        total = self.zero
        for node in nodes:
            total = self.add(total, node)
        return total

    # -- graph utilities ----------------------------------------------------

    def reachable(self, roots):
        """Sorted list of node ids reachable from ``roots`` (children first)."""
        if isinstance(roots, int):
            roots = (roots,)
        words = self.words
        seen = set()
        stack = list(roots)
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            word = words[node]
            kind = word & 0xF
            if kind >= ADD:
                stack.append((word >> 4) & OPERAND_MASK)
                if kind <= MUL:
                    stack.append(word >> 34)
        return sorted(seen)

    def size(self, root):
        """Number of nodes reachable from ``root``."""
        return len(self.reachable(root))

    def valuation(self, values):
        """Order a ``{name: value}`` mapping (or a sequence) by parameter index."""
        if isinstance(values, Mapping):
            missing = [p for p in self.parameters if p not in values]
            if missing:
                raise ValueError(f"valuation has no value for {missing[0]!r}")
            for name in values:
                if name not in self._param_index:
                    raise UnknownParameter(name)
            return [values[p] for p in self.parameters]
        values = list(values)
        if len(values) != len(self.parameters):
            raise ValueError(f"valuation has {len(values)} entries, "
                             f"store has {len(self.parameters)} parameters")
        return values

    def to_text(self, root):
        """Fully parenthesised infix rendering, parseable by modelio."""
        text = {}
        for node in self.reachable(root):
            kind, a, b = unpack(self.words[node])
            if kind == CONST:
                c = self.constants[a]
                text[node] = str(c) if c >= 0 and c.denominator == 1 else f"({c})"
            elif kind == PARAM:
                text[node] = self.parameters[a]
            elif kind == ADD:
                text[node] = f"({text[a]} + {text[b]})"
            elif kind == MUL:
                text[node] = f"({text[a]} * {text[b]})"
            elif kind == NEG:
                text[node] = f"(-{text[a]})"
            else:
                text[node] = f"(1 / {text[a]})"
        return text[root]
