"""Binary ``.acir`` serialization of a DagStore.

Layout (all integers little-endian)::

    b"ACIR\\x01"
    u32 parameter count, then per name: u32 byte length + UTF-8 bytes
    u32 constant count,  then per constant: u32 byte length + ASCII "num/den"
    u32 node count,      then one u64 word per node
    u32 root count,      then one u32 node id per root
"""
import struct
from array import array
from fractions import Fraction

from ..errors import MalformedAcir
from .store import (ADD, CONST, INV, MUL, NEG, PARAM, DagStore, MAX_NODES,
                    OPERAND_MASK)

MAGIC = b"ACIR\x01"


def encode(store, roots=()):
    out = bytearray(MAGIC)
    out += struct.pack("<I", len(store.parameters))
    for name in store.parameters:
        raw = name.encode("utf-8")
        out += struct.pack("<I", len(raw)) + raw
    out += struct.pack("<I", len(store.constants))
    for c in store.constants:
        raw = f"{c.numerator}/{c.denominator}".encode("ascii")
        out += struct.pack("<I", len(raw)) + raw
    out += struct.pack("<I", len(store.words))
    out += struct.pack(f"<{len(store.words)}Q", *store.words)
    roots = list(roots)
    out += struct.pack("<I", len(roots))
    out += struct.pack(f"<{len(roots)}I", *roots)
    return bytes(out)


class _Reader:
    def __init__(self, data):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise MalformedAcir(f"truncated at byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def blob(self):
        return bytes(self.take(self.u32()))


def _parse_constant(raw):
    try:
        text = raw.decode("ascii")
        num, den = text.split("/")
        value = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError, UnicodeDecodeError):
        raise MalformedAcir(f"bad constant {raw!r}") from None
    if value.denominator != int(den) or int(den) <= 0:
        raise MalformedAcir(f"constant {raw!r} is not in lowest terms")
    return value


def decode(data):
    """Rebuild a store from ``.acir`` bytes; returns ``(store, roots)``."""
    r = _Reader(data)
    if bytes(r.take(len(MAGIC))) != MAGIC:
        raise MalformedAcir("bad magic")
    try:
        params = [r.blob().decode("utf-8") for _ in range(r.u32())]
    except UnicodeDecodeError:
        raise MalformedAcir("parameter name is not UTF-8") from None
    consts = [_parse_constant(r.blob()) for _ in range(r.u32())]
    count = r.u32()
    if count >= MAX_NODES:
        raise MalformedAcir("node count exceeds 2^30")
    words = struct.unpack(f"<{count}Q", r.take(8 * count))
    nroots = r.u32()
    roots = list(struct.unpack(f"<{nroots}I", r.take(4 * nroots)))
    if r.pos != len(r.data):
        raise MalformedAcir("trailing bytes after root table")

    if len(set(params)) != len(params):
        raise MalformedAcir("duplicate parameter name")
    if len(set(consts)) != len(consts):
        raise MalformedAcir("duplicate constant")

    store = DagStore.__new__(DagStore)
    store.words = array("Q")
    store.hashcons = {}
    store.constants = consts
    store._const_index = {c: i for i, c in enumerate(consts)}
    store.parameters = params
    store._param_index = {p: i for i, p in enumerate(params)}
    store.frozen = False
    const_seen = set()
    for index, word in enumerate(words):
        kind = word & 0xF
        if kind == CONST or kind == PARAM:
            payload = word >> 4
            limit = len(consts) if kind == CONST else len(params)
            if payload >= limit:
                raise MalformedAcir(f"node {index}: table index {payload} out of range")
            if kind == CONST:
                const_seen.add(payload)
        elif kind in (ADD, MUL, NEG, INV):
            a, b = (word >> 4) & OPERAND_MASK, word >> 34
            if a >= index or (kind in (ADD, MUL) and b >= index):
                raise MalformedAcir(f"node {index}: dangling operand")
            if kind in (NEG, INV) and b:
                raise MalformedAcir(f"node {index}: unary node with a right operand")
        else:
            raise MalformedAcir(f"node {index}: unknown kind {kind}")
        if word in store.hashcons:
            raise MalformedAcir(f"node {index} duplicates node {store.hashcons[word]}")
        store.words.append(word)
        store.hashcons[word] = index
    if len(const_seen) != len(consts):
        raise MalformedAcir("constant table entry without a node")
    for root in roots:
        if root >= count:
            raise MalformedAcir(f"root {root} out of range")
    # a store from another writer may lack these; interning appends them
    store.zero = store.const(0)
    store.one = store.const(1)
    return store, roots


def write_acir(path, store, roots=()):
    with open(path, "wb") as fh:
        fh.write(encode(store, roots))


def read_acir(path):
    with open(path, "rb") as fh:
        return decode(fh.read())
