"""The ``.pmc`` explicit-state model format and ``.dat`` surface tables.

A model file is line oriented; ``#`` starts a comment::

    @parameters
    x
    @states 3
    @initial 0
    @labels
    2: "goal"
    @transitions
    0 1 x
    0 2 1-x
    1 1 1
    2 2 1
    @rewards steps
    0: 1

Expressions use ``+ - * /``, unary minus, parentheses, decimal literals
(read exactly, ``0.25`` is 1/4) and parameter names.  There is no power
operator; write ``x*x``.  Reward entries not listed default to 0.
"""
import re
from fractions import Fraction

from .acir import DagStore
from .acir.interval import Interval
from .errors import (DivisionByZero, DuplicateTransition, IndexOutOfRange,
                     ModelSyntaxError, UnknownParameter)
from .pmc import Pmc, trim_unreachable

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/()])
""", re.VERBOSE)


def _tokenize(text, line, col0):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}",
                                   line, col0 + pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), col0 + pos + 1))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text) + 1))
    return tokens


class _ExprParser:
    """Recursive descent: expr := term (('+'|'-') term)*,
    term := unary (('*'|'/') unary)*, unary := '-' unary | atom."""

    def __init__(self, text, store, line=None, col0=0):
        self.store = store
        self.line = line
        self.tokens = _tokenize(text, line, col0)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ModelSyntaxError(msg, self.line, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        store = self.store
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self.term()
            node = store.add(node, rhs if op == "+" else store.neg(rhs))
        return node

    def term(self):
        store = self.store
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.next()
            rhs = self.unary()
            if tok[1] == "*":
                node = store.mul(node, rhs)
            else:
                try:
                    node = store.mul(node, store.inv(rhs))
                except DivisionByZero:
                    raise DivisionByZero(
                        f"line {self.line}, column {tok[2]}: division by zero"
                        if self.line else "division by zero") from None
        return node

    def unary(self):
        if self.peek() == ("op", "-", self.peek()[2]):
            self.next()
            return self.store.neg(self.unary())
        return self.atom()

    def atom(self):
        kind, text, col = self.next()
        if kind == "num":
            return self.store.const(Fraction(text))
        if kind == "name":
            if text not in self.store.parameters:
                raise UnknownParameter(text, f"line {self.line}, column {col}"
                                       if self.line else None)
            return self.store.param(text)
        if text == "(":
            node = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.next()
            return node
        self.fail(f"unexpected {text or 'end of input'!r}", (kind, text, col))


def parse_expression(text, store, line=None, col0=0):
    """Parse ``text`` into a node of ``store``; ``a/b`` becomes a * inv(b)."""
    return _ExprParser(text, store, line, col0).parse()


_SECTIONS = ("@parameters", "@states", "@initial", "@labels", "@transitions",
             "@rewards")
_LABEL = re.compile(r'"([^"]*)"')


def _int(text, line, col, what):
    try:
        value = int(text)
    except ValueError:
        raise ModelSyntaxError(f"expected {what}, got {text!r}", line, col) from None
    if value < 0:
        raise ModelSyntaxError(f"{what} must be non-negative", line, col)
    return value


def parse_model(text, trim=True):
    """Build a :class:`Pmc` (with labels and reward structures) from text."""
    store = None
    params = []
    n = None
    initial = None
    labels = {}
    transitions = {}
    rewards = {}
    section = None
    reward_name = None

    def need_states(lineno):
        if n is None:
            raise ModelSyntaxError("@states must come first", lineno, 1)

    def ensure_store():
        nonlocal store
        if store is None:
            store = DagStore(params)
        return store

    def state(token, lineno, col):
        s = _int(token, lineno, col, "state index")
        need_states(lineno)
        if s >= n:
            raise IndexOutOfRange(f"line {lineno}: state {s} out of range "
                                  f"(model has {n} states)")
        return s

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if body.startswith("@"):
            head, _, rest = body.partition(" ")
            rest = rest.strip()
            if head not in _SECTIONS:
                raise ModelSyntaxError(f"unknown section {head!r}", lineno, indent + 1)
            section = head
            col = indent + len(head) + 2
            if head == "@parameters":
                if store is not None:
                    raise ModelSyntaxError("@parameters after expressions", lineno, 1)
                params.extend(rest.split())
            elif head == "@states":
                if n is not None:
                    raise ModelSyntaxError("@states given twice", lineno, 1)
                n = _int(rest, lineno, col, "state count")
            elif head == "@initial":
                initial = state(rest, lineno, col)
            elif head == "@rewards":
                if not rest or len(rest.split()) != 1:
                    raise ModelSyntaxError("@rewards needs one name", lineno, col)
                reward_name = rest
                if reward_name in rewards:
                    raise ModelSyntaxError(f"reward {rest!r} defined twice", lineno, col)
                rewards[reward_name] = {}
            elif rest:
                raise ModelSyntaxError(f"unexpected text after {head}", lineno, col)
            continue

        if section == "@parameters":
            params.extend(body.split())
        elif section == "@labels":
            idx, sep, names = body.partition(":")
            if not sep:
                raise ModelSyntaxError('expected `state: "label"`', lineno, indent + 1)
            s = state(idx.strip(), lineno, indent + 1)
            found = _LABEL.findall(names)
            if not found or _LABEL.sub("", names).strip():
                raise ModelSyntaxError("labels must be double-quoted names",
                                       lineno, indent + len(idx) + 2)
            for name in found:
                labels.setdefault(name, set()).add(s)
        elif section == "@transitions":
            m = re.match(r"(\S+)\s+(\S+)\s+", body)
            if m is None:
                raise ModelSyntaxError("expected `src dst expression`", lineno, indent + 1)
            src = state(m.group(1), lineno, indent + 1)
            dst = state(m.group(2), lineno, indent + m.start(2) + 1)
            if (src, dst) in transitions:
                raise DuplicateTransition(f"line {lineno}: second transition "
                                          f"{src} -> {dst}")
            node = parse_expression(body[m.end():], ensure_store(), lineno,
                                    indent + m.end())
            transitions[(src, dst)] = node
        elif section == "@rewards":
            idx, sep, expr = body.partition(":")
            if not sep:
                raise ModelSyntaxError("expected `state: expression`", lineno, indent + 1)
            s = state(idx.strip(), lineno, indent + 1)
            if s in rewards[reward_name]:
                raise ModelSyntaxError(f"second reward entry for state {s}",
                                       lineno, indent + 1)
            rewards[reward_name][s] = parse_expression(
                expr, ensure_store(), lineno, indent + len(idx) + 1)
        else:
            raise ModelSyntaxError("content outside any section", lineno, indent + 1)

    if n is None:
        raise ModelSyntaxError("missing @states")
    if initial is None:
        raise ModelSyntaxError("missing @initial")
    if len(set(params)) != len(params):
        raise ModelSyntaxError("duplicate parameter name")
    store = ensure_store()
    rows = [{} for _ in range(n)]
    for (src, dst), node in transitions.items():
        if node != store.zero:
            rows[src][dst] = node
    reward_vectors = {name: [entries.get(s, store.zero) for s in range(n)]
                      for name, entries in rewards.items()}
    pmc = Pmc(store, n, initial, rows, labels, reward_vectors)
    return trim_unreachable(pmc) if trim else pmc


def load_model(path, trim=True):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), trim)


def print_model(pmc):
    """Render a model in the ``.pmc`` format (round-trips through parse)."""
    store = pmc.store
    out = []
    if store.parameters:
        out += ["@parameters", " ".join(store.parameters)]
    out += [f"@states {pmc.n}", f"@initial {pmc.initial}"]
    by_state = {}
    for name in sorted(pmc.labels):
        for s in pmc.labels[name]:
            by_state.setdefault(s, []).append(name)
    if by_state:
        out.append("@labels")
        for s in sorted(by_state):
            out.append(f"{s}: " + " ".join(f'"{name}"' for name in by_state[s]))
    out.append("@transitions")
    for s, row in enumerate(pmc.rows):
        for t in sorted(row):
            out.append(f"{s} {t} {store.to_text(row[t])}")
    for name in sorted(pmc.rewards):
        out.append(f"@rewards {name}")
        for s, node in enumerate(pmc.rewards[name]):
            if node != store.zero:
                out.append(f"{s}: {store.to_text(node)}")
    return "\n".join(out) + "\n"


# -- .dat output ------------------------------------------------------------

def format_number(x):
    """Decimal text: exact for terminating rationals, else shortest float repr."""
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return repr(float(x))
    digits = max(twos, fives)
    scaled = abs(x.numerator) * 10 ** digits // x.denominator
    sign = "-" if x < 0 else ""
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _value_fields(value):
    if isinstance(value, Interval):
        return [repr(value.lo), repr(value.hi)]
    if isinstance(value, tuple):
        return [format_number(v) for v in value]
    return [format_number(value)]


def format_dat(rows):
    """Render ``(valuation, value)`` rows; blank line where an outer axis moves."""
    lines = []
    prev_outer = None
    arity = None
    for valuation, value in rows:
        fields = [format_number(v) for v in valuation] + _value_fields(value)
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise ValueError("rows of a .dat table must have equal arity")
        outer = tuple(valuation[:-1])
        if prev_outer is not None and outer and outer != prev_outer:
            lines.append("")
        prev_outer = outer
        lines.append(" ".join(fields))
    return "".join(line + "\n" for line in lines)


def write_dat(rows, path):
    text = format_dat(rows)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
