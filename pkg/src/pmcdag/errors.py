"""Exception hierarchy shared by every pmcdag module."""


class PmcError(Exception):
    """Base class for all errors raised by pmcdag."""


class CapacityExceeded(PmcError):
    pass


class UnknownParameter(PmcError):
    def __init__(self, name, where=None):
        self.name = name
        self.where = where
        msg = f"unknown parameter {name!r}"
        if where:
            msg = f"{where}: {msg}"
        super().__init__(msg)


class DivisionByZero(PmcError, ArithmeticError):
    """Raised when a multiplicative inverse of the constant zero is built."""


class EvalDivisionByZero(PmcError, ArithmeticError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"division by zero at node {node}")


class IntervalDividesZero(PmcError, ArithmeticError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"interval of inverted operand contains 0 at node {node}")


class ResampleLimitExceeded(PmcError):
    pass


class MalformedAcir(PmcError):
    pass


class StoreFrozen(PmcError):
    pass


class AbsorbingState(PmcError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"state {state} only has a self-loop")


class NonAlmostSureReachability(PmcError):
    pass


class DenominatorZero(PmcError):
    pass


class SingularSystem(PmcError):
    pass


class ModelSyntaxError(PmcError):
    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(loc + msg)


class DuplicateTransition(PmcError):
    pass


class IndexOutOfRange(PmcError):
    pass


class MalformedGrid(PmcError):
    pass


class GraphNotPreserved(PmcError):
    """A transition expression leaves (0, 1] at a sampled valuation."""
