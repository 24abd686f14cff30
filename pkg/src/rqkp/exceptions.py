class RqkpError(Exception):
    """Base class for all errors raised by this package."""


class ZeroRankFactor(RqkpError, ValueError):
    def __init__(self, index):
        super().__init__(f"q[{index}] is zero; every rank-one factor entry must be nonzero")
        self.index = index


class BadBounds(RqkpError, ValueError):
    def __init__(self, index):
        super().__init__(f"l[{index}] > u[{index}]")
        self.index = index


class ParseError(RqkpError, ValueError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class QueueEmpty(RqkpError):
    pass


class UnboundedDual(RqkpError):
    """The dual kept increasing through every doubling: the primal is infeasible."""


class TooLarge(RqkpError, ValueError):
    def __init__(self, n, limit):
        super().__init__(f"n={n} exceeds the enumeration limit {limit}")
        self.n = n


class Infeasible(RqkpError):
    pass
