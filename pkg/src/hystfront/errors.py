"""Exception hierarchy shared by all modules."""


class HystError(ValueError):
    pass


class InfeasibleInitialState(HystError):
    """Initial pair (u(0), w0) lies outside the hysteresis strip."""


class InfeasibleState(HystError):
    pass


class InfeasibleData(HystError):
    pass


class MismatchedBreakpoints(HystError):
    pass


class DomainError(HystError):
    pass


class DegenerateData(HystError):
    pass


class StaleEvent(HystError):
    pass


class DegenerateJump(HystError):
    pass


class NonAdmissiblePair(HystError):
    """Distinct states whose generalized Rankine-Hugoniot denominator vanishes."""


class UnboundedSupport(HystError):
    pass


class WindowMismatch(HystError):
    pass


class SpecParseError(HystError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
