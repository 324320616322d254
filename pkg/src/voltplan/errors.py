"""Exception types shared across the package.

Validation failures map to CLI exit code 2, timing infeasibility to 3.
"""


class VoltplanError(Exception):
    pass


class ValidationError(VoltplanError):
    pass


class NotConvex(ValidationError):
    """Curve slope magnitudes are not strictly decreasing."""


class NotMonotone(ValidationError):
    """Delays not strictly increasing or powers not strictly decreasing."""


class WrongArity(ValidationError):
    """Point count does not match the requested level count."""


class ResultNotConvex(ValidationError):
    """Adding the shifter overhead broke the curve invariants."""


class EmptyNet(ValidationError):
    """A net with a source but no sinks."""


class CyclicNetlist(ValidationError):
    """The directed graph over modules contains a cycle."""


class MalformedExpression(ValidationError):
    """Slicing expression is not a valid normalized postfix string."""


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateName(ParseError):
    pass


class UnknownBlock(ParseError):
    pass


class InfeasibleLowerBounds(VoltplanError):
    """No circulation satisfies the arc lower bounds."""


class NegativeResidualCycle(VoltplanError):
    """The flow passed in was not optimal."""


class TimingInfeasible(VoltplanError):
    """Even the fastest levels exceed the cycle-time budget."""

    def __init__(self, message, critical_path=()):
        super().__init__(message)
        self.critical_path = tuple(critical_path)


class TooLarge(VoltplanError):
    """Instance exceeds the exhaustive-search size bound."""
