""" Exceptions raised across the oneatom package """
from typing import Optional


class OneAtomError(Exception):
    """Base class for all package errors"""

    pass


class InvalidDimensionError(OneAtomError, ValueError):
    """Truncation dimension or tail width out of range"""

    pass


class DimensionMismatchError(OneAtomError, ValueError):
    """Operands live in different truncated spaces or atomic bases"""

    pass


class ContractViolationError(OneAtomError, ValueError):
    """A precondition of an operation does not hold, e.g. an unnormalized input"""

    pass


class ZeroProbabilityError(OneAtomError, ArithmeticError):
    """The requested detection outcome has vanishing probability"""

    pass


class ConvergenceError(OneAtomError, RuntimeError):
    """Truncation or step size too coarse for the requested accuracy"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(message)
        self.suggestion = suggestion

    def __str__(self):
        message = super().__str__()
        if self.suggestion:
            return "%s (%s)" % (message, self.suggestion)
        return message


class ConfigError(OneAtomError, ValueError):
    """Scenario file could not be parsed or failed validation"""

    def __init__(self, field: Optional[str], message: str, line: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.line = line

    def __str__(self):
        where = []
        if self.line is not None:
            where.append("line %d" % self.line)
        if self.field:
            where.append("field '%s'" % self.field)
        message = super().__str__()
        if where:
            return "%s: %s" % (", ".join(where), message)
        return message
