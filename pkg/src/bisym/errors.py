"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: parse/config problems -> 2,
numerical unreliability -> 3, violated preconditions -> 4.
"""


class BisymError(Exception):
    """Base class for all package errors."""


class ParseError(BisymError, ValueError):
    """Malformed symbol, pair or diagram input."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class PreconditionError(BisymError, ValueError):
    """An operation was called outside its documented domain."""


class NotPolynomialError(PreconditionError):
    """Symbol has a component r^j e^{ik theta} that is not a polynomial in (x, xi)."""


class NotEllipticError(PreconditionError):
    """A symbol or loop vanishes somewhere on the sampling grid."""


class IncompatiblePairError(PreconditionError):
    """The two halves of a symbol pair disagree on the torus."""


class OutsideFormulaScopeError(PreconditionError):
    """Topological index requested for a pair shape without a formula."""


class NotInvertibleError(PreconditionError):
    """A truncated operator loop is singular somewhere on the grid."""


class UnreliableError(BisymError):
    """A numerical integer could not be certified (residual too large)."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
