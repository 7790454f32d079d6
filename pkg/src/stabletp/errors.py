"""Exception hierarchy shared by every module.

The CLI maps :class:`InvalidParams` and :class:`DomainError` to exit code 2
and :class:`NumericFailure` to exit code 3.
"""


class StableTPError(Exception):
    pass


class InvalidParams(StableTPError, ValueError):
    """A parameter violates a documented precondition."""


class DomainError(StableTPError, ValueError):
    """An argument lies outside the domain of a function."""


class PoleError(DomainError):
    pass


class NumericFailure(StableTPError, ArithmeticError):
    """A series, quadrature or root search did not reach its tolerance."""


class NonConvergence(NumericFailure):
    pass


class BracketingFailure(NumericFailure):
    pass
