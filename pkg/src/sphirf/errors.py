"""Exception hierarchy.

``ValidationError`` subclasses signal bad inputs (CLI exit code 2),
``NumericalError`` subclasses signal a numerical breakdown (exit code 3).
"""


class IRFError(Exception):
    pass


class ValidationError(IRFError, ValueError):
    pass


class NumericalError(IRFError, ArithmeticError):
    pass


class TooFewSites(ValidationError):
    pass


class RankDeficientDesign(ValidationError):
    pass


class NonUnisolvent(ValidationError):
    pass


class NotAllowable(ValidationError):
    pass


class SingularSystem(NumericalError):
    pass


class QuadratureOrderError(NumericalError):
    pass
