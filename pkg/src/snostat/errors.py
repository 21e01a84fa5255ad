"""Exception hierarchy shared by all modules."""


class SnoError(Exception):
    """Base class for every error raised by snostat."""


class ExprSyntaxError(SnoError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ExprSyntaxError):
    pass


class VariableIndexError(ExprSyntaxError):
    pass


class DomainError(SnoError, ArithmeticError):
    """Evaluation left the domain of log/sqrt or divided by zero."""


class InfeasiblePointError(SnoError):
    pass


class LicqError(SnoError):
    """SNO-LICQ fails, so multipliers are not unique."""


class UnsupportedConeError(SnoError):
    pass


class PathDivergenceError(SnoError):
    """Raised when Newton fails along a regularization path.

    The partial path computed so far is kept on ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
