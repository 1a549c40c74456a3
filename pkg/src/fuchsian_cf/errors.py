"""Exception types shared by every module."""


class OperatorError(ValueError):
    """Malformed operator data (empty lists, undefined order, mixed backends)."""


class PreconditionError(ValueError):
    """An input violates an operation's precondition (e.g. a point on a bisector line).

    ``reason`` is a short machine-readable tag used by the CLI.
    """

    def __init__(self, message: str, reason: str = "precondition"):
        super().__init__(message)
        self.reason = reason


class NonConvergenceError(ArithmeticError):
    """An iterative estimate failed to settle; ``partial`` holds what was computed."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
