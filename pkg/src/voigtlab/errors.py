"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedOperation(TypeError):
    """The operation needs data the given object does not carry."""


class NumericalBlowup(ArithmeticError):
    """Time integration produced non-finite values."""

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"non-finite state at t = {self.time:.17g}")
