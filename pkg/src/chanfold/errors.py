"""Exception types shared by all chanfold modules."""


class ChanfoldError(Exception):
    """Base class. ``code`` is a short machine-readable identifier."""

    code = "error"

    def __init__(self, message, *, code=None, path=None):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code
        self.path = path

    def to_dict(self):
        return {"code": self.code, "path": self.path, "message": self.message}


class InputError(ChanfoldError, ValueError):
    """Invalid input: bad shapes, broken invariants, malformed documents."""

    code = "input_error"


class NumericalError(ChanfoldError, ArithmeticError):
    """A computation could not reach a decision within its tolerances."""

    code = "numerical_error"
