"""Exception hierarchy shared by every module."""


class GaussQfiError(Exception):
    """Base class for all errors raised by gaussqfi."""


class StructuralError(GaussQfiError, ValueError):
    """Array shapes or block structure do not describe a valid Gaussian state."""


class UnphysicalStateError(GaussQfiError, ValueError):
    """A symplectic eigenvalue lies below 1 (uncertainty principle violated)."""


class NumericalError(GaussQfiError, ArithmeticError):
    """A numerical routine failed or produced an out-of-range intermediate."""


class DomainError(GaussQfiError, ValueError):
    """A parameter lies outside the admissible domain."""


class UnsupportedDerivativeError(GaussQfiError):
    """The requested derivative cannot be obtained reliably (e.g. FD on a degenerate spectrum)."""


class InsufficientDerivativesError(GaussQfiError):
    """A formula needs a derivative the family cannot supply."""


class PurityError(GaussQfiError):
    """A method that requires all symplectic eigenvalues > 1 met a pure mode."""


class ApplicabilityError(GaussQfiError):
    """The state or family falls outside the class a method handles."""


class ConvergenceError(GaussQfiError):
    """An iterative procedure hit its cap before reaching the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CompositeError(GaussQfiError):
    """Every dispatch route failed; ``failures`` maps route name to its exception."""

    def __init__(self, failures):
        self.failures = dict(failures)
        lines = [f"{name}: {type(err).__name__}: {err}" for name, err in self.failures.items()]
        super().__init__("all QFI routes failed\n  " + "\n  ".join(lines))
