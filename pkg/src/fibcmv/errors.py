"""Exception types shared across the package."""


class CapExceeded(ValueError):
    """A requested word or product would exceed the configured length cap."""


class BoundaryContact(ValueError):
    """A walk state reached the edge of its truncation window."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance.

    ``residual`` holds the best residual that was achieved.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class NumericalInconsistency(RuntimeError):
    """Two computations that must agree did not (zero counts, cross-checks)."""
