"""Exception types shared across the toolkit."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to stabilize within its iteration budget."""


class NotAdmissibleError(ValueError):
    """The requested (band, field) pair has no first-order splitting."""


class GapViolationError(ValueError):
    """The Fermi energy sits too close to an eigenvalue for a projection to be meaningful."""
