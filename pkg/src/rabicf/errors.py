"""Exception types raised by the solvers."""


class SolverError(Exception):
    """Base class for all numerical failures in :mod:`rabicf`."""


class ConvergenceFailure(SolverError):
    """An iterative method hit its iteration cap or failed a consistency check."""


class SturmConditionViolated(SolverError):
    """A tridiagonal coupling product ``b_k * c_k`` is not strictly positive."""


class SingularOffDiagonal(SolverError):
    """An off-diagonal block is too ill-conditioned to invert."""


class PoleEncountered(SolverError):
    """A continued-fraction step divided by an exact zero."""


class UnsupportedSpin(SolverError, ValueError):
    """The requested spin magnitudes are outside what a solver path handles."""
