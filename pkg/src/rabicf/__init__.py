"""Exact spectra of the generalized Rabi model and its contraction to the Rabi model."""

from .core import (
    AngularMomentumRep,
    BlockTridiagonal,
    ModelParams,
    RabiParams,
    Spin,
    angular_momentum_matrices,
    assemble_dense,
    build_hl_blocks,
    verify_selection_rule,
)
from .errors import (
    ConvergenceFailure,
    PoleEncountered,
    SingularOffDiagonal,
    SolverError,
    SturmConditionViolated,
    UnsupportedSpin,
)
from .spectra import Parity, SpectrumResult, hl_spectrum, rabi_spectrum
from .tridiag import Tridiagonal, bracket_and_refine

__version__ = "0.1.0"
