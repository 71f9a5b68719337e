"""Spectral solvers for parabolic final value problems.

Forward Duhamel solves, compatibility analysis and backward reconstruction,
explicit steering controls, Dirichlet boundary data on the interval, and
finite-dimensional non-selfadjoint models.
"""
__version__ = "0.1.0"

from .kernels import BACKEND
from .eigenbasis import (
    EigenSystem,
    SpectralVector,
    interval_basis,
    project,
    rectangle_basis,
    sobolev_norm,
    synthesize,
)
from .errors import (
    BasisMismatchError,
    FVPError,
    IncompatibleDataError,
    InvalidArgumentError,
    NotEllipticError,
    OverflowDomainError,
    UnsupportedDomainError,
)
from .semigroup import (
    domain_chain_witness,
    graph_norm,
    membership_diagnostic,
    propagate,
    propagate_inverse,
)
from .forward import (
    ModalSignal,
    Trajectory,
    duhamel_solve,
    smoothing_inequality_check,
    stability_check,
    x_norm,
    yield_map,
)
from .boundary import (
    BoundarySignal,
    boundary_norm,
    boundary_yield,
    inhom_forward_solve,
    poisson_extend,
)
from .final_value import (
    CompatibilityReport,
    analyze,
    compatibility_vector,
    equivalent_norm_check,
    solve_fvp,
    well_posedness_check,
)
from .steering import SteeringControl, steer, verify_steering
from .matrix_model import MatrixModel, build, expm_apply, height_function
from .diagnostics import backward_conditioning_report, instability_table, weyl_check
