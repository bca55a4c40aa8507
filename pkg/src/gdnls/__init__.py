"""Numerical laboratory for solitary waves of the generalized derivative NLS
equation i*u_t + u_xx + i*|u|^(2*sigma)*u_x = 0: profile construction,
stability calculus of the action d(omega), linearized-operator spectra, and
pseudospectral time integration with orbital-distance tracking."""

from .errors import (
    BlowupError,
    BoundaryContaminationError,
    ConvergenceError,
    DomainError,
    GdnlsError,
    GridTooSmallError,
    InconsistentBranchError,
    MultipleRootsError,
    NoRootError,
    NotDegenerateError,
    UsageError,
    ZeroVectorError,
)
from .functionals import (
    ComplexField,
    ConservedLedger,
    action,
    apply_B,
    conserved_ledger,
    d_value,
    energy,
    h1_inner,
    h1_norm,
    mass,
    momentum,
)
from .linearized import LinearizedOperator, apply, assemble, lowest_spectrum
from .moments import (
    DegeneracyReport,
    HessianReport,
    branch_detect,
    classify_stability,
    degeneracy_report,
    degenerate_omega,
    hessian_closed,
    hessian_fd,
    hessian_report,
    third_directional,
    third_directional_fd,
    third_partials,
    third_partials_fd,
    zero_eigenvector,
)
from .params import (
    AlphaMoments,
    DerivedParams,
    Omega,
    QuadratureSpec,
    Sigma,
    alpha_derivatives,
    alpha_moments,
    alpha_n,
    derived_params,
    f_sigma,
    find_z0,
    kappa,
    kappa_tilde,
)
from .profile import (
    SolitonProfile,
    amplitude_at,
    default_grid,
    min_grid_length,
    parameter_derivative,
    phase_at,
    sample_profile,
    stationary_residual,
)
from .simulator import (
    OrbitalTrace,
    Perturbation,
    SimConfig,
    SimState,
    orbital_distance,
    run_experiment,
    soliton_error,
    step,
)
from .spectral import Grid

__version__ = "0.1.0"
