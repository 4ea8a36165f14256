"""Quantum Fisher information of Gaussian bosonic states.

Covariance matrices use the complex form over ``(a_1..a_N, a_1^dag..a_N^dag)``
in which the vacuum covariance is the identity.
"""

from .core import (
    DEFAULT_TOL,
    GaussianState,
    RealGaussianState,
    Tolerances,
    WilliamsonFactors,
    k_matrix,
    symplectic_eigenvalues,
    symplectic_eigenvalues_two_mode,
    to_complex,
    to_real,
    transform_state,
    validate_state,
    williamson_decompose,
)
from .errors import (
    ApplicabilityError,
    CompositeError,
    ConvergenceError,
    DomainError,
    GaussQfiError,
    InsufficientDerivativesError,
    NumericalError,
    PurityError,
    StructuralError,
    UnphysicalStateError,
    UnsupportedDerivativeError,
)
from .fidelity import bures_qfi_fd, two_mode_fidelity
from .fock import CutoffConfig, fock_build, fock_build_common, fock_moments, qfi_fock_fd, uhlmann_fidelity_fock
from .parametrization import (
    DerivativeBundle,
    FdConfig,
    StateFamily,
    generator_family,
    p1_matrix,
    williamson_jet,
)
from .probes import (
    ChannelSpec,
    ProbeSpec,
    apply_channel_family,
    build_probe,
    ellipse_area,
    ellipse_export,
    enhancement_squeezing_for_orders,
    optimal_thermal_occupation,
    photon_budget_argmax,
    qfi_max_photon_budget,
    squeezing_channel_qfi_closed,
    squeezing_channel_qfi_optimal,
)
from .qfi import (
    Method,
    PureConvention,
    QfiEstimate,
    qfi_auto,
    qfi_isothermal,
    qfi_multimode_williamson,
    qfi_pure_point,
    qfi_regularized,
    qfi_series,
    qfi_two_mode,
    qfi_two_mode_williamson,
    series_remainder_bound,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "GaussianState",
    "RealGaussianState",
    "Tolerances",
    "WilliamsonFactors",
    "k_matrix",
    "symplectic_eigenvalues",
    "symplectic_eigenvalues_two_mode",
    "to_complex",
    "to_real",
    "transform_state",
    "validate_state",
    "williamson_decompose",
    "ApplicabilityError",
    "CompositeError",
    "ConvergenceError",
    "DomainError",
    "GaussQfiError",
    "InsufficientDerivativesError",
    "NumericalError",
    "PurityError",
    "StructuralError",
    "UnphysicalStateError",
    "UnsupportedDerivativeError",
    "bures_qfi_fd",
    "two_mode_fidelity",
    "CutoffConfig",
    "fock_build",
    "fock_build_common",
    "fock_moments",
    "qfi_fock_fd",
    "uhlmann_fidelity_fock",
    "DerivativeBundle",
    "FdConfig",
    "StateFamily",
    "generator_family",
    "p1_matrix",
    "williamson_jet",
    "ChannelSpec",
    "ProbeSpec",
    "apply_channel_family",
    "build_probe",
    "ellipse_area",
    "ellipse_export",
    "enhancement_squeezing_for_orders",
    "optimal_thermal_occupation",
    "photon_budget_argmax",
    "qfi_max_photon_budget",
    "squeezing_channel_qfi_closed",
    "squeezing_channel_qfi_optimal",
    "Method",
    "PureConvention",
    "QfiEstimate",
    "qfi_auto",
    "qfi_isothermal",
    "qfi_multimode_williamson",
    "qfi_pure_point",
    "qfi_regularized",
    "qfi_series",
    "qfi_two_mode",
    "qfi_two_mode_williamson",
    "series_remainder_bound",
    "__version__",
]
