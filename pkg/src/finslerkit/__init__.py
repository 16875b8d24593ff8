"""Numerical analysis of Minkowski norms and Matsumoto's relative-length conjecture."""
from .calculus import HyperDual, SecondOrderJet, finite_difference_hessian, jet_of_norm_squared
from .conjecture import (
    ConjectureReport,
    CounterexampleCertificate,
    FamilySweepSummary,
    sweep_family,
    sweep_vectors,
    test_conjecture,
    verify_certificate,
)
from .energy import (
    CriticalPoint,
    EnergyProfile,
    crit_condition_residual,
    energy_profile,
    find_critical_points,
    lagrange_residual,
    relative_energy,
    relative_length,
)
from .errors import (
    ConvexityFailure,
    DifferentiationFailure,
    FinslerError,
    MetricFormatError,
    NonPositiveArgument,
    ResolutionFailure,
)
from .norms import (
    CustomNorm,
    MinkowskiNorm,
    MthRootMetric,
    RiemannianNorm,
    counterexample_metric,
    euclidean,
    eval_norm,
    indicatrix_radius,
    load_metric,
    make_quartic_family,
    metric_from_dict,
)
from .tensor import ConvexityReport, FundamentalTensor, check_strong_convexity, fundamental_tensor

__version__ = "0.1.0"
