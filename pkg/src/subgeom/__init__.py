"""Certified convergence-rate bounds for subgeometrically ergodic Markov chains.

The package turns a drift/minorisation certificate into an explicit,
non-asymptotic bound on the distance to stationarity, and ships the
machinery to check such a bound against an exact reference on truncated
chains and against Monte Carlo coupling runs.

Layout:

- :mod:`subgeom.rates`     subgeometric rate sequences and the phi calculus
- :mod:`subgeom.bounds`    the bound engine (constants, curves, norms)
- :mod:`subgeom.monotone`  discrete kernels, minorisation, ordered coupling
- :mod:`subgeom.drift`     univariate -> bivariate certificate lifting
- :mod:`subgeom.mg1`       embedded M/G/1 queue application
- :mod:`subgeom.isampler`  independence-sampler application
- :mod:`subgeom.verify`    exact oracle and coupling simulator
- :mod:`subgeom.svg`       dependency-free curve rendering
- :mod:`subgeom.cli`       command-line entry points
"""

from . import isampler, mg1, verify
from .bounds import (
    BoundConstants,
    BoundCurve,
    MomentBounds,
    YoungPair,
    bound_constants,
    bound_vs_stationary,
    compute_m_u,
    f_norm_bound,
    interpolated_bound,
    tv_bound,
    tv_curve_from_scalars,
)
from .drift import (
    BivariateDriftCert,
    SmallSetRegion,
    UnivariateDriftCert,
    admissible_lambda_interval,
    bivariate_from_univariate,
    check_drift_pointwise,
    moments_from_monotone_drift,
)
from .errors import (
    CertificateError,
    ConfigurationError,
    KernelError,
    NonTerminationError,
    SubgeomError,
)
from .monotone import (
    DiscreteKernel,
    MinorisationCert,
    check_monotone,
    find_minorisation,
    ordered_coupling_step,
    residual_kernel,
)
from .rates import PhiGenerator, RateSequence, rate_from_phi
from .svg import render_svg
from .verify import (
    CouplingStats,
    DominanceReport,
    ExactCurve,
    dominance_report,
    exact_tv_curve,
    simulate_coupling,
    stationary,
)

__version__ = "0.1.0"

__all__ = [
    "BivariateDriftCert",
    "BoundConstants",
    "BoundCurve",
    "CertificateError",
    "ConfigurationError",
    "CouplingStats",
    "DiscreteKernel",
    "DominanceReport",
    "ExactCurve",
    "KernelError",
    "MinorisationCert",
    "MomentBounds",
    "NonTerminationError",
    "PhiGenerator",
    "RateSequence",
    "SmallSetRegion",
    "SubgeomError",
    "UnivariateDriftCert",
    "YoungPair",
    "admissible_lambda_interval",
    "bivariate_from_univariate",
    "bound_constants",
    "bound_vs_stationary",
    "check_drift_pointwise",
    "check_monotone",
    "compute_m_u",
    "dominance_report",
    "exact_tv_curve",
    "f_norm_bound",
    "find_minorisation",
    "interpolated_bound",
    "isampler",
    "mg1",
    "moments_from_monotone_drift",
    "ordered_coupling_step",
    "rate_from_phi",
    "render_svg",
    "residual_kernel",
    "simulate_coupling",
    "stationary",
    "tv_bound",
    "tv_curve_from_scalars",
    "verify",
    "__version__",
]
