"""Density estimation under multiplicative measurement error.

Observations follow Y = X * eta with known noise density g on (0, inf); the
package estimates the density of X at a point (including the origin) through
Mellin-transform kernel estimators, and ships a Monte-Carlo risk harness plus
a command line front end.
"""

from .errors import (
    BandwidthTooLarge,
    DegenerateDesign,
    DivergentIntegrand,
    DomainError,
    EmptyFile,
    EmptySample,
    IllConditioned,
    MelldecError,
    NonConvergence,
    NotIdentifiable,
    ParseError,
    PoleError,
    StripViolation,
    SupportWarning,
)
from .mellin import (
    ComplexStrip,
    ErrorModel,
    QuadSpec,
    Smooth,
    SuperSmooth,
    ZeroBehavior,
    beta,
    complex_gamma,
    custom,
    fit_decay_exponent,
    gamma_errors,
    half_normal,
    identifiability_check,
    log_product_uniform,
    mellin_analytic,
    mellin_numeric,
    parseval_check,
    pareto,
    point_mass,
    power,
    uniform,
)
from .kernels import (
    KernelK,
    build_exp_zero_kernel,
    build_flat_kernel,
    build_gaussian_jackknife_kernel,
    build_supersmooth_kernel,
    build_zero_kernel,
    kernel_moments,
)
from .lkernel import (
    LKernel,
    lkernel_closed_beta,
    lkernel_closed_beta_zero,
    lkernel_numeric,
    lkernel_two_sided,
    lkernel_zero_numeric,
)
from .estimators import (
    AtPoint,
    AtZero,
    EstimatorConfig,
    HolderClassSpec,
    bandwidth_moment,
    bandwidth_smooth,
    bandwidth_supersmooth,
    bandwidth_zero,
    estimate_at_point,
    estimate_at_zero,
    expected_estimate,
    s_star_moment,
)
from .simulate import (
    RiskReport,
    RiskRow,
    SimulationSpec,
    TargetDensity,
    custom_target,
    default_h_grid,
    exponential_target,
    generate_sample,
    log_cauchy_target,
    monte_carlo_risk,
    oracle_bandwidth,
    rate_regression,
    render_boxplot_svg,
)

__version__ = "0.1.0"
