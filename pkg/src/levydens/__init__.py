"""Nonparametric estimation of the Levy density of a discretely observed
finite-activity Levy process from the empirical characteristic function."""

from .ecf import EcfEvaluation, FrequencyGrid, ecf, ecf_grid, sup_deviation
from .estimator import (
    EstimatorConfig,
    RhoEstimate,
    SmoothingKernelV,
    bandwidth,
    build_kernel_v,
    estimate,
    estimate_rho,
    estimate_sigma2,
    kappa_n,
    truncation_level,
    validate_class,
)
from .harness import (
    MseReport,
    Scenario,
    load_scenario,
    run_mse_experiment,
    run_scaling_experiment,
    write_report,
    write_scenario,
)
from .levy_model import (
    Gaussian,
    Laplace,
    LevyTriplet,
    Uniform,
    cf,
    cf_derivatives,
    cf_exponent,
    levy_density,
    make_jumps,
)
from .oracle import fd_check, invert_from_cf
from .simulate import IncrementSample, derive_seed, load_increments, sample_increments, save_increments

__version__ = "0.1.0"
