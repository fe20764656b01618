"""Bayesian mixed causal-noncausal autoregressions by tempered sequential Monte Carlo.

The package estimates univariate and vector MAR(r, s) models with Cauchy,
Student-t or skewed-t errors, producing posterior summaries and the log
marginal data density as a by-product, and selects model orders and the
error family over a candidate grid by evidence and BIC.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DataFormatError,
    DegeneracyError,
    MarsmcError,
    SamplingError,
)
from .likelihood import PosteriorKernel, log_tempered_kernel
from .model import (
    Dist,
    ModelSpec,
    ParamVector,
    SeriesData,
    encode_params,
    is_stationary,
    param_names,
    residuals,
    wrap_params,
)
from .priors import PriorConfig, log_prior, sample_prior
from .select import CandidateGrid, SelectionReport, bic, select_model
from .simulate import DgpSpec, benchmark_dgp, simulate_path
from .smc import ParticleCloud, SmcConfig, SmcRunResult, run, tempering_schedule

__all__ = [
    "__version__",
    "CandidateGrid",
    "ConfigError",
    "DataFormatError",
    "DegeneracyError",
    "DgpSpec",
    "Dist",
    "MarsmcError",
    "ModelSpec",
    "ParamVector",
    "ParticleCloud",
    "PosteriorKernel",
    "PriorConfig",
    "SamplingError",
    "SelectionReport",
    "SeriesData",
    "SmcConfig",
    "SmcRunResult",
    "benchmark_dgp",
    "bic",
    "encode_params",
    "is_stationary",
    "log_prior",
    "log_tempered_kernel",
    "param_names",
    "residuals",
    "run",
    "sample_prior",
    "select_model",
    "simulate_path",
    "tempering_schedule",
    "wrap_params",
]
