"""Sample log-likelihood and the tempered posterior kernel.

The likelihood is approximate in the usual sense for these models: the first
r and last s observations only enter through the filter, so the sum runs over
the T - r - s interior errors. Everything stays in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import densities
from .model import (
    Dist,
    ModelSpec,
    ParamVector,
    SeriesData,
    param_names,
    residuals,
    spd_cholesky,
    wrap_params,
)
from .priors import PriorConfig, log_prior, sample_prior


def log_likelihood(spec: ModelSpec, params: ParamVector, data: SeriesData) -> float:
    """Sum of error log-densities over the filtered sample.

    Returns -inf when the scale block is not positive definite; the filter
    itself is defined for any coefficients, stationary or not.
    """
    chol = spd_cholesky(params.sigma)
    if chol is None:
        return -np.inf
    u = residuals(spec, params, data)
    if spec.dist is Dist.CAUCHY:
        vals = densities.logpdf_mvt_chol(u, chol, 1.0)
    elif spec.dist is Dist.STUDENT_T:
        vals = densities.logpdf_mvt_chol(u, chol, params.nu)
    elif spec.n == 1:
        vals = densities.logpdf_uni_skewt(
            u[:, 0], float(np.sqrt(params.sigma[0, 0])), params.nu, float(params.alpha[0])
        )
    else:
        vals = densities.logpdf_mvskewt_chol(u, chol, params.nu, params.alpha)
    return float(np.sum(vals))


@dataclass(frozen=True)
class PosteriorKernel:
    """Bundles model, data and prior so samplers can score raw vectors.

    The three scoring methods plus ``sample_prior`` and ``dim`` are the whole
    contract a sampler needs; any object with the same surface (for example a
    toy conjugate problem in the test-suite) can stand in for this class.
    """

    spec: ModelSpec
    data: SeriesData
    prior_cfg: PriorConfig = field(default_factory=PriorConfig)

    def __post_init__(self):
        if self.data.n != self.spec.n:
            raise ValueError(
                f"data has {self.data.n} series but the model expects {self.spec.n}"
            )
        if self.data.T <= self.spec.r + self.spec.s + 1:
            raise ValueError(
                f"sample of length {self.data.T} is too short for orders "
                f"(r={self.spec.r}, s={self.spec.s})"
            )

    @property
    def dim(self) -> int:
        return self.spec.k

    @property
    def param_names(self) -> list[str]:
        return param_names(self.spec)

    def _wrap(self, theta) -> ParamVector:
        if isinstance(theta, ParamVector):
            return theta
        return wrap_params(self.spec, theta)

    def sample_prior(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return sample_prior(self.spec, self.prior_cfg, count, rng)

    def log_prior(self, theta) -> float:
        return log_prior(self.spec, self._wrap(theta), self.prior_cfg)

    def log_likelihood(self, theta) -> float:
        return log_likelihood(self.spec, self._wrap(theta), self.data)

    def log_tempered(self, theta, rho: float) -> float:
        """rho-tempered posterior kernel: rho * loglik + logprior."""
        return log_tempered_kernel(self, theta, rho)


def log_tempered_kernel(kernel: PosteriorKernel, theta, rho: float) -> float:
    """Evaluate the bridge kernel at tempering exponent ``rho`` in [0, 1].

    An off-support point yields -inf regardless of rho; at rho = 0 the
    likelihood is never evaluated, so the prior-only stage is exact.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"tempering exponent must lie in [0, 1], got {rho}")
    lp = kernel.log_prior(theta)
    if not np.isfinite(lp):
        return -np.inf
    if rho == 0.0:
        return lp
    return rho * kernel.log_likelihood(theta) + lp
