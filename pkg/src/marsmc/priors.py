"""Prior density and prior sampling over the flat parameter vector.

Coefficient blocks get zero-mean normals whose variance shrinks with the
lag/lead order (2/i for the i-th causal matrix, 2/q for the q-th noncausal
one), truncated jointly to the stationary region. The scale matrix gets an
inverse Wishart for n >= 2; in one dimension an improper 1/sigma prior would
be the textbook choice but cannot seed a particle cloud, so a proper diffuse
substitute (log sigma normal) is used instead and flagged in run manifests.
Degrees of freedom get an exponential truncated to nu > 2, skewness a normal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_solve
from scipy.special import multigammaln

from .errors import SamplingError
from .model import ModelSpec, ParamVector, coeffs_stationary, is_stationary, spd_cholesky

_LOG_2PI = np.log(2.0 * np.pi)

# Attempts per particle before the stationarity rejection loop gives up.
REJECTION_BUDGET = 1_000_000


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters of the parameter prior.

    Attributes:
        psi_scale: numerator of the causal-block variance (variance 2/i by default).
        phi_scale: numerator of the noncausal-block variance.
        wishart_scale: c in the inverse-Wishart scale matrix c * I_n.
        wishart_df: inverse-Wishart degrees of freedom (> n - 1).
        nu_mean: mean of the exponential prior on the degrees of freedom.
        nu_max: stability cap on the degrees of freedom; the support is (2, nu_max].
        skew_var: variance of the normal prior on each skewness entry.
        uni_logscale_var: variance of the normal on log sigma used in place of
            the improper univariate scale prior.
    """

    psi_scale: float = 2.0
    phi_scale: float = 2.0
    wishart_scale: float = 5.0
    wishart_df: float = 3.0
    nu_mean: float = 5.0
    nu_max: float = 100.0
    skew_var: float = 3.0
    uni_logscale_var: float = 10.0

    def __post_init__(self):
        for name in ("psi_scale", "phi_scale", "wishart_scale", "nu_mean", "skew_var",
                     "uni_logscale_var"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.nu_max <= 2:
            raise ValueError("nu_max must exceed 2")

    def coef_variances(self, spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
        """Per-block variances (gamma_1..gamma_r, delta_1..delta_s)."""
        gammas = self.psi_scale / np.arange(1, spec.r + 1)
        deltas = self.phi_scale / np.arange(1, spec.s + 1)
        return gammas, deltas


def _logpdf_normal_block(x: np.ndarray, var: float) -> float:
    return float(-0.5 * x.size * (_LOG_2PI + np.log(var)) - 0.5 * np.sum(x * x) / var)


@lru_cache(maxsize=None)
def _iw_lognorm(scale_c: float, df: float, n: int) -> float:
    return float(
        0.5 * df * n * np.log(scale_c)
        - 0.5 * df * n * np.log(2.0)
        - multigammaln(df / 2.0, n)
    )


def _logpdf_invwishart(sigma: np.ndarray, chol: np.ndarray, scale_c: float, df: float) -> float:
    """Inverse-Wishart log-density with scale matrix scale_c * I."""
    n = sigma.shape[0]
    logdet_sigma = 2.0 * np.sum(np.log(np.diag(chol)))
    trace_term = scale_c * np.trace(cho_solve((chol, True), np.eye(n)))
    return float(
        _iw_lognorm(scale_c, df, n)
        - 0.5 * (df + n + 1.0) * logdet_sigma
        - 0.5 * trace_term
    )


def _logpdf_uni_scale(sigma_sq: float, var: float) -> float:
    # Density of sigma^2 induced by log sigma ~ N(0, var).
    log_sigma = 0.5 * np.log(sigma_sq)
    return float(
        -0.5 * (_LOG_2PI + np.log(var)) - 0.5 * log_sigma**2 / var - np.log(2.0 * sigma_sq)
    )


def _logpdf_nu(nu: float, cfg: PriorConfig) -> float:
    # Exponential with mean nu_mean, renormalised on the truncated support.
    if not (2.0 < nu <= cfg.nu_max):
        return -np.inf
    return float(-nu / cfg.nu_mean - np.log(cfg.nu_mean) + 2.0 / cfg.nu_mean)


def log_prior(spec: ModelSpec, params: ParamVector, cfg: PriorConfig) -> float:
    """Log prior density of ``params``; -inf anywhere off the support.

    Off-support means: nonstationary coefficients, a scale block that is not
    positive definite, nu outside (2, nu_max], or a non-positive skewness in
    the univariate two-piece case.
    """
    if not is_stationary(spec, params):
        return -np.inf
    sigma = params.sigma
    chol = spd_cholesky(sigma)
    if chol is None:
        return -np.inf

    total = 0.0
    gammas, deltas = cfg.coef_variances(spec)
    for mat, var in zip(params.psi_mats, gammas):
        total += _logpdf_normal_block(mat, var)
    for mat, var in zip(params.phi_mats, deltas):
        total += _logpdf_normal_block(mat, var)

    if spec.n == 1:
        total += _logpdf_uni_scale(float(sigma[0, 0]), cfg.uni_logscale_var)
    else:
        total += _logpdf_invwishart(sigma, chol, cfg.wishart_scale, cfg.wishart_df)

    if spec.has_nu:
        lp_nu = _logpdf_nu(params.nu, cfg)
        if not np.isfinite(lp_nu):
            return -np.inf
        total += lp_nu

    if spec.has_alpha:
        alpha = params.alpha
        if spec.n == 1 and alpha[0] <= 0:
            return -np.inf
        total += _logpdf_normal_block(alpha, cfg.skew_var)

    return total


def draw_stationary_coeffs(
    spec: ModelSpec, cfg: PriorConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int]:
    """Rejection-sample coefficient blocks until jointly stationary.

    Returns (psi, phi, attempts) where psi is (r, n, n), phi is (s, n, n)
    and attempts counts every draw including the accepted one.
    """
    n = spec.n
    gammas, deltas = cfg.coef_variances(spec)
    g_sd = np.sqrt(gammas)[:, None, None]
    d_sd = np.sqrt(deltas)[:, None, None]
    for attempt in range(1, REJECTION_BUDGET + 1):
        psi = rng.standard_normal((spec.r, n, n)) * g_sd
        phi = rng.standard_normal((spec.s, n, n)) * d_sd
        if coeffs_stationary(psi, phi):
            return psi, phi, attempt
    raise SamplingError(
        f"no stationary coefficient draw within {REJECTION_BUDGET} attempts; "
        "the prior configuration is infeasible"
    )


def _sample_invwishart(
    n: int, scale_c: float, df: float, rng: np.random.Generator
) -> np.ndarray:
    """Bartlett-decomposition draw from the inverse Wishart with scale c*I."""
    a = np.zeros((n, n))
    for i in range(n):
        a[i, i] = np.sqrt(rng.chisquare(df - i))
        for j in range(i):
            a[i, j] = rng.standard_normal()
    # Wishart(df, I/c) = (A A') / c, so its inverse has scale c * I.
    w = (a @ a.T) / scale_c
    return np.linalg.inv(w)


def _sample_nu(cfg: PriorConfig, rng: np.random.Generator) -> float:
    for _ in range(REJECTION_BUDGET):
        nu = rng.exponential(cfg.nu_mean)
        if 2.0 < nu <= cfg.nu_max:
            return float(nu)
    raise SamplingError("degrees-of-freedom rejection loop failed to terminate")


def _sample_alpha(spec: ModelSpec, cfg: PriorConfig, rng: np.random.Generator) -> np.ndarray:
    sd = np.sqrt(cfg.skew_var)
    if spec.n > 1:
        return rng.standard_normal(spec.n) * sd
    for _ in range(REJECTION_BUDGET):
        a = rng.standard_normal() * sd
        if a > 0:
            return np.array([a])
    raise SamplingError("skewness rejection loop failed to terminate")


def sample_prior(
    spec: ModelSpec, cfg: PriorConfig, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``count`` parameter vectors from the truncated prior.

    Returns a (count, k) array. Every row is stationary, has a positive
    definite scale block, and scores a finite :func:`log_prior`.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    out = np.empty((count, spec.k))
    rows, cols = np.tril_indices(spec.n)
    for b in range(count):
        psi, phi, _ = draw_stationary_coeffs(spec, cfg, rng)
        if spec.n == 1:
            log_sigma = rng.standard_normal() * np.sqrt(cfg.uni_logscale_var)
            sigma = np.array([[np.exp(2.0 * log_sigma)]])
        else:
            sigma = _sample_invwishart(spec.n, cfg.wishart_scale, cfg.wishart_df, rng)
        pieces = [psi.ravel(), phi.ravel(), sigma[rows, cols]]
        if spec.has_nu:
            pieces.append(np.array([_sample_nu(cfg, rng)]))
        if spec.has_alpha:
            pieces.append(_sample_alpha(spec, cfg, rng))
        out[b] = np.concatenate(pieces)
    return out
