"""Likelihood-tempered sequential Monte Carlo sampler.

The sampler walks a particle cloud from the prior (tempering exponent 0) to
the full posterior (exponent 1) through a fixed power schedule. Each stage
applies three steps: correction (importance reweighting by the likelihood
increment), selection (multinomial resampling when the effective sample size
drops below a threshold), and mutation (random-walk Metropolis steps whose
proposal covariance is estimated from the current cloud). The log marginal
data density accumulates as the sum of the per-stage log mean incremental
weights.

All randomness comes from counter-based streams keyed by (seed, stage,
particle, step), so a run is bit-reproducible regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .errors import DegeneracyError
from .parallel import chunk_ranges, resolve_workers, run_chunked, substream

# Stream tag for per-stage resampling draws; particle indexes stay below it.
_RESAMPLE_TAG = 2**31


@dataclass(frozen=True)
class SmcConfig:
    """Sampler settings.

    Attributes:
        particles: cloud size P.
        stages: number of bridge distributions M (schedule endpoints included).
        lam: tempering power; 1 is linear, larger delays likelihood intake.
        mutation_steps: Metropolis steps per particle per stage.
        ess_fraction: resample when ESS < ess_fraction * P.
        target_accept: mutation acceptance rate the scale adaptation aims for.
        initial_scale: proposal scale for the first mutation stage.
        seed: master seed; fixes the entire run.
        workers: process count for particle-parallel steps (0 = auto).
    """

    particles: int
    stages: int
    lam: float = 2.0
    mutation_steps: int = 1
    ess_fraction: float = 0.5
    target_accept: float = 0.25
    initial_scale: float = 0.3
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.particles < 2:
            raise ValueError("need at least 2 particles")
        if self.stages < 2:
            raise ValueError("need at least 2 stages")
        if self.lam <= 0:
            raise ValueError("tempering power must be positive")
        if self.mutation_steps < 1:
            raise ValueError("need at least 1 mutation step")
        if not 0.0 < self.ess_fraction <= 1.0:
            raise ValueError("ess_fraction must lie in (0, 1]")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")
        if self.initial_scale < 0:
            raise ValueError("initial_scale must be non-negative")

    def reseeded(self, seed: int, workers: int | None = None) -> "SmcConfig":
        """Copy of this config with a different seed (and optionally workers)."""
        return replace(self, seed=seed, workers=self.workers if workers is None else workers)


@dataclass(frozen=True)
class ParticleCloud:
    """Cloud state between stages.

    Weights are normalised to mean one. Cached log-likelihood and log-prior
    values always match ``params`` row for row.
    """

    params: np.ndarray
    weights: np.ndarray
    logliks: np.ndarray
    logpriors: np.ndarray
    stage: int
    rho: float

    @property
    def size(self) -> int:
        return self.params.shape[0]


@dataclass(frozen=True)
class StageDiagnostics:
    stage: int
    rho: float
    ess: float
    resampled: bool
    accept_rate: float | None
    scale: float
    log_increment: float


@dataclass(frozen=True)
class SmcRunResult:
    """Final cloud plus evidence estimate and posterior summaries."""

    cloud: ParticleCloud
    log_mdd: float
    diagnostics: list[StageDiagnostics]
    posterior_mean: np.ndarray
    posterior_sd: np.ndarray
    map_params: np.ndarray
    map_loglik: float
    map_log_posterior: float


def tempering_schedule(m: int, stages: int, lam: float) -> float:
    """Exponent of bridge m in 1..stages: ((m-1)/(stages-1))**lam."""
    if not 1 <= m <= stages:
        raise ValueError(f"stage index {m} outside 1..{stages}")
    return ((m - 1) / (stages - 1)) ** lam


def ess(weights: np.ndarray) -> float:
    """Effective sample size of mean-one weights: P / mean(w^2), in (0, P]."""
    w = np.asarray(weights, dtype=float)
    return float(len(w) / np.mean(w * w))


def correction(cloud: ParticleCloud, rho: float) -> tuple[ParticleCloud, float]:
    """Reweight the cloud from its current exponent to ``rho``.

    Returns the reweighted cloud and the stage's log mean incremental weight
    log((1/P) sum_i w_i W_i), computed with a max-shifted log-sum-exp. New
    weights again have mean one.
    """
    d_rho = rho - cloud.rho
    with np.errstate(divide="ignore"):
        a = d_rho * cloud.logliks + np.log(cloud.weights)
    shift = np.max(a)
    if not np.isfinite(shift):
        raise DegeneracyError(
            f"all incremental weights vanished at stage {cloud.stage + 1}"
        )
    log_increment = float(shift + np.log(np.mean(np.exp(a - shift))))
    weights = np.exp(a - log_increment)
    return replace(cloud, weights=weights, stage=cloud.stage + 1, rho=rho), log_increment


def selection(
    cloud: ParticleCloud, ess_fraction: float, rng: np.random.Generator
) -> tuple[ParticleCloud, bool]:
    """Multinomial resampling, triggered only below the ESS threshold."""
    p = cloud.size
    if ess(cloud.weights) >= ess_fraction * p:
        return cloud, False
    probs = cloud.weights / np.sum(cloud.weights)
    idx = rng.choice(p, size=p, replace=True, p=probs)
    return (
        replace(
            cloud,
            params=cloud.params[idx].copy(),
            logliks=cloud.logliks[idx].copy(),
            logpriors=cloud.logpriors[idx].copy(),
            weights=np.ones(p),
        ),
        True,
    )


def proposal_chol(params: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Factor of the weighted particle covariance used for proposals.

    Falls back to the square root of per-coordinate weighted variances
    (floored at 1e-12) when the covariance is singular.
    """
    p = params.shape[0]
    mean = weights @ params / p
    dev = params - mean
    cov = (dev * weights[:, None]).T @ dev / p
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        var = weights @ (dev * dev) / p
        return np.diag(np.sqrt(np.maximum(var, 1e-12)))


def _mutate_chunk(kernel, seed, stage, rho, scale, chol, steps, lo, hi,
                  params, logpriors, logliks):
    """Metropolis-mutate particles lo..hi-1; streams keyed by absolute index."""
    params = params.copy()
    logpriors = logpriors.copy()
    logliks = logliks.copy()
    k = params.shape[1]
    accepted = 0
    for row, i in enumerate(range(lo, hi)):
        theta = params[row]
        lp, ll = logpriors[row], logliks[row]
        current = rho * ll + lp
        for step in range(1, steps + 1):
            rng = substream(seed, stage, i, step)
            z = rng.standard_normal(k)
            log_u = np.log(rng.random())
            prop = theta + scale * (chol @ z)
            lp_new = kernel.log_prior(prop)
            if not np.isfinite(lp_new):
                continue
            ll_new = kernel.log_likelihood(prop)
            candidate = rho * ll_new + lp_new
            if log_u < candidate - current:
                theta, lp, ll, current = prop, lp_new, ll_new, candidate
                accepted += 1
        params[row] = theta
        logpriors[row] = lp
        logliks[row] = ll
    return params, logpriors, logliks, accepted


def mutation(
    cloud: ParticleCloud,
    kernel,
    scale: float,
    chol: np.ndarray,
    seed: int,
    steps: int = 1,
    workers: int = 1,
) -> tuple[ParticleCloud, float]:
    """Advance every particle by ``steps`` random-walk Metropolis steps.

    The proposal is theta + scale * chol @ z with standard-normal z; points
    outside the support reject automatically through the -inf prior. Returns
    the mutated cloud and the overall acceptance rate.
    """
    p = cloud.size
    args = [
        (kernel, seed, cloud.stage, cloud.rho, scale, chol, steps, lo, hi,
         cloud.params[lo:hi], cloud.logpriors[lo:hi], cloud.logliks[lo:hi])
        for lo, hi in chunk_ranges(p, workers)
    ]
    results = run_chunked(_mutate_chunk, args, workers)
    params = np.vstack([r[0] for r in results])
    logpriors = np.concatenate([r[1] for r in results])
    logliks = np.concatenate([r[2] for r in results])
    accepted = sum(r[3] for r in results)
    new_cloud = replace(cloud, params=params, logpriors=logpriors, logliks=logliks)
    return new_cloud, accepted / (p * steps)


def adapt_scale(scale: float, accept_rate: float, target: float) -> float:
    """Smooth multiplicative update keeping acceptance near the target."""
    return scale * (0.95 + 0.10 * expit(16.0 * (accept_rate - target)))


def _init_chunk(kernel, seed, lo, hi):
    """Draw and score prior particles lo..hi-1 on per-particle streams."""
    k = kernel.dim
    params = np.empty((hi - lo, k))
    logpriors = np.empty(hi - lo)
    logliks = np.empty(hi - lo)
    for row, i in enumerate(range(lo, hi)):
        rng = substream(seed, 0, i, 0)
        theta = np.asarray(kernel.sample_prior(1, rng))[0]
        params[row] = theta
        logpriors[row] = kernel.log_prior(theta)
        logliks[row] = kernel.log_likelihood(theta)
    return params, logpriors, logliks


def _initialize(kernel, seed: int, particles: int, workers: int):
    args = [(kernel, seed, lo, hi) for lo, hi in chunk_ranges(particles, workers)]
    results = run_chunked(_init_chunk, args, workers)
    params = np.vstack([r[0] for r in results])
    logpriors = np.concatenate([r[1] for r in results])
    logliks = np.concatenate([r[2] for r in results])
    return params, logpriors, logliks


def run(kernel, cfg: SmcConfig, progress=None, checkpoint=None) -> SmcRunResult:
    """Execute the full sampler and return evidence and posterior summaries.

    ``kernel`` needs ``dim``, ``sample_prior(count, rng)``,
    ``log_prior(theta)`` and ``log_likelihood(theta)``. ``progress``, if
    given, receives each stage's StageDiagnostics as it completes;
    ``checkpoint`` receives (stage, cloud) after each mutation.
    """
    workers = resolve_workers(cfg.workers)
    p, stages = cfg.particles, cfg.stages

    params, logpriors, logliks = _initialize(kernel, cfg.seed, p, workers)
    cloud = ParticleCloud(
        params=params,
        weights=np.ones(p),
        logliks=logliks,
        logpriors=logpriors,
        stage=1,
        rho=0.0,
    )
    scale = cfg.initial_scale
    diagnostics = [
        StageDiagnostics(
            stage=1, rho=0.0, ess=float(p), resampled=False,
            accept_rate=None, scale=scale, log_increment=0.0,
        )
    ]
    if progress is not None:
        progress(diagnostics[0])
    log_mdd = 0.0

    for m in range(2, stages + 1):
        rho = tempering_schedule(m, stages, cfg.lam)
        cloud, log_increment = correction(cloud, rho)
        log_mdd += log_increment
        stage_ess = ess(cloud.weights)
        chol = proposal_chol(cloud.params, cloud.weights)
        cloud, resampled = selection(
            cloud, cfg.ess_fraction, substream(cfg.seed, m, _RESAMPLE_TAG, 0)
        )
        cloud, accept_rate = mutation(
            cloud, kernel, scale, chol, cfg.seed, cfg.mutation_steps, workers
        )
        diagnostics.append(
            StageDiagnostics(
                stage=m, rho=rho, ess=stage_ess, resampled=resampled,
                accept_rate=accept_rate, scale=scale, log_increment=log_increment,
            )
        )
        if progress is not None:
            progress(diagnostics[-1])
        if checkpoint is not None:
            checkpoint(m, cloud)
        scale = adapt_scale(scale, accept_rate, cfg.target_accept)

    mean = cloud.weights @ cloud.params / p
    dev = cloud.params - mean
    sd = np.sqrt(cloud.weights @ (dev * dev) / p)
    log_post = cloud.logliks + cloud.logpriors
    map_idx = int(np.argmax(log_post))
    return SmcRunResult(
        cloud=cloud,
        log_mdd=log_mdd,
        diagnostics=diagnostics,
        posterior_mean=mean,
        posterior_sd=sd,
        map_params=cloud.params[map_idx].copy(),
        map_loglik=float(cloud.logliks[map_idx]),
        map_log_posterior=float(log_post[map_idx]),
    )
