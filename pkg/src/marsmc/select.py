"""Model identification over a grid of candidate orders and error families.

Each candidate is estimated independently by the tempered sampler; candidates
are then ranked by log marginal data density (higher is better) and by BIC
(lower is better). The BIC is evaluated at the highest-posterior particle of
the final cloud rather than the posterior mean: the posterior over these
models can be multimodal, and the mean of a truncated region may not even be
stationary. The penalty uses the number of likelihood terms T - r - s, since
candidates of different orders see different effective samples.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import smc
from .errors import MarsmcError
from .likelihood import PosteriorKernel
from .model import Dist, ModelSpec, SeriesData
from .parallel import chunk_ranges, derive_seed, resolve_workers, run_chunked
from .priors import PriorConfig

DEFAULT_ORDERS = ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2))


@dataclass(frozen=True)
class CandidateGrid:
    """Candidate (r, s) orders crossed with candidate error families."""

    orders: tuple[tuple[int, int], ...] = DEFAULT_ORDERS
    dists: tuple[Dist, ...] = (Dist.CAUCHY, Dist.STUDENT_T, Dist.SKEWED_T)

    def __post_init__(self):
        orders = tuple((int(r), int(s)) for r, s in self.orders)
        dists = tuple(Dist(d) for d in self.dists)
        if not orders or not dists:
            raise ValueError("candidate grid must not be empty")
        for r, s in orders:
            if r < 0 or s < 0 or r + s < 1:
                raise ValueError(f"invalid candidate orders (r={r}, s={s})")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "dists", dists)

    def specs(self, n: int) -> list[ModelSpec]:
        return [
            ModelSpec(n=n, r=r, s=s, dist=d)
            for d in self.dists
            for (r, s) in self.orders
        ]


@dataclass(frozen=True)
class CandidateResult:
    spec: ModelSpec
    log_mdd: float
    bic: float
    k: int
    runtime: float
    error: str | None = None
    result: smc.SmcRunResult | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SelectionReport:
    candidates: tuple[CandidateResult, ...]
    best_by_mdd: ModelSpec
    best_by_bic: ModelSpec

    def ranked_by_mdd(self) -> list[CandidateResult]:
        ok = [c for c in self.candidates if c.error is None]
        return sorted(ok, key=lambda c: -c.log_mdd)

    def ranked_by_bic(self) -> list[CandidateResult]:
        ok = [c for c in self.candidates if c.error is None]
        return sorted(ok, key=lambda c: c.bic)


def bic(kernel: PosteriorKernel, result: smc.SmcRunResult) -> float:
    """-2 log-likelihood at the MAP particle plus k * log(T - r - s)."""
    spec = kernel.spec
    n_terms = kernel.data.T - spec.r - spec.s
    return float(-2.0 * result.map_loglik + spec.k * np.log(n_terms))


def _run_candidates(data, specs, smc_cfg, prior_cfg, lo, hi, keep_results):
    out = []
    for idx in range(lo, hi):
        spec = specs[idx]
        cfg = smc_cfg.reseeded(derive_seed(smc_cfg.seed, idx), workers=1)
        start = time.perf_counter()
        try:
            kernel = PosteriorKernel(spec=spec, data=data, prior_cfg=prior_cfg)
            result = smc.run(kernel, cfg)
            out.append(
                CandidateResult(
                    spec=spec,
                    log_mdd=result.log_mdd,
                    bic=bic(kernel, result),
                    k=spec.k,
                    runtime=time.perf_counter() - start,
                    result=result if keep_results else None,
                )
            )
        except (MarsmcError, ValueError, np.linalg.LinAlgError) as exc:
            out.append(
                CandidateResult(
                    spec=spec,
                    log_mdd=np.nan,
                    bic=np.nan,
                    k=spec.k,
                    runtime=time.perf_counter() - start,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return out


def select_model(
    data: SeriesData,
    grid: CandidateGrid,
    smc_cfg: smc.SmcConfig,
    prior_cfg: PriorConfig | None = None,
    workers: int = 1,
    keep_results: bool = False,
) -> SelectionReport:
    """Estimate every candidate and rank by evidence and BIC.

    Candidate seeds derive from the master seed and the candidate's position
    in the grid, so the report is reproducible and insensitive to worker
    count. Failed candidates stay in the report with an error marker but are
    excluded from the rankings.
    """
    prior_cfg = prior_cfg or PriorConfig()
    specs = grid.specs(data.n)
    workers = resolve_workers(workers)
    args = [
        (data, specs, smc_cfg, prior_cfg, lo, hi, keep_results)
        for lo, hi in chunk_ranges(len(specs), workers)
    ]
    chunks = run_chunked(_run_candidates, args, workers)
    candidates = tuple(c for chunk in chunks for c in chunk)

    ok = [c for c in candidates if c.error is None]
    if not ok:
        raise MarsmcError("every candidate in the grid failed to estimate")
    best_mdd = max(ok, key=lambda c: c.log_mdd).spec
    best_bic = min(ok, key=lambda c: c.bic).spec
    return SelectionReport(
        candidates=candidates, best_by_mdd=best_mdd, best_by_bic=best_bic
    )
