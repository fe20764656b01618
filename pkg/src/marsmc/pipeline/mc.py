"""Monte Carlo study harness: repeated simulation and estimation.

Two study modes share the same replication loop. Estimation mode assumes the
true orders and error family are known, estimates each simulated path, and
summarises per-parameter bias and root-mean-squared error of the posterior
means against the truth. Identification mode runs the full candidate grid on
each path and tallies how often each candidate wins by evidence and by BIC.
Replications run on independent derived seeds and may execute in parallel;
failed replications are recorded and skipped, never fatal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import smc
from ..errors import MarsmcError
from ..likelihood import PosteriorKernel
from ..model import param_names
from ..parallel import chunk_ranges, derive_seed, resolve_workers, run_chunked, substream
from ..priors import PriorConfig
from ..select import CandidateGrid, select_model
from ..simulate import DgpSpec, simulate_path


@dataclass(frozen=True)
class EstimationStudy:
    """Per-parameter accuracy of posterior means across replications."""

    dgp: DgpSpec
    names: tuple[str, ...]
    truth: np.ndarray
    estimates: np.ndarray      # (replications_ok, k) posterior means
    posterior_sds: np.ndarray  # (replications_ok, k)
    failures: tuple[str, ...]

    @property
    def replications_ok(self) -> int:
        return self.estimates.shape[0]

    @property
    def mean_estimate(self) -> np.ndarray:
        return self.estimates.mean(axis=0)

    @property
    def var_estimate(self) -> np.ndarray:
        return self.estimates.var(axis=0)

    @property
    def mean_posterior_sd(self) -> np.ndarray:
        return self.posterior_sds.mean(axis=0)

    @property
    def bias(self) -> np.ndarray:
        return (self.estimates - self.truth).mean(axis=0)

    @property
    def rmse(self) -> np.ndarray:
        return np.sqrt(((self.estimates - self.truth) ** 2).mean(axis=0))


@dataclass(frozen=True)
class IdentificationStudy:
    """Selection frequencies over the candidate grid across replications."""

    dgp: DgpSpec
    grid: CandidateGrid
    wins_mdd: dict
    wins_bic: dict
    replications_ok: int
    failures: tuple[str, ...]

    def frequency_mdd(self, key) -> float:
        return self.wins_mdd.get(key, 0) / self.replications_ok

    def frequency_bic(self, key) -> float:
        return self.wins_bic.get(key, 0) / self.replications_ok


def _spec_key(spec) -> tuple:
    return (spec.r, spec.s, spec.dist.value)


def _estimation_reps(dgp, smc_cfg, prior_cfg, lo, hi):
    out = []
    for b in range(lo, hi):
        try:
            data = simulate_path(dgp, substream(dgp.seed, b))
            cfg = smc_cfg.reseeded(derive_seed(smc_cfg.seed, b), workers=1)
            kernel = PosteriorKernel(spec=dgp.model, data=data, prior_cfg=prior_cfg)
            result = smc.run(kernel, cfg)
            out.append((b, result.posterior_mean, result.posterior_sd, None))
        except (MarsmcError, ValueError, np.linalg.LinAlgError) as exc:
            out.append((b, None, None, f"replication {b}: {type(exc).__name__}: {exc}"))
    return out


def _identification_reps(dgp, grid, smc_cfg, prior_cfg, lo, hi):
    out = []
    for b in range(lo, hi):
        try:
            data = simulate_path(dgp, substream(dgp.seed, b))
            cfg = smc_cfg.reseeded(derive_seed(smc_cfg.seed, b), workers=1)
            report = select_model(data, grid, cfg, prior_cfg, workers=1)
            out.append(
                (b, _spec_key(report.best_by_mdd), _spec_key(report.best_by_bic), None)
            )
        except (MarsmcError, ValueError, np.linalg.LinAlgError) as exc:
            out.append((b, None, None, f"replication {b}: {type(exc).__name__}: {exc}"))
    return out


def mc_study(
    dgp: DgpSpec,
    replications: int,
    smc_cfg: smc.SmcConfig,
    grid: CandidateGrid | None = None,
    prior_cfg: PriorConfig | None = None,
    workers: int = 1,
):
    """Run a replication study; grid = None means estimation mode.

    Returns an :class:`EstimationStudy` or :class:`IdentificationStudy`.
    Raises only if every single replication fails.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    prior_cfg = prior_cfg or PriorConfig()
    workers = resolve_workers(workers)
    ranges = chunk_ranges(replications, workers)

    if grid is None:
        args = [(dgp, smc_cfg, prior_cfg, lo, hi) for lo, hi in ranges]
        rows = [r for chunk in run_chunked(_estimation_reps, args, workers) for r in chunk]
        failures = tuple(r[3] for r in rows if r[3] is not None)
        ok = [r for r in rows if r[3] is None]
        if not ok:
            raise MarsmcError("every replication failed: " + "; ".join(failures))
        return EstimationStudy(
            dgp=dgp,
            names=tuple(param_names(dgp.model)),
            truth=dgp.params.theta.copy(),
            estimates=np.vstack([r[1] for r in ok]),
            posterior_sds=np.vstack([r[2] for r in ok]),
            failures=failures,
        )

    args = [(dgp, grid, smc_cfg, prior_cfg, lo, hi) for lo, hi in ranges]
    rows = [r for chunk in run_chunked(_identification_reps, args, workers) for r in chunk]
    failures = tuple(r[3] for r in rows if r[3] is not None)
    ok = [r for r in rows if r[3] is None]
    if not ok:
        raise MarsmcError("every replication failed: " + "; ".join(failures))
    wins_mdd: dict = {}
    wins_bic: dict = {}
    for _, key_mdd, key_bic, _err in ok:
        wins_mdd[key_mdd] = wins_mdd.get(key_mdd, 0) + 1
        wins_bic[key_bic] = wins_bic.get(key_bic, 0) + 1
    return IdentificationStudy(
        dgp=dgp,
        grid=grid,
        wins_mdd=wins_mdd,
        wins_bic=wins_bic,
        replications_ok=len(ok),
        failures=failures,
    )
