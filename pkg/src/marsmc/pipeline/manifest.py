"""Run manifests: a deterministic, machine-readable record of each run.

A manifest embeds the fully resolved configuration, the package version, the
seed, per-stage sampler diagnostics and the result summary, so a run can be
reproduced bit-exactly from its manifest alone. Wall-clock timing is
deliberately kept out of the manifest (it goes to the console and, for model
selection, the report table) so that identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .. import __version__
from ..smc import SmcRunResult

# Standing modelling choices surfaced in every relevant manifest.
DEV_UNIVARIATE_SCALE = (
    "univariate scale prior: improper 1/sigma replaced by proper diffuse "
    "substitute log(sigma) ~ N(0, 10)"
)
DEV_MDD_NORMALIZATION = (
    "evidence accumulates per-stage normalised mean incremental weights "
    "(1/P) * sum_i w_i * W_i"
)
DEV_BIC_POINT = (
    "BIC evaluated at the highest-posterior particle with penalty sample "
    "size T - r - s"
)
DEV_NO_TIMING = "wall time reported on the console only, manifests stay deterministic"


def stage_rows(result: SmcRunResult) -> list[dict]:
    return [
        {
            "stage": d.stage,
            "rho": d.rho,
            "ess": d.ess,
            "resampled": d.resampled,
            "accept_rate": d.accept_rate,
            "scale": d.scale,
            "log_increment": d.log_increment,
        }
        for d in result.diagnostics
    ]


def posterior_rows(result: SmcRunResult, names) -> list[dict]:
    return [
        {
            "name": name,
            "mean": float(result.posterior_mean[j]),
            "sd": float(result.posterior_sd[j]),
            "map": float(result.map_params[j]),
        }
        for j, name in enumerate(names)
    ]


def build_manifest(command: str, config: dict, deviations: list[str], **payload) -> dict:
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "deviations": sorted(deviations),
    }
    manifest.update(payload)
    return manifest


def write_manifest(path, manifest: dict) -> None:
    text = json.dumps(manifest, indent=2, sort_keys=True, allow_nan=True)
    Path(path).write_text(text + "\n")
