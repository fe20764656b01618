"""Batch command-line interface.

Subcommands: ``simulate``, ``estimate``, ``select``, ``mc``, ``detrend``.
Each reads a JSON config (plus optional ``--set`` overrides), runs, and
writes its outputs and a manifest into the configured output directory.
Failures exit nonzero after printing a machine-readable error record.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .. import smc
from ..errors import MarsmcError
from ..likelihood import PosteriorKernel
from ..model import param_names
from ..parallel import substream
from ..select import bic, select_model
from ..simulate import simulate_path
from . import manifest as mf
from .config import RunConfig, dgp_from_config, load_config
from .detrend import detrend
from .io import load_csv, write_csv
from .mc import EstimationStudy, mc_study


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_table(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _common_deviations(n: int) -> list[str]:
    devs = [mf.DEV_MDD_NORMALIZATION, mf.DEV_NO_TIMING]
    if n == 1:
        devs.append(mf.DEV_UNIVARIATE_SCALE)
    return devs


def cmd_simulate(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    dgp = dgp_from_config(cfg)
    data = simulate_path(dgp, substream(dgp.seed, 0))
    write_csv(out / "path.csv", data)
    manifest = mf.build_manifest(
        "simulate",
        cfg.resolved(),
        _common_deviations(dgp.model.n),
        length=dgp.length,
        burn=dgp.burn,
        seed=dgp.seed,
        outputs={"path": "path.csv"},
    )
    mf.write_manifest(out / "manifest.json", manifest)
    print(f"simulate: wrote {dgp.length} x {dgp.model.n} path to {out / 'path.csv'}")
    return 0


def cmd_estimate(cfg: RunConfig) -> int:
    if cfg.data is None:
        raise MarsmcError("estimate needs a 'data' path")
    if cfg.model is None:
        raise MarsmcError("estimate needs a 'model' section")
    out = _outdir(cfg)
    data = load_csv(cfg.data)
    spec = cfg.model.to_spec()
    kernel = PosteriorKernel(spec=spec, data=data, prior_cfg=cfg.prior.to_config())
    started = time.perf_counter()
    result = smc.run(kernel, cfg.smc.to_config())
    elapsed = time.perf_counter() - started

    names = param_names(spec)
    _write_table(
        out / "posterior.csv",
        ["name", "mean", "sd", "map"],
        [
            [row["name"], _fmt(row["mean"]), _fmt(row["sd"]), _fmt(row["map"])]
            for row in mf.posterior_rows(result, names)
        ],
    )
    manifest = mf.build_manifest(
        "estimate",
        cfg.resolved(),
        _common_deviations(spec.n) + [mf.DEV_BIC_POINT],
        seed=cfg.smc.seed,
        log_mdd=result.log_mdd,
        bic=bic(kernel, result),
        stages=mf.stage_rows(result),
        posterior=mf.posterior_rows(result, names),
        outputs={"posterior": "posterior.csv"},
    )
    mf.write_manifest(out / "manifest.json", manifest)
    print(
        f"estimate: log_mdd={result.log_mdd:.4f} "
        f"({elapsed:.1f}s, results in {out})"
    )
    return 0


def cmd_select(cfg: RunConfig) -> int:
    if cfg.data is None:
        raise MarsmcError("select needs a 'data' path")
    out = _outdir(cfg)
    data = load_csv(cfg.data)
    started = time.perf_counter()
    report = select_model(
        data,
        cfg.grid.to_grid(),
        cfg.smc.to_config(),
        cfg.prior.to_config(),
        workers=cfg.workers,
    )
    elapsed = time.perf_counter() - started

    ranked = report.ranked_by_mdd()
    mdd_rank = {id(c): i + 1 for i, c in enumerate(ranked)}
    bic_rank = {id(c): i + 1 for i, c in enumerate(report.ranked_by_bic())}
    rows = []
    for c in report.candidates:
        rows.append(
            [
                c.spec.dist.value,
                c.spec.r,
                c.spec.s,
                c.k,
                _fmt(c.log_mdd),
                _fmt(c.bic),
                mdd_rank.get(id(c), ""),
                bic_rank.get(id(c), ""),
                _fmt(c.runtime),
                c.error or "",
            ]
        )
    _write_table(
        out / "report.csv",
        ["dist", "r", "s", "k", "log_mdd", "bic", "rank_mdd", "rank_bic", "runtime_s", "error"],
        rows,
    )
    manifest = mf.build_manifest(
        "select",
        cfg.resolved(),
        _common_deviations(data.n) + [mf.DEV_BIC_POINT],
        seed=cfg.smc.seed,
        candidates=[
            {
                "dist": c.spec.dist.value,
                "r": c.spec.r,
                "s": c.spec.s,
                "k": c.k,
                "log_mdd": None if c.error else c.log_mdd,
                "bic": None if c.error else c.bic,
                "error": c.error,
            }
            for c in report.candidates
        ],
        best_by_mdd={
            "dist": report.best_by_mdd.dist.value,
            "r": report.best_by_mdd.r,
            "s": report.best_by_mdd.s,
        },
        best_by_bic={
            "dist": report.best_by_bic.dist.value,
            "r": report.best_by_bic.r,
            "s": report.best_by_bic.s,
        },
        outputs={"report": "report.csv"},
    )
    mf.write_manifest(out / "manifest.json", manifest)
    b = report.best_by_bic
    print(
        f"select: best by BIC = ({b.r},{b.s}) {b.dist.value} over "
        f"{len(report.candidates)} candidates ({elapsed:.1f}s, results in {out})"
    )
    return 0


def cmd_mc(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    dgp = dgp_from_config(cfg)
    grid = cfg.grid.to_grid() if cfg.mode == "identification" else None
    if cfg.mode not in ("estimation", "identification"):
        raise MarsmcError(f"unknown mc mode {cfg.mode!r}")
    started = time.perf_counter()
    study = mc_study(
        dgp,
        cfg.replications,
        cfg.smc.to_config(),
        grid=grid,
        prior_cfg=cfg.prior.to_config(),
        workers=cfg.workers,
    )
    elapsed = time.perf_counter() - started

    if isinstance(study, EstimationStudy):
        rows = [
            [
                name,
                _fmt(float(study.truth[j])),
                _fmt(float(study.mean_estimate[j])),
                _fmt(float(study.var_estimate[j])),
                _fmt(float(study.mean_posterior_sd[j])),
                _fmt(float(study.bias[j])),
                _fmt(float(study.rmse[j])),
            ]
            for j, name in enumerate(study.names)
        ]
        _write_table(
            out / "mc_estimates.csv",
            ["name", "truth", "mean", "var", "mean_sd", "bias", "rmse"],
            rows,
        )
        payload = {
            "replications_ok": study.replications_ok,
            "failures": list(study.failures),
            "estimates": [
                {
                    "name": name,
                    "truth": float(study.truth[j]),
                    "mean": float(study.mean_estimate[j]),
                    "bias": float(study.bias[j]),
                    "rmse": float(study.rmse[j]),
                }
                for j, name in enumerate(study.names)
            ],
            "outputs": {"estimates": "mc_estimates.csv"},
        }
    else:
        keys = sorted(set(study.wins_mdd) | set(study.wins_bic))
        rows = [
            [
                key[2],
                key[0],
                key[1],
                study.wins_mdd.get(key, 0),
                study.wins_bic.get(key, 0),
                _fmt(study.frequency_mdd(key)),
                _fmt(study.frequency_bic(key)),
            ]
            for key in keys
        ]
        _write_table(
            out / "mc_selection.csv",
            ["dist", "r", "s", "wins_mdd", "wins_bic", "freq_mdd", "freq_bic"],
            rows,
        )
        payload = {
            "replications_ok": study.replications_ok,
            "failures": list(study.failures),
            "selection": [
                {
                    "dist": key[2],
                    "r": key[0],
                    "s": key[1],
                    "wins_mdd": study.wins_mdd.get(key, 0),
                    "wins_bic": study.wins_bic.get(key, 0),
                }
                for key in keys
            ],
            "outputs": {"selection": "mc_selection.csv"},
        }

    manifest = mf.build_manifest(
        "mc", cfg.resolved(), _common_deviations(dgp.model.n) + [mf.DEV_BIC_POINT],
        seed=cfg.seed, mode=cfg.mode, **payload,
    )
    mf.write_manifest(out / "manifest.json", manifest)
    print(
        f"mc: {cfg.mode} study, {study.replications_ok}/{cfg.replications} "
        f"replications ok ({elapsed:.1f}s, results in {out})"
    )
    return 0


def cmd_detrend(cfg: RunConfig) -> int:
    if cfg.data is None:
        raise MarsmcError("detrend needs a 'data' path")
    out = _outdir(cfg)
    data = load_csv(cfg.data)
    detrended, coeffs = detrend(data, cfg.degree)
    write_csv(out / "detrended.csv", detrended)
    columns = data.columns or tuple(f"s{j + 1}" for j in range(data.n))
    _write_table(
        out / "trend_coefficients.csv",
        ["series"] + [f"c{d}" for d in range(cfg.degree + 1)],
        [[name, *(_fmt(float(c)) for c in row)] for name, row in zip(columns, coeffs)],
    )
    manifest = mf.build_manifest(
        "detrend",
        cfg.resolved(),
        [mf.DEV_NO_TIMING],
        degree=cfg.degree,
        outputs={
            "detrended": "detrended.csv",
            "coefficients": "trend_coefficients.csv",
        },
    )
    mf.write_manifest(out / "manifest.json", manifest)
    print(f"detrend: degree {cfg.degree}, results in {out}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "select": cmd_select,
    "mc": cmd_mc,
    "detrend": cmd_detrend,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marsmc",
        description="Bayesian mixed causal-noncausal autoregressions by tempered SMC",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "generate a sample path from a configured process"),
        ("estimate", "estimate one model on a data file"),
        ("select", "estimate a candidate grid and rank by evidence and BIC"),
        ("mc", "run a replication study (estimation or identification)"),
        ("detrend", "remove a polynomial trend from a data file"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry, e.g. --set smc.seed=7",
        )
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point returning a process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, args.overrides)
        return _COMMANDS[args.command](cfg)
    except (MarsmcError, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
