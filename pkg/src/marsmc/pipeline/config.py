"""Run configuration: parsing, validation, command-line overrides.

Configs are JSON files with one section per concern. Unknown keys are
rejected everywhere so typos fail loudly before any computation starts.
``--set a.b=value`` overrides individual entries; values are parsed as JSON
literals with a fallback to plain strings.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..model import Dist, ModelSpec, ParamVector, encode_params
from ..priors import PriorConfig
from ..select import DEFAULT_ORDERS, CandidateGrid
from ..simulate import DgpSpec, benchmark_dgp
from ..smc import SmcConfig


def _from_mapping(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class ModelSection:
    n: int = 2
    r: int = 1
    s: int = 1
    dist: str = "student_t"

    def to_spec(self) -> ModelSpec:
        try:
            return ModelSpec(n=self.n, r=self.r, s=self.s, dist=Dist(self.dist))
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from exc


@dataclass(frozen=True)
class SmcSection:
    particles: int = 2000
    stages: int = 50
    lam: float = 2.0
    mutation_steps: int = 1
    ess_fraction: float = 0.5
    target_accept: float = 0.25
    initial_scale: float = 0.3
    seed: int = 0
    workers: int = 1

    def to_config(self) -> SmcConfig:
        try:
            return SmcConfig(
                particles=self.particles,
                stages=self.stages,
                lam=self.lam,
                mutation_steps=self.mutation_steps,
                ess_fraction=self.ess_fraction,
                target_accept=self.target_accept,
                initial_scale=self.initial_scale,
                seed=self.seed,
                workers=self.workers,
            )
        except ValueError as exc:
            raise ConfigError(f"smc: {exc}") from exc


@dataclass(frozen=True)
class PriorSection:
    psi_scale: float = 2.0
    phi_scale: float = 2.0
    wishart_scale: float = 5.0
    wishart_df: float = 3.0
    nu_mean: float = 5.0
    nu_max: float = 100.0
    skew_var: float = 3.0
    uni_logscale_var: float = 10.0

    def to_config(self) -> PriorConfig:
        try:
            return PriorConfig(**dataclasses.asdict(self))
        except ValueError as exc:
            raise ConfigError(f"prior: {exc}") from exc


@dataclass(frozen=True)
class GridSection:
    orders: list = field(default_factory=lambda: [list(o) for o in DEFAULT_ORDERS])
    dists: list = field(default_factory=lambda: [d.value for d in Dist])

    def to_grid(self) -> CandidateGrid:
        try:
            return CandidateGrid(
                orders=tuple(tuple(o) for o in self.orders),
                dists=tuple(self.dists),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}") from exc


@dataclass(frozen=True)
class ParamsSection:
    """Structured true parameters for simulation studies."""

    psi: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    sigma: list = field(default_factory=list)
    nu: float | None = None
    alpha: list | None = None

    def to_params(self, spec: ModelSpec) -> ParamVector:
        try:
            return encode_params(
                [np.asarray(m, dtype=float) for m in self.psi],
                [np.asarray(m, dtype=float) for m in self.phi],
                np.asarray(self.sigma, dtype=float),
                nu=self.nu,
                alpha=None if self.alpha is None else np.asarray(self.alpha, dtype=float),
                spec=spec,
            )
        except ValueError as exc:
            raise ConfigError(f"params: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs; sections unused by a command stay None."""

    data: str | None = None
    output_dir: str = "."
    model: ModelSection | None = None
    params: ParamsSection | None = None
    benchmark: str | None = None
    smc: SmcSection = field(default_factory=SmcSection)
    prior: PriorSection = field(default_factory=PriorSection)
    grid: GridSection = field(default_factory=GridSection)
    length: int = 150
    burn: int = 200
    seed: int = 0
    degree: int = 3
    replications: int = 20
    mode: str = "estimation"
    workers: int = 1

    def resolved(self) -> dict:
        """Plain-dict image of the full config, for manifests."""
        return dataclasses.asdict(self)


_SECTIONS = {
    "model": ModelSection,
    "params": ParamsSection,
    "smc": SmcSection,
    "prior": PriorSection,
    "grid": GridSection,
}


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    parsed = dict(raw)
    for name, cls in _SECTIONS.items():
        if parsed.get(name) is not None:
            parsed[name] = _from_mapping(cls, parsed[name], name)
    return _from_mapping(RunConfig, parsed, "config")


def load_config(path, overrides: list[str] | None = None) -> RunConfig:
    """Load a JSON config file and apply ``key.path=value`` overrides."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    for item in overrides or []:
        raw = apply_override(raw, item)
    return config_from_dict(raw)


def apply_override(raw: dict, assignment: str) -> dict:
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key_path, text = assignment.split("=", 1)
    keys = [k for k in key_path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"override {assignment!r} has an empty key")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = raw
    for key in keys[:-1]:
        nxt = node.get(key)
        if nxt is None:
            nxt = {}
            node[key] = nxt
        if not isinstance(nxt, dict):
            raise ConfigError(f"override {assignment!r} descends into a non-object")
        node = nxt
    node[keys[-1]] = value
    return raw


def dgp_from_config(cfg: RunConfig) -> DgpSpec:
    """Build the simulation process from either a named benchmark or raw parameters."""
    if cfg.benchmark is not None:
        try:
            dgp = benchmark_dgp(cfg.benchmark, length=cfg.length, seed=cfg.seed)
        except ValueError as exc:
            raise ConfigError(f"benchmark: {exc}") from exc
        return dgp
    if cfg.model is None or cfg.params is None:
        raise ConfigError("simulation needs either 'benchmark' or 'model' plus 'params'")
    spec = cfg.model.to_spec()
    params = cfg.params.to_params(spec)
    try:
        return DgpSpec(
            model=spec, params=params, length=cfg.length, burn=cfg.burn, seed=cfg.seed
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
