"""Batch pipeline: configuration, data I/O, detrending, studies, CLI."""

from .cli import cli_main
from .config import RunConfig, config_from_dict, load_config
from .detrend import detrend
from .io import load_cloud, load_csv, save_cloud, write_csv
from .mc import EstimationStudy, IdentificationStudy, mc_study

__all__ = [
    "EstimationStudy",
    "IdentificationStudy",
    "RunConfig",
    "cli_main",
    "config_from_dict",
    "detrend",
    "load_cloud",
    "load_config",
    "load_csv",
    "mc_study",
    "save_cloud",
    "write_csv",
]
