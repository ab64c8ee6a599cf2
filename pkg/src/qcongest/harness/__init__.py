"""Experiment driver: configs, sweeps, CSV records, scaling fits, plots and validation suites."""
from .config import ConfigError, SweepConfig, load_config
from .fit import ScalingFit, fit_points, fit_scaling
from .records import COLUMNS, RunRecord, read_csv, to_csv, write_csv
from .sweep import run_sweep, run_trial
from .validate import SUITES, Report, validate

__all__ = [
    "COLUMNS",
    "ConfigError",
    "Report",
    "RunRecord",
    "SUITES",
    "ScalingFit",
    "SweepConfig",
    "fit_points",
    "fit_scaling",
    "load_config",
    "read_csv",
    "run_sweep",
    "run_trial",
    "to_csv",
    "validate",
    "write_csv",
]
