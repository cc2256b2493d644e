from .artifacts import (
    FittedModel,
    load_fitted,
    parameters_frame,
    summary_frame,
    timing_frame,
    write_frame,
    write_run,
)
from .bench import BENCH_COLUMNS, BENCH_SIZES, bench_qr, flops_table
from .config import (
    DataSection,
    ExperimentConfig,
    ModelSection,
    OutputSection,
    SolverSection,
    freeze_config,
    load_config,
    with_solver_overrides,
    parse_config,
)
from .evaluation import evaluate, measured_initial_conditions, score, simulate_model
from .presets import PRESETS, preset_config, preset_names
from .runner import FitRecord, RunData, RunOutcome, build_run_data, fit_methods, run_experiment

__all__ = [
    "FittedModel",
    "load_fitted",
    "parameters_frame",
    "summary_frame",
    "timing_frame",
    "write_frame",
    "write_run",
    "BENCH_COLUMNS",
    "BENCH_SIZES",
    "bench_qr",
    "flops_table",
    "DataSection",
    "ExperimentConfig",
    "ModelSection",
    "OutputSection",
    "SolverSection",
    "freeze_config",
    "load_config",
    "with_solver_overrides",
    "parse_config",
    "evaluate",
    "measured_initial_conditions",
    "score",
    "simulate_model",
    "PRESETS",
    "preset_config",
    "preset_names",
    "FitRecord",
    "RunData",
    "RunOutcome",
    "build_run_data",
    "fit_methods",
    "run_experiment",
]
