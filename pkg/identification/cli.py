#!/usr/bin/env python3
"""
sysid: generate data, fit models, evaluate fits and benchmark the sparse step.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 solver failure.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import ValidationError

from config.paths import SYSID_MAX_WORKERS, SYSID_OUTPUT_DIR
from identification.engine.datagen import InputSpec, NoiseSpec, gen_lti, gen_maglev, gen_wh_mimo
from identification.engine.datagen.maglev import DEFAULT_MAGLEV_NOISE
from identification.engine.errors import (
    ConfigError,
    DataError,
    DimensionError,
    FillPatternError,
    IdentificationError,
    InsufficientDataError,
    MaglevAbortError,
    RankBreakdownError,
    SolverDivergenceError,
)
from identification.engine.experiments import (
    BENCH_SIZES,
    bench_qr,
    evaluate,
    flops_table,
    load_config,
    load_fitted,
    measured_initial_conditions,
    preset_config,
    preset_names,
    run_experiment,
    summary_frame,
    with_solver_overrides,
    write_frame,
    write_run,
)
from identification.engine.model_core.dataset import read_dataset, write_dataset
from identification.engine.utils.accepted_types import InputKind, NoiseKind, PlantKind, SystemKind
from identification.engine.utils.validation import config_error_from
from identification.utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_SOLVER = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"❌ {message}", err=True)
    sys.exit(code)


def exit_codes(command):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ValidationError as e:
            _fail(EXIT_CONFIG, str(config_error_from(e)))
        except ConfigError as e:
            _fail(EXIT_CONFIG, str(e))
        except (DataError, DimensionError, InsufficientDataError, MaglevAbortError) as e:
            _fail(EXIT_DATA, str(e))
        except (SolverDivergenceError, RankBreakdownError, FillPatternError) as e:
            _fail(EXIT_SOLVER, str(e))
        except IdentificationError as e:
            logger.error(f"❌ Unexpected identification error: {e}")
            _fail(EXIT_SOLVER, str(e))

    return wrapper


def _choice(enum_cls) -> click.Choice:
    return click.Choice([member.value for member in enum_cls], case_sensitive=False)


@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default: SYSID_LOG_LEVEL, else INFO)")
def main(log_level: Optional[str]) -> None:
    """Simulation-error system identification with FL-CMO."""
    setup_logging(log_level)


@main.command()
@click.option("--system", "system", type=_choice(SystemKind), required=True)
@click.option("--n", "n_samples", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-kind", type=_choice(NoiseKind), default=None,
              help="Output noise; maglev defaults to uniform, other systems to none")
@click.option("--noise-amp", type=float, default=None, help="Uniform half-width or gaussian sigma")
@click.option("--noise-seed", type=int, default=0, show_default=True)
@click.option("--input-noise-amp", type=float, default=0.0, show_default=True,
              help="Errors-in-variables noise on the inputs")
@click.option("--input-kind", type=_choice(InputKind), default=InputKind.WHITE.value, show_default=True,
              help="LTI excitation")
@click.option("--plant", type=_choice(PlantKind), default=PlantKind.DISCRETE.value, show_default=True)
@click.option("--n-skip", type=int, default=0, show_default=True, help="WH transient samples to drop")
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@exit_codes
def generate(system: str, n_samples: int, seed: int, noise_kind: Optional[str], noise_amp: Optional[float],
             noise_seed: int, input_noise_amp: float, input_kind: str, plant: str, n_skip: int, out: Path) -> None:
    """Write a synthetic record to CSV with its generation parameters in the header."""
    system = SystemKind(system)
    if noise_kind is None and system == SystemKind.MAGLEV:
        noise_kind = DEFAULT_MAGLEV_NOISE.kind.value
        noise_amp = DEFAULT_MAGLEV_NOISE.amplitude if noise_amp is None else noise_amp
    noise = None
    if noise_kind is not None and NoiseKind(noise_kind) != NoiseKind.NONE:
        noise = NoiseSpec(kind=noise_kind, amplitude=noise_amp or 0.0, seed=noise_seed,
                          errors_in_variables=input_noise_amp > 0.0, input_amplitude=input_noise_amp)

    if system == SystemKind.LTI:
        dataset = gen_lti(input_spec=InputSpec(kind=input_kind), n_samples=n_samples, seed=seed, noise=noise)
    elif system == SystemKind.WH:
        dataset = gen_wh_mimo(n_samples, seed, n_skip=n_skip, noise=noise)
    else:
        dataset = gen_maglev(n_samples, seed, noise=noise, plant=plant)

    path = write_dataset(dataset, out)
    click.echo(f"✅ Wrote {dataset.n_samples} samples ({system.value}) to {path}")


@main.command()
@click.option("--preset", type=click.Choice(preset_names(), case_sensitive=False), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="TOML experiment file or a frozen config.json")
@click.option("--workers", type=int, default=None, help="Seed fan-out pool size (default: SYSID_MAX_WORKERS)")
@click.option("--max-iters", type=int, default=None, help="Override [solver].max_iters")
@click.option("--seeds", type=int, multiple=True, help="Override [solver].seeds (repeatable)")
@click.option("--out", "out", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Run directory (default: <output dir>/<run name>)")
@exit_codes
def fit(preset: Optional[str], config_path: Optional[Path], workers: Optional[int], max_iters: Optional[int],
        seeds: Tuple[int, ...], out: Optional[Path]) -> None:
    """Fit the configured model and write theta, traces and summary tables."""
    if (preset is None) == (config_path is None):
        raise ConfigError("fit", "give exactly one of --preset or --config")
    overrides = {"max_iters": max_iters, "seeds": list(seeds) or None}
    if preset is not None:
        config = preset_config(preset, **overrides)
    else:
        config = with_solver_overrides(load_config(config_path), **overrides)

    if workers is None:
        workers = config.solver.workers or SYSID_MAX_WORKERS
    outcome = run_experiment(config, workers=workers)
    run_dir = out or Path(config.output.directory or SYSID_OUTPUT_DIR) / config.run_name
    write_run(outcome, run_dir)
    click.echo(summary_frame(outcome).to_string(index=False))
    click.echo(f"Artifacts in {run_dir}")

    if outcome.failed:
        best = outcome.best()
        _fail(EXIT_SOLVER, f"every {best.method.value} run failed, e.g. seed {best.seed}: "
                           f"{best.status.value} {best.message}".rstrip())


@main.command(name="evaluate")
@click.option("--run", "run_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help="Run directory written by `fit`")
@click.option("--data", "data_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--measured-init", is_flag=True,
              help="Start the free run from the record's first outputs instead of the estimated ones")
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@exit_codes
def evaluate_command(run_dir: Path, data_path: Path, measured_init: bool, out: Optional[Path]) -> None:
    """Free-run the fitted model on a record and report per-channel RMSE and BFR."""
    fitted = load_fitted(run_dir)
    dataset = read_dataset(data_path)
    initial_conditions = fitted.initial_conditions
    if measured_init:
        scaled = dataset if fitted.scaling is None else fitted.scaling.apply(dataset)
        initial_conditions = measured_initial_conditions(fitted.model, scaled)
    metrics = evaluate(fitted.model, fitted.theta, initial_conditions, dataset, fitted.scaling)
    if out is not None:
        write_frame(metrics, out)
    click.echo(metrics.to_string(index=False))


@main.command(name="bench-qr")
@click.option("--sizes", type=int, multiple=True, help=f"Record lengths N (default: {list(BENCH_SIZES)})")
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@exit_codes
def bench_qr_command(sizes: Tuple[int, ...], reps: int, out: Optional[Path]) -> None:
    """Time sparse against dense FL-CMO steps for p = phi = 2."""
    table = bench_qr(sizes or BENCH_SIZES, reps=reps)
    if out is not None:
        write_frame(table, out)
    click.echo(table.to_string(index=False))


@main.command()
@click.option("--n-params", type=int, required=True)
@click.option("--p", "n_outputs", type=int, required=True)
@click.option("--phi", "order", type=int, required=True)
@click.option("--n", "n_samples", type=int, required=True)
@click.option("--family", "families", type=click.Choice(["exact", "printed", "dense", "fill"]), multiple=True)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@exit_codes
def flops(n_params: int, n_outputs: int, order: int, n_samples: int, families: Tuple[str, ...],
          out: Optional[Path]) -> None:
    """Predicted multiplication counts of one factorization and one mat-vec."""
    table = flops_table(n_params, n_outputs, order, n_samples, families or None)
    if out is not None:
        write_frame(table, out)
    click.echo(table.to_string(index=False))


if __name__ == "__main__":
    main()
