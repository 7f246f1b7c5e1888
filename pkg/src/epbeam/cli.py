"""Command Line Interface for epbeam.

Click commands for eigenvalue flows, spin portraits, dynamics, exceptional
point location, sensitivity fits, figure presets and the built-in selftest.
CSV data goes to standard output or --out; diagnostics go to standard error.

Exit codes: 0 success, 2 invalid arguments or configuration, 3 numerical
failure, 4 I/O failure.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TypeVar

import click

from . import __version__
from .config import DEFAULT_TOLERANCES, ConfigError, load_config_values
from .csv_table import CsvTable, CsvTableError
from .linalg_kernel import NumericalError
from .logging_setup import configure_logging, make_console
from .models import (
    Backend,
    InvalidParameterError,
    ModelParams,
    SweepAxis,
    SweepSpec,
)
from .presets import UnknownPresetError, preset_names, write_preset
from .selftest import run_selftest
from .spectrum import FIT_MODES, critical_gamma, ep_exponent_fit, ep_report
from .sweeps import (
    default_spin_grid,
    run_dynamics,
    run_eta_sweep,
    run_gamma_sweep,
    run_spin_grid,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

F = TypeVar("F", bound=Callable[..., Any])

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}


def _apply(options: list[Callable[[F], F]], func: F) -> F:
    for option in reversed(options):
        func = option(func)
    return func


def model_options(func: F) -> F:
    """Physical parameters plus the configuration file; unset flags stay None."""
    return _apply(
        [
            click.option(
                "--config",
                "config_path",
                type=click.Path(dir_okay=False, path_type=Path),
                help="Flat key = value configuration file.",
            ),
            click.option("--n", "n", type=int, help="Photon number N."),
            click.option("--omega0", type=float, help="On-site energy."),
            click.option("--nu0", type=float, help="Coupling scale."),
            click.option("--eta", type=float, help="Non-reciprocity in [0, 1]."),
            click.option("--gamma", type=float, help="Dissipation of guide b."),
            click.option("--seed", type=int, help="Random seed."),
        ],
        func,
    )


def sweep_options(func: F) -> F:
    """Grid, output and execution flags shared by the table commands."""
    return _apply(
        [
            click.option(
                "--axis",
                type=click.Choice([a.value for a in SweepAxis]),
                help="Swept parameter.",
            ),
            click.option("--min", "min", type=float, help="First grid value."),
            click.option("--max", "max", type=float, help="Last grid value."),
            click.option("--steps", type=int, help="Number of grid points."),
            click.option("--initial", type=str, help="noon, fock:m or amplitudes:a0,a1,..."),
            click.option(
                "--backend",
                type=click.Choice([b.value for b in Backend]),
                help="Propagator backend.",
            ),
            click.option(
                "--out",
                type=click.Path(dir_okay=False),
                help="Write CSV here instead of stdout.",
            ),
            click.option("--workers", type=int, help="Worker processes for sweep points."),
        ],
        func,
    )


def merge_settings(options: dict[str, Any]) -> dict[str, Any]:
    """Configuration file values overridden by every flag that was given."""
    config_path = options.pop("config_path", None)
    settings: dict[str, Any] = load_config_values(config_path) if config_path else {}
    settings.update({key: value for key, value in options.items() if value is not None})
    return settings


def _sweep_spec(options: dict[str, Any], default_axis: SweepAxis) -> SweepSpec:
    return SweepSpec.from_dict(merge_settings(options), default_axis=default_axis)


def emit_table(table: CsvTable, out: str | None) -> None:
    if out:
        table.write(out)
        logger.info("wrote %d rows to %s", len(table.rows), out)
    else:
        click.echo(table.to_csv(), nl=False)


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(version=__version__, prog_name="epbeam")
@click.option("-v", "--verbose", count=True, help="Increase log verbosity (-v, -vv).")
def cli(verbose: int) -> None:
    """Non-reciprocal lossy beam splitter: spectra, exceptional points and dynamics."""
    configure_logging(verbose)


@cli.command()
@model_options
@sweep_options
def spectrum(**options: Any) -> int:
    """Eigenvalue flow against gamma (or eta with --axis eta)."""
    spec = _sweep_spec(options, SweepAxis.GAMMA)
    if spec.axis is SweepAxis.GAMMA:
        table = run_gamma_sweep(spec)
    elif spec.axis is SweepAxis.ETA:
        table = run_eta_sweep(spec)
    else:
        raise click.UsageError("spectrum sweeps gamma or eta, not z")
    emit_table(table, spec.out)
    return EXIT_OK


@cli.command("eta-flow")
@model_options
@sweep_options
def eta_flow(**options: Any) -> int:
    """Eigenvalue flow against the non-reciprocity eta."""
    spec = _sweep_spec(options, SweepAxis.ETA)
    if spec.axis is not SweepAxis.ETA:
        raise click.UsageError("eta-flow sweeps eta only")
    emit_table(run_eta_sweep(spec), spec.out)
    return EXIT_OK


@cli.command()
@model_options
@sweep_options
def spin(**options: Any) -> int:
    """Spin projections of every eigenmode.

    Without --gamma/--eta the default nine-panel grid is used.
    """
    settings = merge_settings(options)
    base = ModelParams.from_dict({**settings, "gamma": 0.0, "eta": 0.0})
    gammas, etas = default_spin_grid(base.nu0)
    if "gamma" in settings:
        gammas = [float(settings["gamma"])]
    if "eta" in settings:
        etas = [float(settings["eta"])]
    workers = int(settings.get("workers", 1))
    table = run_spin_grid(gammas, etas, base, DEFAULT_TOLERANCES, workers)
    emit_table(table, settings.get("out"))
    return EXIT_OK


@cli.command()
@model_options
@sweep_options
def dynamics(**options: Any) -> int:
    """Post-selected occupation and survival along z."""
    spec = _sweep_spec(options, SweepAxis.Z)
    if spec.axis is not SweepAxis.Z:
        raise click.UsageError("dynamics sweeps z only")
    emit_table(run_dynamics(spec), spec.out)
    return EXIT_OK


@cli.command("ep-locate")
@model_options
def ep_locate(**options: Any) -> int:
    """Print gamma_c, eta_c and the order of the exceptional point."""
    params = ModelParams.from_dict(merge_settings(options))
    for line in ep_report(params).to_lines():
        click.echo(line)
    return EXIT_OK


@cli.command()
@model_options
@click.option("--mode", type=click.Choice(FIT_MODES), default="generic", show_default=True)
def sensitivity(mode: str, **options: Any) -> int:
    """Fit the eigenvalue-splitting exponent at the exceptional point.

    Without --gamma the critical dissipation for the given eta is used.
    """
    settings = merge_settings(options)
    if "gamma" not in settings:
        base = ModelParams.from_dict(settings)
        settings["gamma"] = critical_gamma(base.nu0, base.eta)
    params = ModelParams.from_dict(settings)
    fit = ep_exponent_fit(params, mode=mode, seed=int(settings.get("seed", 0)))
    click.echo(f"mode={fit.mode}")
    click.echo(f"slope={format(fit.slope, '.17g')}")
    click.echo(f"residual={format(fit.residual, '.17g')}")
    return EXIT_OK


@cli.command()
def selftest() -> int:
    """Run the invariant suite and report pass/fail counts."""
    results = run_selftest()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{status} {result.name} {format(result.value, '.3e')} <= {result.bound:.0e}")
    passed = sum(result.passed for result in results)
    click.echo(f"passed={passed}")
    click.echo(f"failed={len(results) - passed}")
    return EXIT_OK if passed == len(results) else EXIT_NUMERICAL


@cli.command()
@click.argument("name", type=click.Choice([*preset_names(), "all"]))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
def preset(name: str, out_dir: Path, workers: int) -> int:
    """Write the CSV tables of a figure preset into a directory."""
    names = preset_names() if name == "all" else [name]
    for preset_name in names:
        for path in write_preset(preset_name, out_dir, DEFAULT_TOLERANCES, workers):
            click.echo(str(path))
    return EXIT_OK


def _report(message: str) -> None:
    make_console().print(f"error: {message}", style="error", markup=False)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and map failures onto exit codes."""
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        with click.Context(cli, info_name="epbeam") as ctx:
            click.echo(cli.get_help(ctx), err=True)
        return EXIT_USAGE

    try:
        result = cli.main(args=args, prog_name="epbeam", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        _report("aborted")
        return EXIT_USAGE
    except (ConfigError, InvalidParameterError, CsvTableError, UnknownPresetError) as exc:
        _report(str(exc))
        return EXIT_USAGE
    except NumericalError as exc:
        _report(str(exc))
        return EXIT_NUMERICAL
    except OSError as exc:
        _report(str(exc))
        return EXIT_IO
    return result if isinstance(result, int) else EXIT_OK


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
