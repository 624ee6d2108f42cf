import functools
import logging
import os
import sys

import click

from oneatom.core.errors import ConfigError, ContractViolationError, ConvergenceError

INI_FILE = "oneatom.ini"
LOG_FORMAT = "%(asctime)s : %(name)s %(levelname)s : %(message)s"

EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


def handle_errors(command):
    """Map package errors onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        context = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except ConfigError as ex:
            click.echo("config error: %s" % ex, err=True)
            context.exit(EXIT_CONFIG)
        except ContractViolationError as ex:
            click.echo("invalid value: %s" % ex, err=True)
            context.exit(EXIT_CONFIG)
        except ConvergenceError as ex:
            click.echo("convergence error: %s" % ex, err=True)
            context.exit(EXIT_CONVERGENCE)

    return wrapper


def scenario_options(command):
    options = [
        click.option("--config", "config_path", default=None, type=click.Path(), help="Scenario ini file"),
        click.option("--out", default=None, type=click.Path(), help="Output directory"),
        click.option("--r", "r", default=None, type=float, help="r = Omega23 / g"),
        click.option("--ratio", default=None, type=float, help="Omega12 / delta"),
        click.option("--ordering", default=None, type=click.Choice(["with", "without", "both"]), help="Time ordering"),
        click.option(
            "--branch", default=None, type=click.Choice(["plus", "minus", "both"]), help="Detected atom state"
        ),
        click.option("--dim", default=None, type=int, help="Fock truncation (0 = automatic)"),
        click.option("--steps", default=None, type=int, help="Oracle steps per period (0 = default)"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def resolve(context, config_path, out, **overrides):
    """Defaults, then oneatom.ini, then --config, then flags."""
    from oneatom.experiments.config import ScenarioConfig

    config = context.obj["config"]
    if config_path:
        config = ScenarioConfig.load([config_path], config)
    if out:
        overrides["output_path"] = os.path.join(out, os.path.basename(config.output_path))
    config = config.with_overrides(**overrides)
    logging.debug("scenario:\n%s", config.to_ini())
    return config


@click.group(invoke_without_command=True)
@click.option("--debug", is_flag=True, default=False, help="Debug switch")
@click.option("--quiet", is_flag=True, default=False, help="Only warnings and errors")
@click.pass_context
def cli(context, debug, quiet):
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    if debug:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(format=LOG_FORMAT, level=level)

    from oneatom.experiments.config import ScenarioConfig

    context.obj = {}

    try:
        if os.path.exists(INI_FILE):
            context.obj["config"] = ScenarioConfig.load([INI_FILE])
        else:
            context.obj["config"] = ScenarioConfig()
    except ConfigError as ex:
        click.echo("config error in %s: %s" % (INI_FILE, ex), err=True)
        context.exit(EXIT_CONFIG)

    logging.debug("Debug ON")
    if len(sys.argv) == 1:
        click.echo(context.get_help())


@cli.command()
@click.option("--force", is_flag=True, default=False, help="Overwrite an existing file")
@click.pass_context
def init(context, force):
    """Write the current defaults to oneatom.ini"""
    if os.path.exists(INI_FILE) and not force:
        click.echo("%s exists, use --force to overwrite" % INI_FILE)
        return
    with open(INI_FILE, "w") as f:
        f.write(context.obj["config"].to_ini())
    click.echo("wrote %s" % INI_FILE)


@cli.command()
@scenario_options
@click.pass_context
@handle_errors
def simulate(context, config_path, out, **overrides):
    """Tabulate conditional cat states and their measures over a time grid"""
    from oneatom.experiments.runner import cmd_simulate, write_results

    config = resolve(context, config_path, out, **overrides)
    table = cmd_simulate(config)
    for path in write_results(config, table):
        click.echo(path)


@cli.command()
@click.argument("which", type=click.Choice(["fig2", "fig3", "fig4", "fig5"]))
@click.option("--out", default=".", type=click.Path(), help="Output directory")
@click.option("--workers", default=0, type=int, help="Worker threads (0 = default)")
@handle_errors
def figure(which, out, workers):
    """Emit CSV data for one of the figure presets"""
    from oneatom.experiments.runner import cmd_figure

    for path in cmd_figure(which, out, workers):
        click.echo(path)


@cli.command()
@click.option("--fraction", default=0.1, type=float, help="Share of the phase period pi taken as significant")
@click.option("--dim", default=None, type=int, help="Fock truncation for the photon-number cross-check")
@handle_errors
def critical(fraction, dim):
    """Critical r and photon numbers of cats at amplitude 2 r_c"""
    if not fraction > 0:
        raise ConfigError("fraction", "must be positive, got %g" % fraction)
    from oneatom.experiments.runner import cmd_critical

    report = cmd_critical(fraction, dim)
    click.echo("r_c = %.6f" % report.r_c)
    click.echo("amplitude 2 r_c = %.6f" % report.amplitude)
    click.echo("<n> odd  = %.6f (Fock %.6f)" % (report.n_odd, report.n_odd_fock))
    click.echo("<n> even = %.6f (Fock %.6f)" % (report.n_even, report.n_even_fock))
    click.echo("<n> YS   = %.6f (Fock %.6f)" % (report.n_yurke_stoler, report.n_yurke_stoler_fock))
    logging.debug("%s", report)


@cli.command()
@scenario_options
@click.pass_context
@handle_errors
def validate(context, config_path, out, **overrides):
    """Run the numerical oracle suite; exit 1 if any check fails"""
    from oneatom.experiments.runner import cmd_validate

    config = resolve(context, config_path, out, oracle=True, **overrides)
    results = cmd_validate(config)
    for result in results:
        click.echo(
            "%-22s %s value=%.12g threshold=%.12g %s"
            % (result.name, "PASS" if result.passed else "FAIL", result.value, result.threshold, result.detail)
        )
    if not all(r.passed for r in results):
        context.exit(EXIT_FAILED)


@cli.command()
@scenario_options
@click.option("--r-values", default="0.25,0.32,0.5,1.0", help="Comma separated r values")
@click.option("--ratios", default="8,50,200", help="Comma separated Omega12/delta values")
@click.pass_context
@handle_errors
def sweep(context, config_path, out, r_values, ratios, **overrides):
    """Grid over r and Omega12/delta: regime flag, ordering phase, peak noise"""
    from oneatom.experiments.runner import SWEEP_COLUMNS, cmd_sweep, write_csv

    config = resolve(context, config_path, out, **overrides)
    try:
        rs = [float(v) for v in r_values.split(",") if v.strip()]
        grid = [float(v) for v in ratios.split(",") if v.strip()]
    except ValueError as ex:
        raise ConfigError("sweep", str(ex))
    if not rs or any(not r >= 0 for r in rs):
        raise ConfigError("r-values", "expected non-negative r values, got %s" % r_values)
    if not grid or any(not ratio > 0 for ratio in grid):
        raise ConfigError("ratios", "expected positive Omega12/delta values, got %s" % ratios)
    table = cmd_sweep(config, rs, grid)
    path = os.path.join(os.path.dirname(config.output_path), "sweep.csv")
    click.echo(write_csv(path, table, list(SWEEP_COLUMNS), SWEEP_COLUMNS))
