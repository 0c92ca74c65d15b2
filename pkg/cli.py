#!/usr/bin/env python3

import asyncio
import click
import json
import logging
import sys
from typing import Any, Callable, Dict, Optional
from rich.console import Console
from rich.table import Table
from rich.logging import RichHandler

from agents import MasterAgent
from data.reference_configs import REFERENCE_CONFIGS
from models.params import RunConfig
from models.results import DistributionCurve, IncrementReport, McSummary, RunResult, VerificationReport
from utils.exceptions import LppError, ParameterDomainError, VerificationError
from utils.io import (
    curve_to_csv, curve_to_json, dumps, report_to_json, summary_to_csv, summary_to_json, table_to_csv, write_text,
)
from utils.settings import THREADS_ENV, load_config_file
from utils.validators import ParameterValidator

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_BAD_PARAMETERS = 2
EXIT_NUMERICAL_FAILURE = 3

# data goes to stdout, logs and tables to stderr
console = Console(stderr=True)

logging.basicConfig(
    level=logging.INFO,
    format="%(message)s",
    handlers=[RichHandler(console=console, rich_tracebacks=True)]
)
logger = logging.getLogger(__name__)

RUN_FIELDS = ("samples", "seed", "threads", "suite", "out", "fmt")
GRID_FIELDS = {"nodes": "nodes", "cutoff": "cutoff", "deriv_step": "deriv_step"}
CONTOUR_FIELDS = {"contour_nodes": "nodes"}


def setup_logging(verbose: bool):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    else:
        logging.getLogger().setLevel(logging.INFO)


# ----------------------------------------------------------------------
# shared options

OPTIONS: Dict[str, Callable] = {
    "mode": click.option('--mode', type=click.Choice(["stationary", "two_param", "geometric"]),
                         help='Weight distribution (default: stationary)'),
    "N": click.option('--N', 'N', type=int, help='Lattice size N'),
    "n": click.option('--n', 'n', type=int, help='Endpoint offset, the endpoint is (N, N-n) (default: 0)'),
    "alpha": click.option('--alpha', type=float, help='Boundary parameter alpha in (-1/2, 1/2)'),
    "beta": click.option('--beta', type=float, help='Corner parameter beta of the two-parameter model'),
    "delta": click.option('--delta', type=float, help='Critical-scaling boundary strength delta'),
    "u": click.option('--u', type=float, help='Critical-scaling distance u from the diagonal'),
    "tau": click.option('--tau', type=float, help='Baik-Rains parameter tau (default: 0)'),
    "a": click.option('--a', type=float, help='Geometric diagonal parameter a'),
    "b": click.option('--b', type=float, help='Geometric first-row parameter b'),
    "q": click.option('--q', type=float, help='Geometric bulk parameter q'),
    "s_min": click.option('--s-min', 's_min', type=float, help='Left end of the s-window (default: -5)'),
    "s_max": click.option('--s-max', 's_max', type=float, help='Right end of the s-window (default: 5)'),
    "points": click.option('--points', type=int, help='Number of s-points (default: 33)'),
    "s": click.option('--s', 's_values', type=float, multiple=True, help='Explicit s-value, repeatable'),
    "samples": click.option('--samples', type=int, help='Monte Carlo sample count (default: 100000)'),
    "seed": click.option('--seed', type=int, help='Root random seed (default: 0)'),
    "nodes": click.option('--nodes', type=int, help='Quadrature nodes M on (s, s+T)'),
    "cutoff": click.option('--cutoff', type=float, help='Truncation length T of L^2(s, infinity)'),
    "deriv_step": click.option('--deriv-step', 'deriv_step', type=float, help='Step of the s-derivative'),
    "contour_nodes": click.option('--contour-nodes', 'contour_nodes', type=int, help='Nodes per contour circle'),
    "threads": click.option('--threads', type=int, envvar=THREADS_ENV, show_envvar=True,
                             help='Worker count (default: CPU count)'),
    "out": click.option('--out', type=click.Path(dir_okay=False), help='Output file (default: stdout)'),
    "fmt": click.option('--format', 'fmt', type=click.Choice(["json", "csv"]), help='Output format (default: json)'),
    "config": click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False),
                           help='key=value file merged under the flags'),
}

COMMON = ("samples", "seed", "threads", "out", "fmt", "config")
WINDOW = ("s_min", "s_max", "points", "s")
NUMERICS = ("nodes", "cutoff", "deriv_step", "contour_nodes")


def with_options(*keys: str):
    def decorate(func):
        for key in reversed(keys):
            func = OPTIONS[key](func)
        return func
    return decorate


def build_config(command: str, options: Dict[str, Any]) -> RunConfig:
    """
    RunConfig from the config file (if any) overlaid with the given flags

    Raises:
        ParameterDomainError: If the merged values do not form a valid config
    """
    values: Dict[str, Any] = {}
    config_file = options.pop("config_file", None)
    if config_file:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in options.items() if v is not None and v != ()})

    fields: Dict[str, Any] = {"command": command, "params": {}, "grid": {}, "contour": {}}
    for key, value in values.items():
        if key in RUN_FIELDS:
            fields[key] = value
        elif key in GRID_FIELDS:
            fields["grid"][GRID_FIELDS[key]] = value
        elif key in CONTOUR_FIELDS:
            fields["contour"][CONTOUR_FIELDS[key]] = value
        elif key == "s_values":
            fields["s_values"] = list(value) if isinstance(value, (list, tuple)) else [value]
        else:
            fields["params"][key] = value
    if not fields["contour"]:
        del fields["contour"]
    return ParameterValidator.build(RunConfig, **fields)


# ----------------------------------------------------------------------
# output

def render(result: RunResult, cfg: RunConfig) -> str:
    output = result.output
    config = cfg.model_dump()
    csv = cfg.fmt == "csv"
    if isinstance(output, DistributionCurve):
        return curve_to_csv(output) if csv else curve_to_json(output, config)
    if isinstance(output, McSummary):
        return summary_to_csv(output) if csv else summary_to_json(output, config)
    if isinstance(output, VerificationReport):
        return report_to_json(output, config)
    if isinstance(output, IncrementReport):
        return dumps({**output.model_dump(), "passed": output.passed, "config": config})
    if "header" not in output:
        return dumps({**output, "config": config})
    if csv:
        return table_to_csv(output["header"], output["rows"])
    return dumps({"header": output["header"], "rows": output["rows"], "config": config})


def display_result(result: RunResult):
    output = result.output
    table = Table(title=f"{result.command} ({result.status})", show_header=True)

    if isinstance(output, DistributionCurve):
        table.add_column("s", style="cyan", justify="right")
        table.add_column("F(s)", style="white", justify="right")
        table.add_column("err", style="yellow", justify="right")
        for p in output.points:
            table.add_row(f"{p.s:.6g}", f"{p.F:.10f}", f"{p.err:.2e}")
    elif isinstance(output, McSummary):
        table.add_column("Property", style="cyan", no_wrap=True)
        table.add_column("Value", style="white")
        table.add_row("Mode", output.mode)
        table.add_row("Target", output.target)
        table.add_row("Samples", str(output.samples))
        table.add_row("Mean", f"{output.mean:.8g}")
        table.add_row("Variance", f"{output.variance:.8g}")
        table.add_row("DKW band", f"{output.dkw_band:.3g}")
        for name, value in output.ks_stats.items():
            table.add_row(name, f"{value:.4g}")
    elif isinstance(output, VerificationReport):
        table.add_column("Check", style="cyan")
        table.add_column("Status", style="white")
        table.add_column("Value", style="white", justify="right")
        table.add_column("Tolerance", style="yellow", justify="right")
        for c in output.checks:
            status = {"pass": "[green]pass[/green]", "fail": "[red]fail[/red]"}.get(c.status, c.status)
            table.add_row(c.check, status, "" if c.value is None else f"{c.value:.4g}",
                          "" if c.tolerance is None else f"{c.tolerance:.3g}")
    elif isinstance(output, IncrementReport):
        table.add_column("Statistic", style="cyan")
        table.add_column("Value", style="white", justify="right")
        for group in (output.ks_pvalues, output.chi2_pvalues, output.correlations):
            for name, value in group.items():
                table.add_row(name, f"{value:.4g}")
        table.add_row("passed", "[green]yes[/green]" if output.passed else "[red]no[/red]")
    elif "header" not in output:
        table.add_column("Field", style="cyan")
        table.add_column("Value", style="white")
        for name, value in output.items():
            table.add_row(name, str(value) if name != "nodes" else f"{len(value)} nodes")
    else:
        for name in output["header"]:
            table.add_column(name, style="cyan", justify="right")
        for row in output["rows"]:
            table.add_row(*(f"{v:.10g}" for v in row))

    console.print(table)


def raise_for_status(result: RunResult):
    if result.status == "failed":
        raise VerificationError(f"{len(result.errors)} failed checks", failed_checks=result.errors)


def execute(command: str, options: Dict[str, Any]):
    """Builds the config, runs it through the master agent and maps the outcome to an exit code"""
    try:
        cfg = build_config(command, options)
        result = asyncio.run(MasterAgent().process({"config": cfg}))
    except ParameterDomainError as e:
        console.print(f"[red]Invalid parameters: {str(e)}[/red]")
        for err in e.errors:
            console.print(f"[red]  - {err}[/red]")
        sys.exit(EXIT_BAD_PARAMETERS)
    except LppError as e:
        console.print(f"[red]Numerical failure ({type(e).__name__}): {str(e)}[/red]")
        sys.exit(EXIT_NUMERICAL_FAILURE)

    if isinstance(result.output, dict) and "path" in result.output:
        # binary dump already written by the agent
        display_result(result)
        return

    text = render(result, cfg)
    if cfg.out:
        write_text(cfg.out, text)
        display_result(result)
        console.print(f"[cyan]Wrote {cfg.out}[/cyan]")
    else:
        click.echo(text, nl=False)

    try:
        raise_for_status(result)
    except VerificationError as e:
        console.print(f"[red]{str(e)}: {', '.join(e.failed_checks)}[/red]")
        sys.exit(EXIT_VERIFICATION_FAILED)


# ----------------------------------------------------------------------
# commands

@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
def cli(verbose):
    """Exact distributions and Monte Carlo for stationary half-space last passage percolation"""
    setup_logging(verbose)


@cli.command()
@with_options("mode", "N", "n", "alpha", "beta", "a", "b", "q", *WINDOW, *COMMON)
@click.option('--kind', type=click.Choice(["cdf", "increments", "path"]), help='What to sample (default: cdf)')
@click.option('--target', type=click.Choice(["L", "L_pf", "L_pf_minus_corner"]), help='Sampled variable (default: L)')
@click.option('--i', 'i', type=int, help='Increment vertex index i < j (default: 1)')
@click.option('--j', 'j', type=int, help='Increment vertex index j (default: 2)')
@click.option('--K', 'K', type=int, help='Staircase start (K, K) (default: 3)')
def sim(**options):
    """Monte Carlo of the half-space LPP time or its increments"""
    execute("sim", options)


@cli.command("cdf-two-param")
@with_options("N", "n", "alpha", "beta", *WINDOW, *NUMERICS, *COMMON)
@click.option('--continuation', is_flag=True, default=None, help='Accept beta <= 0 with alpha + beta > 0')
def cdf_two_param(**options):
    """P(L^pf <= s) of the two-parameter model"""
    execute("cdf-two-param", options)


@cli.command("cdf-finite")
@with_options("N", "n", "alpha", *WINDOW, *NUMERICS, *COMMON)
def cdf_finite(**options):
    """P(L <= s) of the stationary model at finite N"""
    execute("cdf-finite", options)


@cli.command("cdf-asymp")
@with_options("delta", "u", *WINDOW, *NUMERICS, *COMMON)
@click.option('--variant', type=click.Choice(["standard", "delta_neg"]), help='Border functions (default: standard)')
def cdf_asymp(**options):
    """Limit law F^(delta,u)(S)"""
    execute("cdf-asymp", options)


@cli.command("cdf-br")
@with_options("tau", *WINDOW, *NUMERICS, *COMMON)
def cdf_br(**options):
    """Baik-Rains distribution F_BR,tau(s)"""
    execute("cdf-br", options)


@cli.command("cdf-geo")
@with_options("a", "b", "q", "N", "n", *WINDOW, "contour_nodes", *COMMON)
@click.option('--representation', type=click.Choice(["auto", "poles", "circles"]),
              help='Kernel representation (default: auto)')
def cdf_geo(**options):
    """P(L <= s) of the geometric model, integer s"""
    execute("cdf-geo", options)


@cli.command("f-gue")
@with_options(*WINDOW, "nodes", "cutoff", "contour_nodes", *COMMON)
def f_gue(**options):
    """GUE Tracy-Widom distribution"""
    execute("f-gue", options)


@cli.command()
@with_options("N", "n", "alpha", "beta", "delta", "u", "tau", "a", "b", "q", "nodes", "deriv_step", *COMMON)
@click.option('--suite', type=click.Choice(["pfaffian", "formula-vs-mc", "two-param-vs-mc", "shift",
                                            "continuation", "br-limit", "geometric", "moments",
                                            "scaling", "simulator"]),
              help='Verification suite (default: pfaffian)')
def verify(**options):
    """Run a verification suite; exit code 1 when a check fails"""
    execute("verify", options)


@cli.command()
@click.argument('name')
@click.option('--x-min', 's_min', type=float, help='Left end of the x-window (default: -5)')
@click.option('--x-max', 's_max', type=float, help='Right end of the x-window (default: 5)')
@click.option('--y', 'y', type=float, help='Second argument of two-point functions (default: 0)')
@click.option('--s0', 's', type=float, help='Lower bound s of L^2(s, infinity) for Phi_tau (default: 0)')
@with_options("points", "N", "n", "alpha", "beta", "delta", "u", "tau", "contour_nodes", "threads", "out", "fmt",
              "config")
def tabulate(name: str, **options):
    """Tabulate a named scalar function, e.g. g1, e_alpha, f_scal, E1, Psi_tau, F_GUE"""
    execute("tabulate", {"name": name, **options})


@cli.command()
@click.argument('what', type=click.Choice(["kernel", "matrix", "contour"]))
@with_options("mode", "N", "n", "alpha", "beta", "a", "b", "q", *WINDOW, "nodes", "cutoff", "contour_nodes",
              "out", "fmt", "config")
@click.option('--name', help='g function whose contour is dumped (default: g1)')
def dump(**options):
    """Debug dumps: kernel grid table, binary J - K matrix (needs --out) or a contour as JSON"""
    execute("dump", options)


@cli.command("list-configs")
@click.option('--run', 'run_name', type=click.Choice(list(REFERENCE_CONFIGS.keys())),
              help='Run one reference configuration')
@click.option('--output-json', is_flag=True, help='Print the configurations as JSON')
def list_configs(run_name: Optional[str], output_json: bool):
    """Named reference configurations and their expected values"""
    if run_name:
        entry = REFERENCE_CONFIGS[run_name]
        console.print(f"[cyan]Running {run_name}: {entry['description']}[/cyan]")
        options = dict(entry["config"].get("params", {}))
        for key in ("s_values", "samples", "seed", "suite"):
            if key in entry["config"]:
                options[key] = entry["config"][key]
        execute(entry["config"]["command"], options)
        return

    if output_json:
        click.echo(json.dumps(REFERENCE_CONFIGS, indent=2, default=str))
        return

    table = Table(title="Reference Configurations", show_header=True)
    table.add_column("Name", style="cyan")
    table.add_column("Command", style="yellow")
    table.add_column("Description", style="white")
    table.add_column("Expected", style="green")
    for name, entry in REFERENCE_CONFIGS.items():
        table.add_row(name, entry["config"]["command"], entry["description"],
                      json.dumps(entry["expected"], default=str))
    console.print(table)


def main():
    cli()


if __name__ == "__main__":
    main()
