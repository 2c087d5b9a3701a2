"""Command-line interface: run scenarios, sweeps, closed-form references,
and format conversions over the exported artifacts.

Exit codes: 0 on success, 1 on configuration errors, 2 on runtime failures.
"""

import sys
from pathlib import Path

import click
import numpy as np

from . import oracle as closed_form
from .experiments import (
    ConfigError,
    export as export_result,
    load_result,
    load_scenario,
    run_scenario,
    run_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _run_guarded(fn):
    try:
        fn()
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except Exception as e:  # noqa: BLE001 - CLI boundary
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_RUNTIME)


def _common_options(fn):
    fn = click.option(
        "--config", "config_path", required=True,
        type=click.Path(path_type=Path), help="Scenario TOML file.",
    )(fn)
    fn = click.option(
        "--out-dir", envvar="TUNNELOPT_OUT_DIR", default="out",
        type=click.Path(path_type=Path), show_default=True,
        help="Output directory (env: TUNNELOPT_OUT_DIR).",
    )(fn)
    fn = click.option(
        "--seed", type=int, default=None, help="Override the optimizer seed.",
    )(fn)
    fn = click.option(
        "--format", "fmt", type=click.Choice(["csv", "json", "both"]),
        default="both", show_default=True,
    )(fn)
    return fn


@click.group()
def main():
    """Simulate and optimize ancilla-assisted tunneling scenarios."""


@main.command()
@_common_options
def simulate(config_path: Path, out_dir: Path, seed: int | None, fmt: str):
    """Evolve a scenario at its configured parameter values (no learning)."""

    def run():
        spec = load_scenario(config_path)
        spec.optimize_enabled = False
        result = run_scenario(spec, out_dir=out_dir, seed=seed, fmt=fmt)
        click.echo(
            f"max P = {result.learned['max_prob']:.6f} "
            f"(baseline {result.learned['baseline_max_prob']:.6f}) -> {out_dir}"
        )

    _run_guarded(run)


@main.command()
@_common_options
def optimize(config_path: Path, out_dir: Path, seed: int | None, fmt: str):
    """Learn the ancilla parameters for a scenario, then evolve and export."""

    def run():
        result = run_scenario(config_path, out_dir=out_dir, seed=seed, fmt=fmt)
        lr = result.learned
        click.echo(
            f"learned eta_a={lr['eta_a']:.4f} gamma_a={lr['gamma_a']:.4f} "
            f"delta_a={lr['delta_a']:.4f} alpha={lr['alpha']:.4f} "
            f"t_hat={lr['t_hat']:.4f}"
        )
        click.echo(
            f"max P = {lr['max_prob']:.6f} "
            f"(baseline {lr['baseline_max_prob']:.6f}) -> {out_dir}"
        )

    _run_guarded(run)


@main.command()
@_common_options
def sweep(config_path: Path, out_dir: Path, seed: int | None, fmt: str):
    """Run a scenario over an (n_s, n_a) grid and write a summary table."""

    def run():
        rows = run_sweep(config_path, out_dir, fmt=fmt)
        for row in rows:
            click.echo(
                f"n_s={row['n_s']} n_a={row['n_a']} max P={row['max_P']:.6f} "
                f"alpha={row['alpha']:.4f}"
            )
        click.echo(f"{len(rows)} cells -> {out_dir / 'summary.csv'}")

    _run_guarded(run)


@main.command()
@click.option(
    "--model", "which", required=True,
    type=click.Choice(["two-level", "asymmetric", "symmetric"]),
    help="Which closed-form solution to evaluate.",
)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=0.5, show_default=True)
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--n-ancilla", type=int, default=1, show_default=True)
@click.option(
    "--psi", default="left", show_default=True,
    help="Ancilla state: 'left', 'right', or comma-separated amplitudes.",
)
@click.option("--t-max", type=float, default=12.0, show_default=True)
@click.option("--points", type=int, default=200, show_default=True)
def oracle(which, delta, gamma, alpha, n_ancilla, psi, t_max, points):
    """Print a closed-form tunneling curve as CSV on stdout."""

    def run():
        if psi == "left":
            amps = np.zeros(n_ancilla + 1)
            amps[-1] = 1.0
        elif psi == "right":
            amps = np.zeros(n_ancilla + 1)
            amps[0] = 1.0
        else:
            amps = np.array([complex(v) for v in psi.split(",")])
            amps = amps / np.linalg.norm(amps)
        times = np.linspace(0.0, t_max, points)
        click.echo("t,prob")
        for t in times:
            if which == "two-level":
                p = closed_form.p_two_level(delta, gamma, t)
            elif which == "asymmetric":
                p = closed_form.p_asymmetric_with_ancilla(gamma, alpha, n_ancilla, amps, t)
            else:
                p = closed_form.p_symmetric_with_ancilla(alpha, n_ancilla, amps, t)
            click.echo(f"{float(t)!r},{float(p)!r}")

    _run_guarded(run)


@main.command()
@click.option(
    "--result", "result_path", required=True,
    type=click.Path(path_type=Path), help="A result.json written by this tool.",
)
@click.option(
    "--out-dir", envvar="TUNNELOPT_OUT_DIR", default="out",
    type=click.Path(path_type=Path), show_default=True,
)
@click.option(
    "--format", "fmt", type=click.Choice(["csv", "json", "both"]),
    default="csv", show_default=True,
)
def export(result_path: Path, out_dir: Path, fmt: str):
    """Re-export a stored result in another format."""

    def run():
        result = load_result(result_path)
        written = export_result(result, out_dir, fmt=fmt)
        for path in written:
            click.echo(str(path))

    _run_guarded(run)
