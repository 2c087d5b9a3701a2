"""CLI entry point: render figure specs to images.

Exit codes: 0 on success, 1 on spec errors, 2 on runtime failures.
"""

import sys
from pathlib import Path

import click

from .figspec import SpecError, load_spec
from .render import render


@click.group()
def main():
    """Render exported tunneling artifacts as figures."""


@main.command()
@click.option(
    "--spec", "spec_path", required=True, type=click.Path(path_type=Path),
    help="Figure spec TOML file.",
)
@click.option(
    "--out", "out_dir", required=True, type=click.Path(path_type=Path),
    help="Directory the image is written into.",
)
def plot(spec_path: Path, out_dir: Path):
    """Render one figure spec to a PNG."""
    try:
        spec = load_spec(spec_path)
        out_path = render(spec, out_dir)
    except SpecError as e:
        click.echo(f"spec error: {e}", err=True)
        sys.exit(1)
    except Exception as e:  # noqa: BLE001 - CLI boundary
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    click.echo(str(out_path))
