"""Figure rendering for exported tunneling simulation artifacts."""

from .figspec import FigureSpec, PanelSpec, SpecError, load_spec
from .render import read_ancilla_diagonal, read_columns, render

__all__ = [
    "FigureSpec",
    "PanelSpec",
    "SpecError",
    "load_spec",
    "read_ancilla_diagonal",
    "read_columns",
    "render",
]

__version__ = "0.1.0"
