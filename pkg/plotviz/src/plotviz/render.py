"""Panel renderers over the exported CSV/JSON artifacts.

Everything here is read-only: inputs are parsed, drawn, and written as one
raster image per figure spec. Empty inputs render as blank axes with a
warning instead of failing, so batch runs keep going.
"""

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec, PanelSpec

PNG_METADATA = {"Software": "plotviz"}


def read_columns(path: Path) -> dict[str, np.ndarray]:
    """Load a CSV into named float columns; header-only files give empty
    arrays."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        return {}
    header = rows[0]
    data = {name: [] for name in header}
    for row in rows[1:]:
        for name, value in zip(header, row):
            data[name].append(float(value))
    return {name: np.array(values) for name, values in data.items()}


def read_ancilla_diagonal(path: Path) -> np.ndarray:
    """Diagonal populations of the learned ancilla from a result.json."""
    with open(path) as f:
        learned = json.load(f)["learned"]
    d = int(learned["rho_a_dim"])
    if d == 0:
        return np.array([])
    flat = np.array(learned["rho_a_interleaved"]).reshape(d, d, 2)
    return flat[np.arange(d), np.arange(d), 0]


def _blank(ax, message: str) -> None:
    ax.text(
        0.5, 0.5, message, transform=ax.transAxes,
        ha="center", va="center", color="0.4",
    )


def _draw_trajectory(ax, panel: PanelSpec) -> None:
    cols = read_columns(panel.input)
    t = cols.get("t", np.array([]))
    if t.size == 0:
        _blank(ax, "no trajectory data")
        return
    ax.plot(t, cols["prob"], label="coupled", color="tab:blue")
    if "prob_baseline" in cols:
        ax.plot(t, cols["prob_baseline"], label="uncoupled", color="tab:red")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="upper right")


def _draw_learning_curve(ax, panel: PanelSpec) -> None:
    cols = read_columns(panel.input)
    it = cols.get("iter", np.array([]))
    if it.size == 0:
        _blank(ax, "no learning-curve data")
        return
    names = panel.columns or ["loss", "prob"]
    for name in names:
        if name in cols:
            ax.plot(it, cols[name], label=name)
    ax.legend(loc="best")


def _draw_sweep_bars(ax, panel: PanelSpec) -> None:
    cols = read_columns(panel.input)
    n_s = cols.get("n_s", np.array([]))
    if n_s.size == 0:
        _blank(ax, "no sweep data")
        return
    names = panel.columns or ["eta_a", "gamma_a", "delta_a", "alpha"]
    x = np.arange(n_s.size)
    width = 0.8 / len(names)
    for i, name in enumerate(names):
        ax.bar(x + (i - (len(names) - 1) / 2) * width, cols[name], width, label=name)
    labels = [
        f"({int(a)},{int(b)})" for a, b in zip(n_s, cols["n_a"])
    ]
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=60, fontsize=7)
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.legend(loc="best", fontsize=8)


def _draw_ancilla_diagonal(ax, panel: PanelSpec) -> None:
    diag = read_ancilla_diagonal(panel.input)
    if diag.size == 0:
        _blank(ax, "no ancilla state")
        return
    ax.bar(np.arange(diag.size), diag, color="tab:purple")
    ax.set_xticks(np.arange(diag.size))
    ax.set_xticklabels([f"|{k}>" for k in range(diag.size)])
    ax.set_ylim(0.0, 1.05)


_DRAWERS = {
    "trajectory": _draw_trajectory,
    "learning_curve": _draw_learning_curve,
    "sweep_bars": _draw_sweep_bars,
    "ancilla_diagonal": _draw_ancilla_diagonal,
}


def render(spec: FigureSpec, out_dir: str | Path) -> Path:
    """Draw every panel of the spec and write one PNG into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = len(spec.panels)
    ncols = min(spec.ncols, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(5.2 * ncols, 3.6 * nrows), squeeze=False
    )
    flat = axes.ravel()
    for ax in flat[n:]:
        ax.set_visible(False)
    for ax, panel in zip(flat, spec.panels):
        _DRAWERS[panel.kind](ax, panel)
        if panel.title:
            ax.set_title(panel.title, fontsize=10)
        if panel.xlabel:
            ax.set_xlabel(panel.xlabel)
        if panel.ylabel:
            ax.set_ylabel(panel.ylabel)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    out_path = out_dir / spec.output
    fig.savefig(out_path, dpi=120, metadata=PNG_METADATA)
    plt.close(fig)
    return out_path
