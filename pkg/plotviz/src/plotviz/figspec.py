"""Figure specifications: which exported artifacts go into which panels."""

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

PANEL_KINDS = ("trajectory", "learning_curve", "sweep_bars", "ancilla_diagonal")


class SpecError(ValueError):
    """A figure spec failed validation; message names the offending key."""


@dataclass
class PanelSpec:
    kind: str
    input: Path
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    columns: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise SpecError(
                f"panel kind must be one of {PANEL_KINDS}, got {self.kind!r}"
            )


@dataclass
class FigureSpec:
    panels: list[PanelSpec]
    output: str
    title: str = ""
    ncols: int = 1

    def __post_init__(self):
        if not self.panels:
            raise SpecError("figure spec needs at least one [[panels]] entry")
        if self.ncols < 1:
            raise SpecError(f"ncols must be >= 1, got {self.ncols}")
        for panel in self.panels:
            if not panel.input.exists():
                raise SpecError(f"panel input does not exist: {panel.input}")


def load_spec(path: str | Path) -> FigureSpec:
    """Parse a TOML figure spec; panel input paths are resolved relative to
    the spec file."""
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise SpecError(f"{path}: {e}") from e

    raw_panels = data.get("panels", [])
    if not isinstance(raw_panels, list):
        raise SpecError("[[panels]] must be an array of tables")
    panels = []
    for i, raw in enumerate(raw_panels):
        try:
            panels.append(
                PanelSpec(
                    kind=raw.get("kind", ""),
                    input=(path.parent / raw["input"]).resolve(),
                    title=str(raw.get("title", "")),
                    xlabel=str(raw.get("xlabel", "")),
                    ylabel=str(raw.get("ylabel", "")),
                    columns=[str(c) for c in raw.get("columns", [])],
                )
            )
        except KeyError as e:
            raise SpecError(f"panels[{i}] is missing key {e}") from None
    output = data.get("output")
    if not output:
        raise SpecError("'output' (image file name) is required")
    return FigureSpec(
        panels=panels,
        output=str(output),
        title=str(data.get("title", "")),
        ncols=int(data.get("ncols", 1)),
    )
