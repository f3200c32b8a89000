"""Turn zenomem sweep CSVs into figures.

No physics is recomputed here: the CSV files written by `zenomem run` are
the whole interface. fig2-style input plots the logical error probabilities
against storage time, one color per measurement frequency with p_X solid,
p_Y dashed and p_Z dotted; fig3-style input plots lifetime against
frequency, one curve per measurement weakness zeta.

Rendering is deterministic: identical CSV bytes give identical image bytes
(fixed style ids, no date stamps), and the sha256 of the CSV's comment
header is recorded in the figure metadata so an image can be traced back
to the run that produced it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "zenoplots"

import matplotlib.pyplot as plt

FIG2_COLUMNS = (
    "f", "tau",
    "p_X", "p_X_stderr", "p_Y", "p_Y_stderr", "p_Z", "p_Z_stderr",
    "F",
)
FIG3_COLUMNS = ("zeta", "f", "lifetime", "crossed_flag")

_EXPECTED = {"fig2": FIG2_COLUMNS, "fig3": FIG3_COLUMNS}
_DEFAULT_SCALES = {"fig2": ("linear", "linear"), "fig3": ("log", "log")}

# (column, matplotlib linestyle) in draw order.
FIG2_STYLES = (("p_X", "-"), ("p_Y", "--"), ("p_Z", ":"))


class SchemaError(ValueError):
    """CSV does not match the zenomem output schema for the figure kind."""


@dataclass(frozen=True)
class FigureSpec:
    """What to read, which figure to draw, where to write it."""

    csv_path: Union[str, Path]
    kind: str
    out_path: Union[str, Path]
    x_scale: Optional[str] = None
    y_scale: Optional[str] = None

    def __post_init__(self):
        if self.kind not in _EXPECTED:
            raise ValueError(f"kind must be fig2 or fig3, got {self.kind!r}")
        for scale in (self.x_scale, self.y_scale):
            if scale is not None and scale not in ("linear", "log"):
                raise ValueError(f"axis scale must be linear or log, got {scale!r}")

    def scales(self) -> tuple[str, str]:
        default_x, default_y = _DEFAULT_SCALES[self.kind]
        return self.x_scale or default_x, self.y_scale or default_y


@dataclass(frozen=True)
class Table:
    """Parsed CSV: comment header, columns, float rows, header fingerprint."""

    header: tuple[str, ...]
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    header_sha256: str


def load_table(csv_path: Union[str, Path], kind: str) -> Table:
    """Read and validate a zenomem CSV against the schema for ``kind``."""
    expected = _EXPECTED.get(kind)
    if expected is None:
        raise ValueError(f"kind must be fig2 or fig3, got {kind!r}")
    lines = Path(csv_path).read_text(encoding="utf-8").splitlines()
    header = tuple(ln for ln in lines if ln.startswith("#"))
    body = [ln for ln in lines if not ln.startswith("#") and ln.strip()]
    if not body:
        raise SchemaError(f"{csv_path}: no column row found")
    columns = tuple(body[0].split(","))
    if columns != expected:
        raise SchemaError(
            f"{csv_path}: column mismatch for {kind}: expected "
            f"{','.join(expected)} but found {','.join(columns)}"
        )
    rows = []
    for idx, line in enumerate(body[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise SchemaError(
                f"{csv_path}: row {idx} has {len(cells)} cells, expected {len(columns)}"
            )
        try:
            rows.append({c: float(v) for c, v in zip(columns, cells)})
        except ValueError as exc:
            raise SchemaError(f"{csv_path}: row {idx} is not numeric: {exc}") from exc
    if not rows:
        raise SchemaError(f"{csv_path}: no data rows")
    sha = hashlib.sha256("\n".join(header).encode("utf-8")).hexdigest()
    return Table(header=header, columns=columns, rows=tuple(rows), header_sha256=sha)


def _grouped(rows, key):
    groups: dict[float, list] = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return groups


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure for ``spec``; returns (figure, metadata).

    Split from :func:`render` so the drawn lines can be inspected without
    touching the filesystem.
    """
    table = load_table(spec.csv_path, spec.kind)
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        if spec.kind == "fig2":
            for gi, (f, rows) in enumerate(_grouped(table.rows, "f").items()):
                color = colors[gi % len(colors)]
                taus = [r["tau"] for r in rows]
                for name, style in FIG2_STYLES:
                    ax.plot(
                        taus,
                        [r[name] for r in rows],
                        linestyle=style,
                        color=color,
                        label=f"f={f:g}" if name == "p_X" else None,
                    )
            ax.set_xlabel("storage time tau")
            ax.set_ylabel("logical error probability")
            ax.legend(title="p_X solid, p_Y dashed, p_Z dotted")
        else:
            for zeta, rows in _grouped(table.rows, "zeta").items():
                ax.plot(
                    [r["f"] for r in rows],
                    [r["lifetime"] for r in rows],
                    marker="o",
                    label=f"zeta={zeta:g}",
                )
            ax.set_xlabel("measurement frequency f")
            ax.set_ylabel("lifetime")
            ax.legend()
        x_scale, y_scale = spec.scales()
        ax.set_xscale(x_scale)
        ax.set_yscale(y_scale)
    except Exception:
        plt.close(fig)
        raise
    metadata = {"Description": f"csv-header-sha256={table.header_sha256}"}
    return fig, metadata


def render(spec: FigureSpec) -> Path:
    """Draw ``spec`` and write the image file; returns the output path.

    Validation happens before anything is written, so a schema error never
    leaves a file behind. SVG output carries no date stamp.
    """
    fig, metadata = build_figure(spec)
    out = Path(spec.out_path)
    if out.suffix.lower() == ".svg":
        metadata = {"Date": None, **metadata}
    try:
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return out
