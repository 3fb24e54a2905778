"""Rendering of TCO ratio grids: text table, CSV, and SVG heatmap.

CSV output is lossless: axis values and cells are written with full float
precision and the shared assumptions are carried in comment lines, so
parse_grid_csv(grid_to_csv(g)) == g.  The SVG uses a diverging color
scale centered at ratio 1.0 (green favors candidate A, red favors the
baseline) with each cell annotated to two decimals.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import InfercostError
from .tco import TcoRatioGrid


def _full(x: float) -> str:
    return repr(float(x))


def grid_to_csv(grid: TcoRatioGrid) -> str:
    """Serialize a grid with enough precision to re-ingest it exactly."""
    lines = [
        f"# cost_server_b={_full(grid.cost_server_b)}",
        f"# cost_infra_b={_full(grid.cost_infra_b)}",
        f"# r_ic={_full(grid.r_ic)}",
        "r_th/r_sc," + ",".join(_full(v) for v in grid.r_sc_axis),
    ]
    for r_th, row in zip(grid.r_th_axis, grid.cells):
        lines.append(_full(r_th) + "," + ",".join(_full(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_grid_csv(text: str, source: str = "<grid>") -> TcoRatioGrid:
    """Inverse of grid_to_csv."""
    assumptions = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                assumptions[key.strip()] = value.strip()
            continue
        rows.append((lineno, line.split(",")))
    missing = {"cost_server_b", "cost_infra_b", "r_ic"} - set(assumptions)
    if missing:
        raise InfercostError(f"{source}: missing assumption comments: {sorted(missing)}")
    if not rows:
        raise InfercostError(f"{source}: no grid rows found")

    def fval(s: str, lineno: int) -> float:
        try:
            return float(s)
        except ValueError:
            raise InfercostError(f"{source}:{lineno}: not a number: {s!r}") from None

    header_lineno, header = rows[0]
    if not header or header[0] != "r_th/r_sc":
        raise InfercostError(f"{source}:{header_lineno}: first cell must be 'r_th/r_sc'")
    r_sc_axis = [fval(v, header_lineno) for v in header[1:]]
    r_th_axis = []
    cells = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise InfercostError(f"{source}:{lineno}: expected {len(header)} fields")
        r_th_axis.append(fval(row[0], lineno))
        cells.append(tuple(fval(v, lineno) for v in row[1:]))
    return TcoRatioGrid(
        r_sc_axis=tuple(r_sc_axis),
        r_th_axis=tuple(r_th_axis),
        cells=tuple(cells),
        cost_server_b=fval(assumptions["cost_server_b"], 0),
        cost_infra_b=fval(assumptions["cost_infra_b"], 0),
        r_ic=fval(assumptions["r_ic"], 0),
    )


def grid_to_text(grid: TcoRatioGrid) -> str:
    """Fixed-width table with R_Th rows and R_SC columns."""
    header = ["r_th\\r_sc"] + [f"{v:g}" for v in grid.r_sc_axis]
    body = [
        [f"{r_th:g}"] + [f"{cell:.4f}" for cell in row]
        for r_th, row in zip(grid.r_th_axis, grid.cells)
    ]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    def fmt(line):
        return "  ".join(cell.rjust(w) for cell, w in zip(line, widths))
    return "\n".join([fmt(header)] + [fmt(line) for line in body]) + "\n"


def _cell_color(ratio: float) -> str:
    """Diverging scale: green below 1.0, white at 1.0, red above."""
    lo, hi = 0.5, 2.0
    r = min(max(ratio, lo), hi)
    if r <= 1.0:
        t = (1.0 - r) / (1.0 - lo)  # 0 at ratio 1, 1 at ratio 0.5
        rgb = (int(255 - 155 * t), 255, int(255 - 155 * t))
    else:
        t = (r - 1.0) / (hi - 1.0)
        rgb = (255, int(255 - 155 * t), int(255 - 155 * t))
    return "#%02x%02x%02x" % rgb


CELL = 72
MARGIN_LEFT = 84
MARGIN_TOP = 46
MARGIN_BOTTOM = 16


def grid_to_svg(grid: TcoRatioGrid) -> str:
    """One rectangle per cell, axis labels, annotations to two decimals."""
    ncols = len(grid.r_sc_axis)
    nrows = len(grid.r_th_axis)
    width = MARGIN_LEFT + ncols * CELL + 16
    height = MARGIN_TOP + nrows * CELL + MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<text x="{MARGIN_LEFT + ncols * CELL / 2:.1f}" y="16" '
        f'text-anchor="middle">fleet cost ratio (A/B); r_sc along top, r_th down side</text>',
    ]
    for j, r_sc in enumerate(grid.r_sc_axis):
        x = MARGIN_LEFT + j * CELL + CELL / 2
        parts.append(
            f'<text x="{x:.1f}" y="{MARGIN_TOP - 8}" text-anchor="middle">{escape(f"{r_sc:g}")}</text>'
        )
    for i, r_th in enumerate(grid.r_th_axis):
        y = MARGIN_TOP + i * CELL + CELL / 2
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.1f}" text-anchor="end">{escape(f"{r_th:g}")}</text>'
        )
    for i, row in enumerate(grid.cells):
        for j, ratio in enumerate(row):
            x = MARGIN_LEFT + j * CELL
            y = MARGIN_TOP + i * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{_cell_color(ratio)}" stroke="#444" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{x + CELL / 2:.1f}" y="{y + CELL / 2 + 4:.1f}" '
                f'text-anchor="middle">{ratio:.2f}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_grid(grid: TcoRatioGrid, kind: str) -> str:
    """Dispatch on output kind: 'text', 'csv' or 'svg'."""
    if kind == "text":
        return grid_to_text(grid)
    if kind == "csv":
        return grid_to_csv(grid)
    if kind == "svg":
        return grid_to_svg(grid)
    raise InfercostError(f"unknown grid output kind {kind!r}; use text, csv or svg")
