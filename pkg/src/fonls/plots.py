"""Self-contained SVG line charts from CSV time series.

No external renderer: the SVG is assembled from fixed-precision strings, so
identical input bytes produce identical output bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

_WIDTH, _HEIGHT = 720, 420
_MARGIN = 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f")


def _read_csv(path) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one data row")
    header = rows[0]
    columns = [[] for _ in header]
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}: line {i} has {len(row)} fields, "
                             f"expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                columns[j].append(float(cell))
            except ValueError as exc:
                raise ValueError(f"{path}: line {i}: {exc}") from None
    return header, columns


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _polyline(xs, ys, x_rng, y_rng, color) -> str:
    x0, x1 = x_rng
    y0, y1 = y_rng
    sx = (_WIDTH - 2 * _MARGIN) / ((x1 - x0) or 1.0)
    sy = (_HEIGHT - 2 * _MARGIN) / ((y1 - y0) or 1.0)
    pts = " ".join(
        f"{_fmt(_MARGIN + (x - x0) * sx)},{_fmt(_HEIGHT - _MARGIN - (y - y0) * sy)}"
        for x, y in zip(xs, ys))
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{pts}"/>')


def render_chart(header, columns) -> str:
    xs = columns[0]
    series = columns[1:]
    x_rng = (min(xs), max(xs))
    flat = [v for col in series for v in col]
    y_rng = (min(flat), max(flat))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 16}" text-anchor="middle" '
        f'font-size="13">{header[0]}</text>',
    ]
    for i, (name, col) in enumerate(zip(header[1:], series)):
        color = _COLORS[i % len(_COLORS)]
        parts.append(_polyline(xs, col, x_rng, y_rng, color))
        parts.append(
            f'<text x="{_WIDTH - _MARGIN + 4}" y="{_MARGIN + 16 * i}" '
            f'font-size="11" fill="{color}">{name}</text>')
    parts.append(
        f'<text x="{_MARGIN}" y="{_HEIGHT - _MARGIN + 16}" font-size="10">'
        f'{_fmt(x_rng[0])}</text>')
    parts.append(
        f'<text x="{_WIDTH - _MARGIN}" y="{_HEIGHT - _MARGIN + 16}" '
        f'text-anchor="end" font-size="10">{_fmt(x_rng[1])}</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def emit_plots(csv_paths, out_dir) -> list[Path]:
    """One SVG per CSV, written next to out_dir with the same stem."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for path in csv_paths:
        header, columns = _read_csv(path)
        svg = render_chart(header, columns)
        target = out_dir / (Path(path).stem + ".svg")
        target.write_text(svg)
        written.append(target)
    return written
