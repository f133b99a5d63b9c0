"""Dependency-free static SVG charts: scatters and line charts.

Output is deterministic (no timestamps or generated ids). Data markers are
``<circle>`` elements; axes, reference lines, and series are ``<line>`` and
``<polyline>`` elements, so markers can be counted and parsed back from the
file.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

_COLORS = ("#1f6fb2", "#d1495b", "#3a9d5d", "#8d6cab", "#c98a2b", "#4f5d75")

WIDTH = 640
HEIGHT = 480
MARGIN = 56


def _ranges(xs: np.ndarray, ys: np.ndarray, square: bool) -> tuple[float, float, float, float]:
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if square:
        lo, hi = min(x0, y0), max(x1, y1)
        x0 = y0 = lo
        x1 = y1 = hi
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad_x = 0.05 * (x1 - x0)
    pad_y = 0.05 * (y1 - y0)
    return x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y


class _Canvas:
    def __init__(self, x0, x1, y0, y1, width=WIDTH, height=HEIGHT):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.width, self.height = width, height
        self.parts: list[str] = []

    def px(self, x: float) -> float:
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (self.width - 2 * MARGIN)

    def py(self, y: float) -> float:
        return self.height - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (self.height - 2 * MARGIN)

    def frame(self):
        l, r = MARGIN, self.width - MARGIN
        t, b = MARGIN, self.height - MARGIN
        self.parts.append(
            f'<rect x="{l}" y="{t}" width="{r - l}" height="{b - t}" fill="none" stroke="#444" stroke-width="1"/>'
        )
        for frac in (0.0, 0.5, 1.0):
            xv = self.x0 + frac * (self.x1 - self.x0)
            yv = self.y0 + frac * (self.y1 - self.y0)
            self.parts.append(
                f'<text x="{self.px(xv):.2f}" y="{b + 18:.2f}" font-size="11" text-anchor="middle" fill="#444">{xv:.3g}</text>'
            )
            self.parts.append(
                f'<text x="{l - 6:.2f}" y="{self.py(yv) + 4:.2f}" font-size="11" text-anchor="end" fill="#444">{yv:.3g}</text>'
            )

    def circle(self, x: float, y: float, color: str, radius: float = 3.0):
        self.parts.append(
            f'<circle cx="{self.px(x):.3f}" cy="{self.py(y):.3f}" r="{radius}" fill="{color}" fill-opacity="0.75"/>'
        )

    def polyline(self, xs, ys, color: str):
        pts = " ".join(f"{self.px(x):.3f},{self.py(y):.3f}" for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    def diagonal(self):
        lo = max(self.x0, self.y0)
        hi = min(self.x1, self.y1)
        self.parts.append(
            f'<line x1="{self.px(lo):.3f}" y1="{self.py(lo):.3f}" x2="{self.px(hi):.3f}" y2="{self.py(hi):.3f}" '
            'stroke="#888" stroke-width="1" stroke-dasharray="5,4"/>'
        )

    def label(self, text: str, slot: int, color: str):
        y = MARGIN + 16 + 16 * slot
        self.parts.append(
            f'<text x="{self.width - MARGIN - 8}" y="{y}" font-size="12" text-anchor="end" fill="{color}">{text}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n<rect width="100%" height="100%" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def scatter_svg(clouds: list[tuple[np.ndarray, str]], path, diagonal: bool = False) -> None:
    """Scatter one or more labelled 2-d clouds; one marker per point.

    ``diagonal=True`` forces a square shared range and draws the y = x
    reference line (cost-alignment style).
    """
    if not clouds:
        raise DimensionError("nothing to plot")
    all_pts = np.vstack([np.asarray(c, dtype=float) for c, _ in clouds])
    if all_pts.ndim != 2 or all_pts.shape[1] != 2 or all_pts.shape[0] == 0:
        raise DimensionError("scatter needs non-empty (n, 2) clouds")
    canvas = _Canvas(*_ranges(all_pts[:, 0], all_pts[:, 1], square=diagonal))
    canvas.frame()
    if diagonal:
        canvas.diagonal()
    for k, (cloud, name) in enumerate(clouds):
        color = _COLORS[k % len(_COLORS)]
        for x, y in np.asarray(cloud, dtype=float):
            canvas.circle(x, y, color)
        if name:
            canvas.label(name, k, color)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canvas.render())


def line_chart_svg(series: list[tuple[np.ndarray, np.ndarray, str]], path) -> None:
    """Line chart of one or more (x, y, label) series."""
    if not series or any(len(xs) == 0 for xs, _, _ in series):
        raise DimensionError("nothing to plot")
    all_x = np.concatenate([np.asarray(xs, dtype=float) for xs, _, _ in series])
    all_y = np.concatenate([np.asarray(ys, dtype=float) for _, ys, _ in series])
    canvas = _Canvas(*_ranges(all_x, all_y, square=False))
    canvas.frame()
    for k, (xs, ys, name) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        canvas.polyline(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), color)
        if name:
            canvas.label(name, k, color)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canvas.render())
