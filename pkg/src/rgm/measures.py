"""Point clouds as uniform empirical measures, generators, and CSV I/O.

Grid conventions (they matter to third decimals of the lower bounds):
the segment grid includes both endpoints (linspace convention), the circle
grid starts at angle 0 and excludes the duplicate endpoint. The Gaussian
generator draws standard normals with numpy's ziggurat sampler and colors
them with the symmetric PSD square root of the covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError
from .linalg import psd_power


@dataclass(frozen=True)
class EmpiricalMeasure:
    """A uniform discrete measure: ``n`` points in ``R^dim``, weights 1/n."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionError(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[0] < 1:
            raise DimensionError("an empirical measure needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise DimensionError("points contain non-finite values")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DatasetPair:
    """Source and target empirical measures; dimensions may differ."""

    source: EmpiricalMeasure
    target: EmpiricalMeasure


def as_points(measure) -> np.ndarray:
    """Accept an EmpiricalMeasure or a raw (n, d) array; return the array."""
    if isinstance(measure, EmpiricalMeasure):
        return measure.points
    pts = np.asarray(measure, dtype=float)
    if pts.ndim != 2:
        raise DimensionError(f"expected an (n, d) point array, got shape {pts.shape}")
    return pts


def gen_gaussian(n: int, dim: int, covariance, rng: np.random.Generator) -> EmpiricalMeasure:
    """Draw ``n`` centered Gaussian points with the given covariance.

    Each point is ``root @ z`` with ``z`` standard normal (ziggurat) and
    ``root`` the symmetric PSD square root of the covariance.
    """
    if n < 1:
        raise DimensionError("need at least one sample")
    cov = np.asarray(covariance, dtype=float)
    if cov.shape != (dim, dim):
        raise DimensionError(f"covariance shape {cov.shape} does not match dim {dim}")
    root = psd_power(cov, 0.5)
    z = rng.standard_normal((n, dim))
    return EmpiricalMeasure(z @ root)


def gen_segment(n: int, start=(-1.0, -1.0), end=(1.0, 1.0)) -> EmpiricalMeasure:
    """``n`` equally spaced grid points from ``start`` to ``end``, inclusive.

    Defaults to the diagonal from (-1, -1) to (1, 1). The lower-bound
    reference experiments use the length-2 segment ``start=(-1, 0)``,
    ``end=(1, 0)`` (see README); the bound values depend on the segment's
    length through the pairwise distances.
    """
    if n < 2:
        raise DimensionError("a segment grid needs at least two points")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    if start.shape != end.shape or start.ndim != 1:
        raise DimensionError("segment endpoints must be vectors of equal dimension")
    t = np.linspace(0.0, 1.0, n)[:, None]
    return EmpiricalMeasure(start[None, :] + t * (end - start)[None, :])


def gen_circle(n: int) -> EmpiricalMeasure:
    """``n`` grid points on the unit circle at angles 2*pi*k/n, k = 0..n-1."""
    if n < 1:
        raise DimensionError("a circle grid needs at least one point")
    theta = 2.0 * np.pi * np.arange(n) / n
    return EmpiricalMeasure(np.column_stack([np.cos(theta), np.sin(theta)]))


def read_csv(path, header: bool = False) -> EmpiricalMeasure:
    """Read a point cloud from CSV, one row per point, no header by default."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if header and lines:
        lines = lines[1:]
    width = None
    for k, line in enumerate(lines):
        if line.strip() == "":
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"{path}: row {k + 1} has {len(fields)} fields, expected {width}")
        row = []
        for c, field in enumerate(fields):
            try:
                row.append(float(field))
            except ValueError:
                raise ParseError(f"{path}: row {k + 1}, column {c + 1}: not a number: {field!r}") from None
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return EmpiricalMeasure(np.array(rows, dtype=float))


def write_csv(measure, path) -> None:
    """Write a point cloud as CSV with 17 significant digits (exact round-trip)."""
    pts = as_points(measure)
    with open(path, "w", encoding="utf-8") as fh:
        for row in pts:
            fh.write(",".join(f"{x:.17g}" for x in row))
            fh.write("\n")
