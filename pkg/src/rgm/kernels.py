"""Cost and kernel functions: evaluation, Gram matrices, standardization.

Supported kinds
---------------
``rbf``               exp(-||x - y||^2 / divisor)
``polynomial``        (x . y + offset) ** degree
``inner_product``     x . y
``mahalanobis_inner`` x . (M y) for a symmetric PSD matrix M
``mahalanobis``       sqrt((x - y) . M (x - y)), a distance, not PSD

An optional standardization ``(shift, scale)`` maps a raw value v to
``(v - shift) / scale``. :func:`fit_standardization` sets the shift to the
median and the scale to the population standard deviation of all n^2
pairwise raw values of a cloud with itself, self-pairs included; even-size
medians average the two middle order statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, ZeroSpreadError
from .linalg import check_symmetric
from .measures import as_points

PSD_KINDS = ("rbf", "polynomial", "inner_product", "mahalanobis_inner")
KINDS = PSD_KINDS + ("mahalanobis",)


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of a cost or kernel function."""

    kind: str
    divisor: float = 1.0
    degree: int = 2
    offset: float = 0.0
    matrix: tuple[tuple[float, ...], ...] | None = None
    standardization: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DimensionError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.divisor > 0:
            raise DimensionError("rbf divisor must be positive")
        if self.kind == "polynomial" and self.degree < 1:
            raise DimensionError("polynomial degree must be at least 1")
        if self.kind in ("mahalanobis", "mahalanobis_inner"):
            if self.matrix is None:
                raise DimensionError(f"{self.kind} requires a matrix")
            m = check_symmetric(np.asarray(self.matrix, dtype=float))
            if np.linalg.eigvalsh(m).min() < -1e-10 * max(1.0, float(np.abs(m).max())):
                raise DimensionError(f"{self.kind} matrix must be PSD")
            object.__setattr__(self, "matrix", tuple(tuple(float(x) for x in row) for row in m))
        if self.standardization is not None:
            shift, scale = self.standardization
            if not scale > 0:
                raise DimensionError("standardization scale must be positive")
            object.__setattr__(self, "standardization", (float(shift), float(scale)))

    def metric_matrix(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)


def rbf(divisor: float) -> KernelSpec:
    return KernelSpec(kind="rbf", divisor=float(divisor))


def polynomial(degree: int, offset: float) -> KernelSpec:
    return KernelSpec(kind="polynomial", degree=int(degree), offset=float(offset))


def inner_product() -> KernelSpec:
    return KernelSpec(kind="inner_product")


def mahalanobis(matrix) -> KernelSpec:
    return KernelSpec(kind="mahalanobis", matrix=tuple(map(tuple, np.asarray(matrix, float))))


def mahalanobis_inner(matrix) -> KernelSpec:
    return KernelSpec(kind="mahalanobis_inner", matrix=tuple(map(tuple, np.asarray(matrix, float))))


def _check_dims(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[1] != b.shape[1]:
        raise DimensionError(f"point dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    if spec.matrix is not None and len(spec.matrix) != a.shape[1]:
        raise DimensionError(
            f"kernel matrix is {len(spec.matrix)}x{len(spec.matrix)} but points have dim {a.shape[1]}"
        )


def _raw_gram(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if spec.kind == "rbf":
        sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
        return np.exp(-np.clip(sq, 0.0, None) / spec.divisor)
    if spec.kind == "polynomial":
        return (a @ b.T + spec.offset) ** spec.degree
    if spec.kind == "inner_product":
        return a @ b.T
    if spec.kind == "mahalanobis_inner":
        return a @ spec.metric_matrix() @ b.T
    # mahalanobis distance
    m = spec.metric_matrix()
    am = a @ m
    sq = (am * a).sum(axis=1)[:, None] + ((b @ m) * b).sum(axis=1)[None, :] - 2.0 * (am @ b.T)
    return np.sqrt(np.clip(sq, 0.0, None))


def gram(spec: KernelSpec, a, b) -> np.ndarray:
    """Pairwise matrix ``K[i, j] = eval(spec, a_i, b_j)``.

    Evaluating a cloud against itself (the same object) yields an exactly
    symmetric matrix.
    """
    pa, pb = as_points(a), as_points(b)
    _check_dims(spec, pa, pb)
    k = _raw_gram(spec, pa, pb)
    if a is b:
        k = 0.5 * (k + k.T)
    if spec.standardization is not None:
        shift, scale = spec.standardization
        k = (k - shift) / scale
    return k


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Kernel value on a single pair of vectors."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    y = np.asarray(y, dtype=float).reshape(1, -1)
    _check_dims(spec, x, y)
    k = _raw_gram(spec, x, y)[0, 0]
    if spec.standardization is not None:
        shift, scale = spec.standardization
        k = (k - shift) / scale
    return float(k)


def gram_grad(spec: KernelSpec, a, b, weights: np.ndarray) -> np.ndarray:
    """Gradient of ``sum_ij weights[i, j] * eval(spec, a_i, b_j)`` w.r.t. ``b``.

    Returns an array of shape ``b.shape``. All kinds are differentiable
    except the mahalanobis distance at coincident points, where the gradient
    of the kink is defined as 0.
    """
    pa, pb = as_points(a), as_points(b)
    _check_dims(spec, pa, pb)
    w = np.asarray(weights, dtype=float)
    if w.shape != (pa.shape[0], pb.shape[0]):
        raise DimensionError(f"weights shape {w.shape} does not match clouds {(pa.shape[0], pb.shape[0])}")

    if spec.kind == "rbf":
        k = _raw_gram(spec, pa, pb)
        m = w * k
        g = (2.0 / spec.divisor) * (m.T @ pa - m.sum(axis=0)[:, None] * pb)
    elif spec.kind == "polynomial":
        s = pa @ pb.T + spec.offset
        m = w * spec.degree * s ** (spec.degree - 1)
        g = m.T @ pa
    elif spec.kind == "inner_product":
        g = w.T @ pa
    elif spec.kind == "mahalanobis_inner":
        g = (w.T @ pa) @ spec.metric_matrix()
    else:  # mahalanobis distance
        k = _raw_gram(spec, pa, pb)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(k > 0.0, w / np.where(k > 0.0, k, 1.0), 0.0)
        g = -(z.T @ pa - z.sum(axis=0)[:, None] * pb) @ spec.metric_matrix()
    if spec.standardization is not None:
        g = g / spec.standardization[1]
    return g


def fit_standardization(spec: KernelSpec, a) -> KernelSpec:
    """Return ``spec`` with standardization fit on the cloud ``a``.

    The shift is the median and the scale the population standard deviation
    of the n^2 raw pairwise values of ``a`` with itself (self-pairs
    included). All-equal values raise :class:`ZeroSpreadError`.
    """
    pts = as_points(a)
    if pts.shape[0] < 2:
        raise DimensionError("standardization needs at least two points")
    raw_spec = replace(spec, standardization=None)
    values = gram(raw_spec, pts, pts).ravel()
    shift = float(np.median(values))
    scale = float(np.std(values))
    if scale == 0.0:
        raise ZeroSpreadError("all pairwise kernel values are equal; cannot standardize")
    return replace(spec, standardization=(shift, scale))
