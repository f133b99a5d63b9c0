"""Discrepancies between empirical measures: squared MMD and Sinkhorn.

Squared MMD uses the three-term closed form on uniform empirical measures.
Rounding can push it a hair negative; values are clamped at the -1e-12
reporting floor so anything below that signals a logic error rather than
noise.

Entropic optimal transport runs Sinkhorn iterations in the log domain so
that regularization as small as 1e-4 survives. The transport value uses the
relative-entropy convention, i.e. the entropy of the coupling is measured
against the product of the uniform marginals::

    value = sum_ij g_ij * (c_ij + eps * log(g_ij * m * n))

which makes the one-point value exactly the cost. This convention shifts
values by an additive constant relative to a raw ``eps * log(g_ij)`` term
but does not change optimizers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError
from .kernels import KernelSpec, gram
from .measures import as_points

MMD_FLOOR = -1e-12


@dataclass(frozen=True)
class SinkhornConfig:
    """Entropic OT settings: regularization, iteration cap, marginal tolerance."""

    epsilon: float
    max_iterations: int = 10_000
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DimensionError("epsilon must be positive")
        if not self.tolerance > 0:
            raise DimensionError("tolerance must be positive")


def mmd2(kernel: KernelSpec, p, q) -> float:
    """Squared maximum mean discrepancy between uniform empirical measures.

    Closed form: mean of the P-P Gram plus mean of the Q-Q Gram minus twice
    the mean of the cross Gram.
    """
    pp, qq = as_points(p), as_points(q)
    value = (
        float(np.mean(gram(kernel, pp, pp)))
        + float(np.mean(gram(kernel, qq, qq)))
        - 2.0 * float(np.mean(gram(kernel, pp, qq)))
    )
    return max(value, MMD_FLOOR)


def mmd2_product(kernel_x: KernelSpec, kernel_y: KernelSpec, p, q) -> float:
    """Squared MMD under the product-space kernel KX((x,x')) * KY((y,y')).

    ``p`` and ``q`` are pairs ``(x_points, y_points)`` of parallel arrays
    holding the two components of each product-space point.
    """
    px, py = (as_points(c) for c in p)
    qx, qy = (as_points(c) for c in q)
    if px.shape[0] != py.shape[0] or qx.shape[0] != qy.shape[0]:
        raise DimensionError("product-point components differ in length")
    value = (
        float(np.mean(gram(kernel_x, px, px) * gram(kernel_y, py, py)))
        + float(np.mean(gram(kernel_x, qx, qx) * gram(kernel_y, qy, qy)))
        - 2.0 * float(np.mean(gram(kernel_x, px, qx) * gram(kernel_y, py, qy)))
    )
    return max(value, MMD_FLOOR)


def _logsumexp(z: np.ndarray, axis: int) -> np.ndarray:
    zmax = np.max(z, axis=axis, keepdims=True)
    out = zmax + np.log(np.sum(np.exp(z - zmax), axis=axis, keepdims=True))
    return np.squeeze(out, axis=axis)


def entropic_ot(cost, cfg: SinkhornConfig) -> tuple[float, np.ndarray]:
    """Entropic OT between uniform measures with a precomputed cost matrix.

    Returns ``(value, coupling)``. The coupling's row sums are 1/m and
    column sums 1/n within ``cfg.tolerance`` (L1 violation); failure to get
    there within ``cfg.max_iterations`` raises :class:`ConvergenceError`
    carrying the final violation.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2:
        raise DimensionError(f"cost must be a matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise DimensionError("cost matrix contains non-finite entries")
    m, n = c.shape
    eps = cfg.epsilon
    log_a = -np.log(m)
    log_b = -np.log(n)
    g = np.zeros(n)
    plan = np.full((m, n), 1.0 / (m * n))
    err = float("inf")
    for _ in range(cfg.max_iterations):
        f = -eps * _logsumexp((g[None, :] - c) / eps + log_b, axis=1)
        g = -eps * _logsumexp((f[:, None] - c) / eps + log_a, axis=0)
        log_plan = (f[:, None] + g[None, :] - c) / eps + log_a + log_b
        plan = np.exp(log_plan)
        err = float(np.abs(plan.sum(axis=1) - 1.0 / m).sum() + np.abs(plan.sum(axis=0) - 1.0 / n).sum())
        if err < cfg.tolerance:
            break
    else:
        raise ConvergenceError(
            f"Sinkhorn did not reach marginal tolerance {cfg.tolerance:g} "
            f"in {cfg.max_iterations} iterations (violation {err:.3e})",
            residual=err,
        )
    value = float(np.sum(plan * (c + eps * (np.log(plan) + np.log(m * n)))))
    return value, plan


def sqeuclidean_cost(p, q) -> np.ndarray:
    """Pairwise squared Euclidean distances between two point clouds."""
    pp, qq = as_points(p), as_points(q)
    if pp.shape[1] != qq.shape[1]:
        raise DimensionError(f"point dimensions differ: {pp.shape[1]} vs {qq.shape[1]}")
    sq = (pp * pp).sum(axis=1)[:, None] + (qq * qq).sum(axis=1)[None, :] - 2.0 * (pp @ qq.T)
    return np.clip(sq, 0.0, None)


def sinkhorn_divergence(p, q, cfg: SinkhornConfig) -> float:
    """Debiased entropic OT with squared Euclidean cost.

    ``value(P, Q) - value(P, P)/2 - value(Q, Q)/2``; zero on identical
    measures and symmetric in its arguments.
    """
    pp, qq = as_points(p), as_points(q)
    v_pq, _ = entropic_ot(sqeuclidean_cost(pp, qq), cfg)
    v_pp, _ = entropic_ot(sqeuclidean_cost(pp, pp), cfg)
    v_qq, _ = entropic_ot(sqeuclidean_cost(qq, qq), cfg)
    return v_pq - 0.5 * v_pp - 0.5 * v_qq
