"""Finite-dimensional convex relaxation of the alignment objective.

With the costs taken equal to the kernels, the relaxed objective over a
pair of coefficient matrices (``f`` of shape m x n, ``b`` of shape n x m)
is a convex quadratic built from the kernel Gram matrices and their 1/2 and
3/2 powers::

    c0 = (1/(m n)) * || KY b KX - KY f' KX ||^2
    m1 = || (1/m) KX^{3/2} f KY^{1/2} - (1/n) KX^{1/2} b' KY^{3/2} ||^2
    m2 = || KX^{1/2} ((1/m) 1_m - b' KY (1/n) 1_n) ||^2
    m3 = || KY^{1/2} ((1/n) 1_n - f' KX (1/m) 1_m) ||^2

    total = c0 + w1 * m1 + w2 * m2 + w3 * m3

(`'` is transpose, norms are Frobenius). The minimum of this program lower
bounds the minimum of the trained Lagrangian on the same data.

The solver follows conjugate-gradient descent directions with an exact
quadratic line step, each step safeguarded by Armijo backtracking (halving,
slope factor 1e-4), and stops on a relative gradient-norm rule; convexity
makes the stopping point globally optimal up to the tolerance, and the
reached total is independent of the starting point. Plain steepest descent
stalls on the stiff large-multiplier problems (the Gram-matrix powers make
the quadratic badly conditioned), which is why the directions are
conjugated; for a quadratic this is exactly linear CG and terminates in at
most one step per variable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError
from .linalg import frobenius_norm, psd_power


@dataclass(frozen=True)
class ConvexVars:
    """The pair of decision matrices."""

    f: np.ndarray  # (m, n)
    b: np.ndarray  # (n, m)


@dataclass(frozen=True)
class ConvexBreakdown:
    c0: float
    m1: float
    m2: float
    m3: float
    total: float

    def to_dict(self) -> dict:
        return {"c0": self.c0, "m1": self.m1, "m2": self.m2, "m3": self.m3, "omega": self.total}


@dataclass(frozen=True)
class ConvexProblem:
    """Kernel matrices, their precomputed powers, and the multipliers."""

    kx: np.ndarray
    ky: np.ndarray
    kx_half: np.ndarray
    kx_3half: np.ndarray
    ky_half: np.ndarray
    ky_3half: np.ndarray
    lambda1: float
    lambda2: float
    lambda3: float

    @property
    def m(self) -> int:
        return self.kx.shape[0]

    @property
    def n(self) -> int:
        return self.ky.shape[0]


def build_problem(kx, ky, lambda1: float, lambda2: float, lambda3: float) -> ConvexProblem:
    """Precompute the matrix powers once; multipliers must be nonnegative."""
    if min(lambda1, lambda2, lambda3) < 0:
        raise DimensionError("multipliers must be nonnegative")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    return ConvexProblem(
        kx=kx,
        ky=ky,
        kx_half=psd_power(kx, 0.5),
        kx_3half=psd_power(kx, 1.5),
        ky_half=psd_power(ky, 0.5),
        ky_3half=psd_power(ky, 1.5),
        lambda1=lambda1,
        lambda2=lambda2,
        lambda3=lambda3,
    )


def _check_vars(prob: ConvexProblem, vars_: ConvexVars) -> None:
    if vars_.f.shape != (prob.m, prob.n) or vars_.b.shape != (prob.n, prob.m):
        raise DimensionError(
            f"variable shapes {vars_.f.shape}, {vars_.b.shape} do not match data sizes "
            f"({prob.m}, {prob.n})"
        )


def _residuals(prob: ConvexProblem, vars_: ConvexVars, homogeneous: bool = False):
    """Residuals of the four quadratic terms.

    With ``homogeneous=True`` the constant (variable-free) parts are
    dropped, which turns the affine residual map into its linear part; the
    gradient formulas applied to these residuals then yield an exact
    Hessian-vector product.
    """
    f, b = vars_.f, vars_.b
    m, n = prob.m, prob.n
    u = np.full(m, 1.0 / m)
    v = np.full(n, 1.0 / n)
    r0 = prob.ky @ b @ prob.kx - prob.ky @ f.T @ prob.kx
    r1 = (1.0 / m) * prob.kx_3half @ f @ prob.ky_half - (1.0 / n) * prob.kx_half @ b.T @ prob.ky_3half
    r2 = -(b.T @ prob.ky @ v)
    r3 = -(f.T @ prob.kx @ u)
    if not homogeneous:
        r2 = u + r2
        r3 = v + r3
    return r0, r1, r2, r3, u, v


def objective(prob: ConvexProblem, vars_: ConvexVars) -> ConvexBreakdown:
    """Evaluate every term and the weighted total."""
    _check_vars(prob, vars_)
    r0, r1, r2, r3, _, _ = _residuals(prob, vars_)
    c0 = float(np.sum(r0 * r0)) / (prob.m * prob.n)
    m1 = float(np.sum(r1 * r1))
    q2 = prob.kx_half @ r2
    q3 = prob.ky_half @ r3
    m2 = float(q2 @ q2)
    m3 = float(q3 @ q3)
    total = c0 + prob.lambda1 * m1 + prob.lambda2 * m2 + prob.lambda3 * m3
    return ConvexBreakdown(c0=c0, m1=m1, m2=m2, m3=m3, total=total)


def _gradient_from_residuals(prob: ConvexProblem, r0, r1, r2, r3, u, v) -> ConvexVars:
    m, n = prob.m, prob.n
    scale0 = 2.0 / (m * n)
    g_f = -scale0 * prob.kx @ r0.T @ prob.ky
    g_b = scale0 * prob.ky @ r0 @ prob.kx
    g_f += prob.lambda1 * (2.0 / m) * prob.kx_3half @ r1 @ prob.ky_half
    g_b += prob.lambda1 * (-2.0 / n) * prob.ky_3half @ r1.T @ prob.kx_half
    g_b += prob.lambda2 * (-2.0) * np.outer(prob.ky @ v, prob.kx_half @ (prob.kx_half @ r2))
    g_f += prob.lambda3 * (-2.0) * np.outer(prob.kx @ u, prob.ky_half @ (prob.ky_half @ r3))
    return ConvexVars(f=g_f, b=g_b)


def gradient(prob: ConvexProblem, vars_: ConvexVars) -> ConvexVars:
    """Exact gradient of the total with respect to both matrices."""
    _check_vars(prob, vars_)
    return _gradient_from_residuals(prob, *_residuals(prob, vars_))


def hessian_vector(prob: ConvexProblem, direction: ConvexVars) -> ConvexVars:
    """Exact Hessian-vector product of the quadratic objective."""
    _check_vars(prob, direction)
    return _gradient_from_residuals(prob, *_residuals(prob, direction, homogeneous=True))


def zero_vars(prob: ConvexProblem) -> ConvexVars:
    return ConvexVars(f=np.zeros((prob.m, prob.n)), b=np.zeros((prob.n, prob.m)))


def _dot(a: ConvexVars, b: ConvexVars) -> float:
    return float(np.sum(a.f * b.f) + np.sum(a.b * b.b))


def minimize(
    prob: ConvexProblem,
    init: ConvexVars | None = None,
    tol: float = 1e-7,
    max_iters: int = 50_000,
) -> tuple[ConvexVars, ConvexBreakdown, int]:
    """Minimize the convex quadratic from ``init`` (zeros by default).

    Conjugate-gradient (Polak-Ribiere, restarted) directions; the step along
    each direction is the quadratic's exact minimizer, accepted through an
    Armijo backtracking safeguard. Stops when
    ``||grad||_F <= tol * max(1, |total|)``; exceeding ``max_iters`` raises
    :class:`ConvergenceError` with the final gradient norm.
    """
    if not tol > 0:
        raise DimensionError("tol must be positive")
    z = init if init is not None else zero_vars(prob)
    _check_vars(prob, z)
    f, b = z.f.copy(), z.b.copy()
    value = objective(prob, ConvexVars(f, b)).total
    g = gradient(prob, ConvexVars(f, b))
    d = ConvexVars(-g.f, -g.b)
    for it in range(max_iters):
        gnorm_sq = _dot(g, g)
        gnorm = np.sqrt(gnorm_sq)
        if gnorm <= tol * max(1.0, abs(value)):
            return ConvexVars(f, b), objective(prob, ConvexVars(f, b)), it
        slope = _dot(g, d)
        if slope >= 0.0:  # conjugacy lost to rounding; restart on steepest descent
            d = ConvexVars(-g.f, -g.b)
            slope = -gnorm_sq
        hd = hessian_vector(prob, d)
        curvature = _dot(d, hd)
        step = 1.0 if curvature <= 0.0 else -slope / curvature
        # The Armijo check cannot resolve decreases below the floating-point
        # granularity of the value; skipping it there keeps the conjugate
        # directions intact instead of degrading them with halved steps.
        resolvable = 1e-4 * step * (-slope) > 4e-16 * max(1.0, abs(value))
        if resolvable:
            while True:
                trial = ConvexVars(f + step * d.f, b + step * d.b)
                trial_value = objective(prob, trial).total
                if trial_value <= value + 1e-4 * step * slope:
                    break
                step *= 0.5
                if step < 1e-300:
                    # Gradient is at its floating-point floor; the point is
                    # optimal to working precision.
                    return ConvexVars(f, b), objective(prob, ConvexVars(f, b)), it
        else:
            trial = ConvexVars(f + step * d.f, b + step * d.b)
            trial_value = objective(prob, trial).total
        f, b = trial.f, trial.b
        value = trial_value
        g_new = gradient(prob, ConvexVars(f, b))
        # Polak-Ribiere with automatic restart (beta clipped at 0).
        beta = max(0.0, (_dot(g_new, g_new) - _dot(g_new, g)) / gnorm_sq)
        d = ConvexVars(-g_new.f + beta * d.f, -g_new.b + beta * d.b)
        g = g_new
    gnorm = float(np.sqrt(_dot(g, g)))
    raise ConvergenceError(
        f"no convergence in {max_iters} iterations (gradient norm {gnorm:.3e})",
        residual=gnorm,
    )
