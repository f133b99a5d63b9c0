"""Dense symmetric linear algebra primitives.

Symmetric eigendecomposition is delegated to LAPACK (``numpy.linalg.eigh``),
which is deterministic for a given build and adequate well past the problem
sizes used here. Matrix powers clamp small negative eigenvalues, separating
rounding noise from genuinely indefinite input.
"""

import numpy as np

from .errors import DimensionError, NotPsdError

# Relative asymmetry tolerated before an input is rejected.
SYMMETRY_RTOL = 1e-10
# Eigenvalues in [-PSD_CLAMP_RTOL * ||A||_op, 0) are clamped to zero;
# anything below raises NotPsdError.
PSD_CLAMP_RTOL = 1e-6


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    a = np.asarray(a, dtype=float)
    return float(np.sqrt(np.sum(a * a)))


def check_symmetric(a) -> np.ndarray:
    """Validate that ``a`` is square and symmetric; return it as float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if float(np.abs(a - a.T).max(initial=0.0)) > SYMMETRY_RTOL * scale:
        raise DimensionError("matrix is not symmetric within tolerance")
    return a


def sym_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and
    orthonormal eigenvectors in the matching columns of ``v``, so that
    ``a == v @ diag(w) @ v.T`` up to rounding.
    """
    a = check_symmetric(a)
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    order = np.argsort(w, kind="stable")[::-1]
    return w[order], v[:, order]


def psd_power(a, p: float) -> np.ndarray:
    """Matrix power ``a**p`` of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues below ``-1e-6 * ||a||_op`` raise :class:`NotPsdError`;
    negative values above that threshold are treated as rounding noise and
    clamped to zero before powering. The result is exactly symmetric.
    """
    w, v = sym_eig(a)
    op_norm = float(np.abs(w).max(initial=0.0))
    w_min = float(w.min(initial=0.0))
    if w_min < -PSD_CLAMP_RTOL * op_norm:
        raise NotPsdError(
            f"matrix has eigenvalue {w_min:.3e}, below the PSD clamp threshold "
            f"{-PSD_CLAMP_RTOL * op_norm:.3e}"
        )
    w = np.clip(w, 0.0, None)
    r = (v * w**p) @ v.T
    return 0.5 * (r + r.T)
