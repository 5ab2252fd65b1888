"""
Small dense Hermitian eigensolvers.

Closed form for 2x2 matrices and a cyclic Jacobi rotation solver for the
d x d marginals of qudit states. Neither depends on LAPACK, so results are
reproducible bit-for-bit across platforms.
"""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from app.core.config import settings

logger = logging.getLogger(__name__)


class Eigh2(NamedTuple):
    """Eigen-decomposition of a 2x2 Hermitian matrix, smaller eigenvalue first."""

    lambda_small: float
    lambda_large: float
    v_small: np.ndarray
    v_large: np.ndarray
    degenerate: bool


def fix_phase(vector: np.ndarray, threshold: Optional[float] = None) -> np.ndarray:
    """
    Rotate the global phase so the first component with modulus above
    `threshold` is real and nonnegative.
    """
    threshold = settings.phase_threshold if threshold is None else threshold
    for component in vector:
        modulus = abs(component)
        if modulus > threshold:
            return vector * (np.conj(component) / modulus)
    return vector


def eigh_2x2(matrix: np.ndarray) -> Eigh2:
    """
    Closed-form eigen-decomposition of a 2x2 Hermitian matrix.

    lambda = tr/2 +- sqrt((m00 - m11)^2 / 4 + |m01|^2)

    At degeneracy (gap below settings.degeneracy_tolerance) the canonical
    basis (|0>, |1>) is returned and the degenerate flag is set.
    """
    m00 = float(np.real(matrix[0, 0]))
    m11 = float(np.real(matrix[1, 1]))
    m01 = complex(matrix[0, 1])
    m10 = np.conj(m01)

    half_trace = 0.5 * (m00 + m11)
    radius = math.sqrt(0.25 * (m00 - m11) ** 2 + abs(m01) ** 2)
    lambda_small = half_trace - radius
    lambda_large = half_trace + radius

    if radius <= settings.degeneracy_tolerance:
        e0 = np.array([1.0, 0.0], dtype=complex)
        e1 = np.array([0.0, 1.0], dtype=complex)
        return Eigh2(half_trace, half_trace, e0, e1, True)

    # Solve the row with the larger pivot for the large eigenvector
    if m00 >= m11:
        v_large = np.array([lambda_large - m11, m10], dtype=complex)
    else:
        v_large = np.array([m01, lambda_large - m00], dtype=complex)
    v_large = v_large / np.linalg.norm(v_large)

    # Orthogonal complement
    v_small = np.array([-np.conj(v_large[1]), np.conj(v_large[0])], dtype=complex)

    return Eigh2(
        lambda_small,
        lambda_large,
        fix_phase(v_small),
        fix_phase(v_large),
        False,
    )


def _rotate(a: np.ndarray, p: int, q: int) -> None:
    """Apply one Jacobi rotation in place, zeroing a[p, q]."""
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    phi = 0.5 * math.atan2(2.0 * apq, aqq - app)
    c, s = math.cos(phi), math.sin(phi)

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q

    a[p, q] = 0.0
    a[q, p] = 0.0


def jacobi_eigvalsh(
    matrix: np.ndarray, tol: Optional[float] = None, max_sweeps: Optional[int] = None
) -> np.ndarray:
    """
    Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    The complex matrix H = X + iY is embedded as the real symmetric
    [[X, -Y], [Y, X]], whose spectrum is that of H with every eigenvalue
    doubled.

    Args:
        matrix: Square Hermitian matrix
        tol: Off-diagonal Frobenius norm at which sweeping stops
        max_sweeps: Sweep limit

    Returns:
        Eigenvalues in ascending order
    """
    tol = settings.jacobi_tolerance if tol is None else tol
    max_sweeps = settings.jacobi_max_sweeps if max_sweeps is None else max_sweeps

    h = np.asarray(matrix, dtype=complex)
    dim = h.shape[0]
    if dim == 1:
        return np.array([float(np.real(h[0, 0]))])

    x = np.real(h)
    y = np.imag(h)
    a = np.block([[x, -y], [y, x]]).astype(float)
    size = a.shape[0]

    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol:
            break
        for p in range(size):
            for q in range(p + 1, size):
                if abs(a[p, q]) > tol * 1e-3:
                    _rotate(a, p, q)
    else:
        logger.warning(f"⚠️  Jacobi eigensolver hit {max_sweeps} sweeps (dim={dim})")

    doubled = np.sort(np.diag(a))
    return doubled[::2]
