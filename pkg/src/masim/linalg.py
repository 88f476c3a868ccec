"""Dense complex linear-algebra kernels used by the model, receiver, and metrics.

All matrices are 2-D ``numpy.ndarray`` of ``complex128``; vectors are the
single-column case (1-D inputs are promoted to columns). Vectorization uses
the column-stacking convention: column j of an I x J matrix occupies entries
j*I .. j*I + I - 1 of the vector. Every identity the receiver relies on
assumes this order.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

_EPS = np.finfo(np.float64).eps


def asmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array.

    1-D inputs become single-column matrices. Raises ``ValueError`` for
    higher-rank arrays, empty arrays, or non-finite entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"{name} must have positive dimensions, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product: block (i, j) of the result equals a[i, j] * b."""
    return np.kron(asmatrix(a, "a"), asmatrix(b, "b"))


def vec(a) -> np.ndarray:
    """Stack the columns of ``a`` into a single I*J x 1 column."""
    return asmatrix(a, "a").reshape(-1, 1, order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`: reshape a vector back to ``rows`` x ``cols``.

    The entry count must match exactly; a mismatch signals a caller bug.
    """
    m = asmatrix(v, "v")
    if m.size != rows * cols:
        raise ValueError(
            f"cannot unvec {m.size} entries into {rows}x{cols} = {rows * cols}"
        )
    return m.ravel(order="F").reshape(rows, cols, order="F")


def diag_row(c, p: int) -> np.ndarray:
    """K x K diagonal matrix holding row ``p`` of the P x K matrix ``c``."""
    m = asmatrix(c, "c")
    if not 0 <= p < m.shape[0]:
        raise IndexError(f"row index {p} out of range for {m.shape[0]} rows")
    return np.diag(m[p, :])


def pinv(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse computed through the SVD.

    Singular values at or below max(rows, cols) * eps relative to the largest
    one are treated as zero, so rank-deficient inputs are handled silently.
    """
    return pinv_counted(a)[0]


def pinv_counted(a) -> tuple[np.ndarray, int]:
    """Pseudoinverse plus the number of singular values truncated to zero.

    The count feeds the receiver's rank-deficiency diagnostic; callers that
    only need the matrix should use :func:`pinv`.
    """
    m = asmatrix(a, "a")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # the default divide-and-conquer driver occasionally fails on
        # ill-conditioned inputs; the QR-based driver is slower but robust
        try:
            u, s, vh = scipy.linalg.svd(
                m, full_matrices=False, lapack_driver="gesvd"
            )
        except Exception as err:
            raise np.linalg.LinAlgError(
                f"SVD did not converge for a {m.shape[0]}x{m.shape[1]} matrix"
            ) from err
    if s[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128), int(s.size)
    cutoff = max(m.shape) * _EPS * s[0]
    keep = s > cutoff
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s[None, :]) @ u.conj().T, int(np.sum(~keep))


def fro_norm(a) -> float:
    """Square root of the sum of squared entry magnitudes."""
    return float(np.linalg.norm(asmatrix(a, "a")))
