"""Small dense linear algebra used by the stationarity and index computations."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

RANK_RTOL = 1e-10


def rank_threshold(s: np.ndarray) -> float:
    """Singular values at or below this count as zero."""
    smax = float(s[0]) if s.size else 0.0
    return RANK_RTOL * max(smax, 1.0)


def numerical_rank(A: np.ndarray) -> tuple[int, float]:
    """Return ``(rank, smallest singular value)`` of a possibly empty matrix."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0, float("inf")
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > rank_threshold(s))), float(s[-1])


def lstsq_qr(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution of ``A y = b`` for full-column-rank ``A`` via QR."""
    A = np.asarray(A, dtype=float)
    if A.shape[1] == 0:
        return np.zeros(0)
    Q, R = np.linalg.qr(A, mode="reduced")
    return solve_triangular(R, Q.T @ b)


def null_space(A: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the null space of the ``k x n`` matrix ``A``."""
    A = np.asarray(A, dtype=float).reshape(-1, n)
    if A.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rank_threshold(s)))
    return vt[rank:].T.copy()


def jacobi_eigvalsh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(A, dtype=float)
    d = A.shape[0]
    if d == 0:
        return np.zeros(0)
    A = 0.5 * (A + A.T)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(d)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))
