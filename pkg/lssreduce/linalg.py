"""
Dense linear-algebra kernel shared by every reduction algorithm.

All subspaces are carried as orthonormal-column bases; rank decisions use a
relative singular-value threshold (values below tol * sigma_max count as zero).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, RankError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
ILL_CONDITIONED = 1e12


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """
    Convert input to a finite 2-D float array.

    Raises:
        InvalidInputError: If the data is not 2-D or holds NaN/Inf
    """
    try:
        arr = np.array(M, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} is not a real matrix: {e}") from e
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal-column matrix spanning a subspace of R^n."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @classmethod
    def empty(cls, n: int, tol: float = DEFAULT_TOL) -> "Basis":
        return cls(np.zeros((n, 0)), tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    def projector(self) -> np.ndarray:
        return self.matrix @ self.matrix.T


def orth(M, tol: float = DEFAULT_TOL) -> Basis:
    """
    Orthonormal basis for the image of M (SVD based).

    Args:
        M: real matrix
        tol: relative threshold; singular values below tol * sigma_max are dropped

    Returns:
        Basis: n x r matrix U with U^T U = I and im(U) = im(M); r = 0 for a zero matrix
    """
    M = as_matrix(M)
    n, k = M.shape
    if n == 0 or k == 0 or not np.any(M):
        return Basis.empty(n, tol)
    return Basis(scipy.linalg.orth(M, rcond=tol), tol)


def rank(M, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank with the same relative threshold as orth."""
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = scipy.linalg.svdvals(M)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def left_inverse(V: Basis) -> np.ndarray:
    # orthonormal columns, so the transpose is a left inverse
    return V.matrix.T.copy()


def right_inverse(W, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Right inverse W^T (W W^T)^-1 of a full-row-rank matrix.

    Raises:
        RankError: If W is row-rank deficient
    """
    W = as_matrix(W, "W")
    r, n = W.shape
    if r == 0:
        return np.zeros((n, 0))
    found = rank(W, tol)
    if found < r:
        raise RankError(f"W has {r} rows but rank {found}; no right inverse")
    return scipy.linalg.solve(W @ W.T, W, assume_a="pos").T


def expm(A, t: float = 1.0) -> np.ndarray:
    """
    Matrix exponential e^{A t}.

    Uses scipy's scaling-and-squaring Pade implementation, which also covers
    defective matrices.
    """
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expm needs a square matrix, got {A.shape}")
    if not np.isfinite(t):
        raise InvalidInputError(f"expm time must be finite, got {t}")
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    return scipy.linalg.expm(A * t)


def right_divide(X: np.ndarray, M: np.ndarray, label: str = "matrix") -> np.ndarray:
    """
    Compute X M^-1 through an LU factorisation with partial pivoting.

    The condition number of M is logged; values above 1e12 trigger a warning.
    """
    if M.shape[0] == 0:
        return np.zeros((X.shape[0], 0))
    cond = np.linalg.cond(M)
    logger.debug("cond(%s) = %.3e", label, cond)
    if cond > ILL_CONDITIONED:
        logger.warning("%s is ill-conditioned (cond = %.3e)", label, cond)
    lu_piv = scipy.linalg.lu_factor(M)
    return scipy.linalg.lu_solve(lu_piv, X.T, trans=1).T


def projector_distance(U1, U2, tol: float = DEFAULT_TOL) -> float:
    """Spectral-norm distance between orthogonal projectors onto im(U1) and im(U2)."""
    P1 = orth(U1, tol).projector()
    P2 = orth(U2, tol).projector()
    if P1.size == 0:
        return 0.0
    return float(np.linalg.norm(P1 - P2, 2))
