"""
Partial reachability space R_N and partial unobservability space O_N.

R_N = span{ im(A_v B~) : |v| <= N } is computed by the fixed-point iteration
V <- orth([V, A_1 V, ..., A_D V]) seeded with orth([x0, B_1, ..., B_D]).
O_N is obtained from the same iteration on the dual data ({A_q^T, C_q^T}, 0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import DEFAULT_TOL, Basis, orth
from .model import Lss

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReachBasisN:
    V: Basis
    N: int

    @property
    def rank(self) -> int:
        return self.V.dim


@dataclass(frozen=True, eq=False)
class ObsKernelN:
    """W with orthonormal rows and ker(W) = O_N."""

    W: np.ndarray
    N: int

    @property
    def rank(self) -> int:
        return self.W.shape[0]


def reach_space(sys: Lss, N: int, tol: float = DEFAULT_TOL) -> ReachBasisN:
    """
    Orthonormal basis of the partial reachability space R_N.

    The loop stops early once the dimension stops growing: R_{k+1} contains
    R_k, so equal dimension means the fixed point has been reached.
    """
    if N < 0:
        raise InvalidInputError(f"N must be >= 0, got {N}")
    V = orth(sys.b_tilde(), tol)
    for k in range(1, N + 1):
        grown = orth(np.hstack([V.matrix] + [mode.A @ V.matrix for mode in sys.modes]), tol)
        if grown.dim == V.dim:
            logger.debug("reach_space: rank %d stable after %d of %d steps", V.dim, k - 1, N)
            break
        V = grown
    return ReachBasisN(V, N)


def unobs_space(sys: Lss, N: int, tol: float = DEFAULT_TOL) -> ObsKernelN:
    """Full-row-rank W (orthonormal rows) with ker(W) = O_N."""
    V = reach_space(sys.dual(), N, tol).V
    return ObsKernelN(V.matrix.T.copy(), N)


def is_span_reachable(sys: Lss, tol: float = DEFAULT_TOL) -> bool:
    if sys.n == 0:
        return True
    return reach_space(sys, sys.n - 1, tol).rank == sys.n


def is_observable(sys: Lss, tol: float = DEFAULT_TOL) -> bool:
    if sys.n == 0:
        return True
    return unobs_space(sys, sys.n - 1, tol).rank == sys.n


def is_minimal(sys: Lss, tol: float = DEFAULT_TOL) -> bool:
    return is_span_reachable(sys, tol) and is_observable(sys, tol)
