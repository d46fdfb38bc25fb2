"""
Moment matching by N-partial realization.

Mode R projects onto R_N (one-sided, reachability), mode O factors out O_N
(one-sided, observability); both give N-partial realizations. Mode T uses
both projections and gives a 2N-partial realization when
rank(V) = rank(W) = rank(WV).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RankConditionError
from .linalg import DEFAULT_TOL, Basis, left_inverse, rank, right_divide, right_inverse
from .model import DEFAULT_MAX_WORDS, Lss, ensure_valid, markov_parameters_up_to
from .subspaces import reach_space, unobs_space

logger = logging.getLogger(__name__)


class ReductionMode(str, enum.Enum):
    R = "R"
    O = "O"
    T = "T"


@dataclass(frozen=True, eq=False)
class ReductionReport:
    """
    Outcome of a reduction.

    Attributes:
        reduced: the reduced system
        method: "n-match", "beta", "alpha", "alpha-beta" or "sequence"
        ranks: (rank V, rank W, rank WV); None where a side was not computed
        mode: ReductionMode for n-match reductions
        N: depth for n-match reductions
        matched_depth: N or 2N for n-match reductions
    """

    reduced: Lss
    method: str
    ranks: tuple
    mode: ReductionMode | None = None
    N: int | None = None
    matched_depth: int | None = None

    def summary(self) -> dict:
        return {
            "method": self.method,
            "mode": self.mode.value if self.mode else None,
            "N": self.N,
            "matched_depth": self.matched_depth,
            "ranks": list(self.ranks),
            "reduced_dim": self.reduced.n,
        }


def _assemble(sys: Lss, left: np.ndarray, right: np.ndarray) -> Lss:
    # A_q -> left A_q right, B_q -> left B_q, C_q -> C_q right, x0 -> left x0
    return Lss.from_matrices(
        [left @ mode.A @ right for mode in sys.modes],
        [left @ mode.B for mode in sys.modes],
        [mode.C @ right for mode in sys.modes],
        left @ sys.x0,
    )


def project_reachability(sys: Lss, V: Basis) -> Lss:
    """A_q -> V^-1 A_q V, B_q -> V^-1 B_q, C_q -> C_q V, x0 -> V^-1 x0."""
    return _assemble(sys, left_inverse(V), V.matrix)


def project_observability(sys: Lss, W: np.ndarray, tol: float = DEFAULT_TOL) -> Lss:
    """A_q -> W A_q W^-1, B_q -> W B_q, C_q -> C_q W^-1, x0 -> W x0."""
    return _assemble(sys, W, right_inverse(W, tol))


def two_sided_ranks(V: Basis, W: np.ndarray, tol: float = DEFAULT_TOL) -> tuple:
    return (V.dim, W.shape[0], rank(W @ V.matrix, tol))


def project_two_sided(sys: Lss, V: Basis, W: np.ndarray, tol: float = DEFAULT_TOL) -> Lss:
    """
    A_q -> W A_q V (WV)^-1, B_q -> W B_q, C_q -> C_q V (WV)^-1, x0 -> W x0.

    Raises:
        RankConditionError: Unless rank(V) = rank(W) = rank(WV)
    """
    ranks = two_sided_ranks(V, W, tol)
    if len(set(ranks)) != 1:
        raise RankConditionError(ranks)
    P = right_divide(V.matrix, W @ V.matrix, label="WV")
    return _assemble(sys, W, P)


def reduce(sys: Lss, N: int, mode="R", tol: float = DEFAULT_TOL) -> ReductionReport:
    """
    Reduce a system by N or 2N moment matching.

    Args:
        sys: system to reduce
        N: word length up to which Markov parameters are matched
        mode: "R", "O" or "T"
        tol: relative rank tolerance

    Returns:
        ReductionReport: reduced system with ranks and matched depth

    Raises:
        RankConditionError: Mode T when rank(V) = rank(W) = rank(WV) fails
    """
    ensure_valid(sys)
    mode = ReductionMode(mode)
    V = reach_space(sys, N, tol).V
    W = unobs_space(sys, N, tol).W
    ranks = two_sided_ranks(V, W, tol)

    if mode is ReductionMode.R:
        reduced, depth = project_reachability(sys, V), N
    elif mode is ReductionMode.O:
        reduced, depth = project_observability(sys, W, tol), N
    else:
        reduced, depth = project_two_sided(sys, V, W, tol), 2 * N

    logger.info("n-match reduction mode=%s N=%d: n=%d -> r=%d, ranks=%s",
                mode.value, N, sys.n, reduced.n, ranks)
    return ReductionReport(reduced=reduced, method="n-match", ranks=ranks,
                           mode=mode, N=N, matched_depth=depth)


def relative_error(reference: np.ndarray, approx: np.ndarray) -> float:
    """Frobenius error relative to the reference; absolute when the reference is zero."""
    diff = float(np.linalg.norm(reference - approx))
    scale = float(np.linalg.norm(reference))
    return diff / scale if scale > 0 else diff


def check_same_signature(sys: Lss, red: Lss) -> None:
    if (sys.p, sys.m, sys.D) != (red.p, red.m, red.D):
        raise DimensionError(
            f"Systems differ in (p, m, D): {(sys.p, sys.m, sys.D)} vs {(red.p, red.m, red.D)}")


def check_partial_realization(sys: Lss, red: Lss, N: int,
                              max_words: int = DEFAULT_MAX_WORDS) -> float:
    """
    Largest relative Markov-parameter error over all words of length <= N.

    Returns 0 for an exact N-partial realization.
    """
    check_same_signature(sys, red)
    original = markov_parameters_up_to(sys, N, max_words)
    reduced = markov_parameters_up_to(red, N, max_words)
    return max(relative_error(original[w].value, reduced[w].value) for w in original)
