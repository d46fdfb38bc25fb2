"""
Automaton-constrained Krylov spaces.

reach_constrained computes span{A_v G e_j : v in L(a)} and obs_constrained a
full-row-rank W with ker W = intersection of ker(e_i^T H A_v) over v in L(a).
Both run one basis per automaton state and iterate until no state's rank
grows.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .automata import Ndfa
from .errors import DimensionError, PreconditionError
from .linalg import DEFAULT_TOL, Basis, as_matrix, orth
from .model import Lss

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StateBasisMap:
    """Per-state bases after the last iteration and the number of iterations run."""

    bases: dict
    iterations: int

    def ranks(self) -> dict:
        return {s: basis.dim for s, basis in self.bases.items()}


def _check_automaton(a: Ndfa, D: int) -> None:
    if not a.is_coreachable():
        raise PreconditionError("Automaton must be co-reachable; trim it with trim_coreachable first")
    if any(q > D for q in a.letters):
        raise PreconditionError(f"Automaton uses letters beyond the {D} modes of the system")


def _iterate(n: int, state_count: int, seeds: dict, links: dict, tol: float,
             max_iterations: int | None = None) -> StateBasisMap:
    # links[s] lists (M, s') so that M V_{s'} feeds V_s
    bases = {s: seeds.get(s, Basis.empty(n, tol)) for s in range(state_count)}
    iterations = 0
    while max_iterations is None or iterations < max_iterations:
        old = bases
        bases = {
            s: orth(np.hstack([old[s].matrix] + [M @ old[src].matrix for M, src in links[s]]), tol)
            for s in range(state_count)
        }
        iterations += 1
        if all(bases[s].dim == old[s].dim for s in range(state_count)):
            break
    return StateBasisMap(bases, iterations)


def reach_constrained_states(sys: Lss, G, j: int, a: Ndfa, tol: float = DEFAULT_TOL,
                             max_iterations: int | None = None) -> StateBasisMap:
    """
    Per-state bases V_s = span{A_v G e_j : s0 ->_v s}.

    With max_iterations=k only words of length <= k are taken into account.
    """
    G = as_matrix(G, "G")
    if G.shape[0] != sys.n:
        raise DimensionError(f"G has {G.shape[0]} rows, system has n={sys.n}")
    if not 1 <= j <= G.shape[1]:
        raise DimensionError(f"Column {j} outside 1..{G.shape[1]}")
    _check_automaton(a, sys.D)

    links = defaultdict(list)
    for s, q, t in sorted(a.transitions):
        links[t].append((sys.A(q), s))
    seeds = {a.initial: orth(G[:, j - 1:j], tol)}
    result = _iterate(sys.n, a.state_count, seeds, links, tol, max_iterations)
    logger.debug("reach_constrained: %d states, %d iterations, ranks %s",
                 a.state_count, result.iterations, result.ranks())
    return result


def reach_constrained(sys: Lss, G, j: int, a: Ndfa, tol: float = DEFAULT_TOL) -> Basis:
    """
    Orthonormal basis of span{A_v G e_j : v in L(a)}.

    Args:
        sys: system providing the A_q
        G: n x k matrix
        j: 1-based column of G
        a: co-reachable automaton

    Returns:
        Basis: orth of the final-state bases, concatenated in increasing state id

    Raises:
        PreconditionError: If a is not co-reachable
    """
    if not a.finals:
        return Basis.empty(sys.n, tol)
    states = reach_constrained_states(sys, G, j, a, tol)
    finals = sorted(a.finals)
    return orth(np.hstack([states.bases[s].matrix for s in finals]), tol)


def obs_constrained_states(sys: Lss, H, i: int, a: Ndfa, tol: float = DEFAULT_TOL,
                           max_iterations: int | None = None) -> StateBasisMap:
    """Per-state bases of the transposed rows: im(V_s) = span{A_v^T H^T e_i : s ->_v final}."""
    H = as_matrix(H, "H")
    if H.shape[1] != sys.n:
        raise DimensionError(f"H has {H.shape[1]} columns, system has n={sys.n}")
    if not 1 <= i <= H.shape[0]:
        raise DimensionError(f"Row {i} outside 1..{H.shape[0]}")
    _check_automaton(a, sys.D)

    links = defaultdict(list)
    for s, q, t in sorted(a.transitions):
        links[s].append((sys.A(q).T, t))
    row = orth(H[i - 1:i, :].T, tol)
    seeds = {s: row for s in a.finals}
    return _iterate(sys.n, a.state_count, seeds, links, tol, max_iterations)


def obs_constrained(sys: Lss, H, i: int, a: Ndfa, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Full-row-rank W (orthonormal rows) whose kernel is the intersection of
    ker(e_i^T H A_v) over all v in L(a).

    Raises:
        PreconditionError: If a is not co-reachable
    """
    if not a.finals:
        return np.zeros((0, sys.n))
    states = obs_constrained_states(sys, H, i, a, tol)
    return states.bases[a.initial].matrix.T.copy()
