"""
Reduction by nice selections.

reduce_beta projects onto R_beta (one-sided, reachability), reduce_alpha
factors out O_alpha (one-sided, observability) and reduce_alphabeta combines
both under the rank guard. match_sequence builds the selections that make
the reduced system reproduce the original output along every switching
signal with a given mode sequence.
"""

from __future__ import annotations

import logging

import numpy as np

from .automata import accepted_words, generating_ndfa, left_quotient, right_quotient, trim_coreachable
from .errors import InvalidInputError, RankConditionError, SizeLimitError
from .krylov import obs_constrained, reach_constrained
from .linalg import DEFAULT_TOL, Basis, orth
from .model import DEFAULT_MAX_WORDS, Lss, Word, check_word, ensure_valid
from .moment import (ReductionReport, check_same_signature, project_observability,
                     project_reachability, project_two_sided, relative_error, two_sided_ranks)
from .selection import X0_SLOT, NiceColumnSelection, NiceRowSelection, SelectionLanguages, extract_languages

logger = logging.getLogger(__name__)


def _as_languages(sel, D: int, kind: str) -> SelectionLanguages:
    if isinstance(sel, (NiceColumnSelection, NiceRowSelection)):
        sel = extract_languages(sel, D)
    if not isinstance(sel, SelectionLanguages):
        raise InvalidInputError(f"Expected a selection, got {type(sel).__name__}")
    if sel.kind != kind:
        raise InvalidInputError(f"Expected a {kind} selection, got {sel.kind}")
    return sel


def _check_indices(langs: SelectionLanguages, sys: Lss) -> None:
    limit = sys.m if langs.kind == "beta" else sys.p
    for q, k in langs.indices:
        if not (1 <= q <= sys.D and 1 <= k <= limit):
            raise InvalidInputError(f"Selection index ({q}, {k}) outside the system's modes or channels")


def beta_basis(sys: Lss, langs: SelectionLanguages, tol: float = DEFAULT_TOL) -> Basis:
    """V = orth([V_x0, V_(q,j) ...]) with every block from the constrained reachability iteration."""
    _check_indices(langs, sys)
    blocks = []
    x0_language = langs.languages.get(X0_SLOT)
    if x0_language is not None:
        blocks.append(reach_constrained(sys, sys.x0.reshape(-1, 1), 1, trim_coreachable(x0_language), tol))
    for q, j in langs.indices:
        blocks.append(reach_constrained(sys, sys.B(q), j, trim_coreachable(langs.languages[(q, j)]), tol))
    if not blocks:
        return Basis.empty(sys.n, tol)
    return orth(np.hstack([b.matrix for b in blocks]), tol)


def alpha_basis(sys: Lss, langs: SelectionLanguages, tol: float = DEFAULT_TOL) -> np.ndarray:
    """W with W^T = orth([W_1^T ... W_t^T]); each W_k from the constrained observability iteration."""
    _check_indices(langs, sys)
    blocks = [
        obs_constrained(sys, sys.C(q), i, trim_coreachable(langs.languages[(q, i)]), tol).T
        for q, i in langs.indices
    ]
    if not blocks:
        return np.zeros((0, sys.n))
    return orth(np.hstack(blocks), tol).matrix.T.copy()


def reduce_beta(sys: Lss, sel, tol: float = DEFAULT_TOL) -> ReductionReport:
    """
    beta-partial realization by projection onto R_beta.

    Args:
        sys: system to reduce
        sel: NiceColumnSelection or beta SelectionLanguages
        tol: relative rank tolerance

    Returns:
        ReductionReport: reduced system of dimension dim R_beta
    """
    ensure_valid(sys)
    langs = _as_languages(sel, sys.D, "beta")
    V = beta_basis(sys, langs, tol)
    reduced = project_reachability(sys, V)
    logger.info("beta reduction: t=%d, n=%d -> r=%d", langs.subset_cardinality, sys.n, reduced.n)
    return ReductionReport(reduced=reduced, method="beta", ranks=(V.dim, None, None))


def reduce_alpha(sys: Lss, sel, tol: float = DEFAULT_TOL) -> ReductionReport:
    """alpha-partial realization by factoring out O_alpha."""
    ensure_valid(sys)
    langs = _as_languages(sel, sys.D, "alpha")
    W = alpha_basis(sys, langs, tol)
    reduced = project_observability(sys, W, tol)
    logger.info("alpha reduction: t=%d, n=%d -> r=%d", langs.subset_cardinality, sys.n, reduced.n)
    return ReductionReport(reduced=reduced, method="alpha", ranks=(None, W.shape[0], None))


def reduce_alphabeta(sys: Lss, alpha, beta, tol: float = DEFAULT_TOL) -> ReductionReport:
    """
    (alpha, beta)-partial realization by the two-sided projection.

    Raises:
        RankConditionError: Unless rank(V) = rank(W) = rank(WV)
    """
    ensure_valid(sys)
    V = beta_basis(sys, _as_languages(beta, sys.D, "beta"), tol)
    W = alpha_basis(sys, _as_languages(alpha, sys.D, "alpha"), tol)
    ranks = two_sided_ranks(V, W, tol)
    if len(set(ranks)) != 1:
        logger.error("(alpha, beta) rank guard failed: %s", ranks)
        raise RankConditionError(ranks, context="(alpha, beta) projection")
    reduced = project_two_sided(sys, V, W, tol)
    logger.info("alpha-beta reduction: n=%d -> r=%d", sys.n, reduced.n)
    return ReductionReport(reduced=reduced, method="alpha-beta", ranks=ranks)


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def _words(langs: SelectionLanguages, key, cap: int, limit: int | None = None) -> list:
    if langs.words is not None:
        words = sorted(langs.words.get(key, ()), key=lambda w: (len(w), w))
        if limit is not None and len(words) > limit:
            raise SizeLimitError(f"Selection lists more than {limit} words")
        return words
    return accepted_words(langs.languages[key], cap, limit)


def _default_cap(sys: Lss, langs: SelectionLanguages) -> int:
    if langs.words is not None:
        return max((len(w) for ws in langs.words.values() for w in ws), default=0)
    automata = list(langs.languages.values())
    states = max((a.state_count for a in automata), default=1)
    if all(a.is_finite() for a in automata):
        # no accepted word of an acyclic automaton revisits a state
        return states
    return max(sys.n, 1) * states


class _Products:
    """Memoised A_w X for a fixed X, extended one letter at a time."""

    def __init__(self, sys: Lss, X: np.ndarray):
        self.sys = sys
        self.cache = {(): X}

    def __call__(self, w: Word) -> np.ndarray:
        if w not in self.cache:
            self.cache[w] = self.sys.A(w[-1]) @ self(w[:-1])
        return self.cache[w]


def selection_errors(sys: Lss, red: Lss, sel, depth_cap: int | None = None,
                     max_words: int = DEFAULT_MAX_WORDS) -> dict:
    """
    Relative error of every matched quantity.

    For a column selection the matched quantities are the columns
    C~ A_w x0 (w in L_0) and C~ A_w B_q e_j; for a row selection the rows
    e_i^T C_q A_v B~. A pair (alpha, beta) matches the entries
    e_i^T C_q A_{wv} B_q0 e_j (and A_{wv} x0) for (v, q, i) in alpha and
    (w, q0, j) in beta; those are scaled by the largest matched entry of
    their row. Infinite languages are enumerated up to depth_cap (default n
    times the largest state count). Enumeration stops with SizeLimitError
    once more than max_words entries are listed.

    Returns:
        dict: entry -> relative error; entries are (word, q, k) for one-sided
        selections, with x0 columns keyed (w, 0, 0), and (row entry, column
        entry) pairs for (alpha, beta)
    """
    check_same_signature(sys, red)
    if isinstance(sel, tuple):
        return _pair_errors(sys, red, *sel, depth_cap=depth_cap, max_words=max_words)

    kind = "beta" if isinstance(sel, NiceColumnSelection) or getattr(sel, "kind", None) == "beta" else "alpha"
    langs = _as_languages(sel, sys.D, kind)
    cap = _default_cap(sys, langs) if depth_cap is None else depth_cap
    errors = {}
    if kind == "beta":
        C_sys, C_red = sys.c_tilde(), red.c_tilde()
        keys = ([X0_SLOT] if X0_SLOT in langs.languages else []) + langs.indices
        for key in keys:
            if key == X0_SLOT:
                col_sys, col_red = sys.x0, red.x0
            else:
                q, j = key
                col_sys, col_red = sys.B(key[0])[:, j - 1], red.B(q)[:, j - 1]
            prod_sys, prod_red = _Products(sys, col_sys), _Products(red, col_red)
            words = _words(langs, key, cap, max_words - len(errors))
            for w in words:
                entry = (w, 0, 0) if key == X0_SLOT else (w, *key)
                errors[entry] = relative_error(C_sys @ prod_sys(w), C_red @ prod_red(w))
    else:
        B_sys, B_red = sys.b_tilde(), red.b_tilde()
        for q, i in langs.indices:
            # row e_i^T C_q A_v B~ = ((A_v B~)^T C_q^T e_i)^T, built from the right
            prod_sys, prod_red = _Products(sys, B_sys), _Products(red, B_red)
            words = _words(langs, (q, i), cap, max_words - len(errors))
            for v in words:
                errors[(v, q, i)] = relative_error(sys.C(q)[i - 1] @ prod_sys(v),
                                                   red.C(q)[i - 1] @ prod_red(v))
    return errors


def _guard(count: int, max_words: int) -> None:
    if count > max_words:
        raise SizeLimitError(f"Checking {count} selection entries exceeds the limit of {max_words}")


def _pair_errors(sys: Lss, red: Lss, alpha, beta, depth_cap=None, max_words=DEFAULT_MAX_WORDS) -> dict:
    a_langs = _as_languages(alpha, sys.D, "alpha")
    b_langs = _as_languages(beta, sys.D, "beta")
    a_cap = _default_cap(sys, a_langs) if depth_cap is None else depth_cap
    b_cap = _default_cap(sys, b_langs) if depth_cap is None else depth_cap

    rows = [(v, q, i) for q, i in a_langs.indices for v in _words(a_langs, (q, i), a_cap, max_words)]
    columns = []
    if X0_SLOT in b_langs.languages:
        columns += [(w, 0, 0) for w in _words(b_langs, X0_SLOT, b_cap, max_words)]
    columns += [(w, q, j) for q, j in b_langs.indices for w in _words(b_langs, (q, j), b_cap, max_words)]
    _guard(len(rows) * len(columns), max_words)

    def column_vectors(s: Lss):
        out = {}
        for w, q, j in columns:
            start = s.x0 if q == 0 else s.B(q)[:, j - 1]
            out[(w, q, j)] = _Products(s, start)(w)
        return out

    cols_sys, cols_red = column_vectors(sys), column_vectors(red)
    errors = {}
    for row in rows:
        v, q, i = row
        values = {}
        for col in columns:
            # A_{wv} = A_v A_w: first w, then v
            x_sys = _Products(sys, cols_sys[col])(v) if v else cols_sys[col]
            x_red = _Products(red, cols_red[col])(v) if v else cols_red[col]
            values[col] = (sys.C(q)[i - 1] @ x_sys, red.C(q)[i - 1] @ x_red)
        # each row is scaled by its own largest entry
        scale = max((abs(a) for a, _ in values.values()), default=0.0)
        scale = scale if scale > 0 else 1.0
        errors.update({(row, col): float(abs(a - b) / scale) for col, (a, b) in values.items()})
    return errors


def check_selection(sys: Lss, red: Lss, sel, depth_cap: int | None = None,
                    max_words: int = DEFAULT_MAX_WORDS) -> float:
    """Largest relative error over the quantities a selection matches; 0 for an exact match."""
    errors = selection_errors(sys, red, sel, depth_cap, max_words)
    return max(errors.values(), default=0.0)


# ---------------------------------------------------------------------------
# Switching sequences
# ---------------------------------------------------------------------------

def sequence_languages(sys: Lss, upsilon: Word, side: str = "column") -> SelectionLanguages:
    """
    Selection languages of a mode sequence.

    Column side: L_0 is the generating language L and (q0, j) gets q0^-1 L.
    Row side: (q, i) gets L q^-1. Empty quotients are left out.
    """
    check_word(upsilon, sys.D)
    language = generating_ndfa(upsilon)
    if side == "column":
        columns = {}
        for q0 in range(1, sys.D + 1):
            quotient = trim_coreachable(left_quotient(language, q0))
            if quotient.is_empty():
                continue
            columns.update({(q0, j): quotient for j in range(1, sys.m + 1)})
        return SelectionLanguages.for_beta(sys.D, trim_coreachable(language), columns)
    if side == "row":
        rows = {}
        for q in range(1, sys.D + 1):
            quotient = trim_coreachable(right_quotient(language, q))
            if quotient.is_empty():
                continue
            rows.update({(q, i): quotient for i in range(1, sys.p + 1)})
        return SelectionLanguages.for_alpha(sys.D, rows)
    raise InvalidInputError(f"side must be 'column' or 'row', got {side!r}")


def match_sequence(sys: Lss, upsilon: Word, side: str = "column", tol: float = DEFAULT_TOL) -> ReductionReport:
    """
    Reduced system whose output equals the original output along every
    timed switching sequence with mode sequence upsilon.

    Args:
        sys: system to reduce
        upsilon: mode sequence q_1 ... q_k
        side: "column" (reachability side) or "row" (observability side)
    """
    ensure_valid(sys)
    if not upsilon:
        raise InvalidInputError("The mode sequence must not be empty")
    if len(upsilon) == 1:
        logger.warning("mode sequence %s has a single mode; the reduction only covers constant switching",
                       upsilon)
    langs = sequence_languages(sys, upsilon, side)
    report = reduce_beta(sys, langs, tol) if side == "column" else reduce_alpha(sys, langs, tol)
    return ReductionReport(reduced=report.reduced, method="sequence", ranks=report.ranks)

