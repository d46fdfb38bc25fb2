"""
Nice row and column selections, their index languages, the word ordering
and the greedy construction of a nice selection of prescribed dimension.

A column selection beta picks columns A_w x0 (w in x0_words) and
A_w B_q e_j ((w, q, j) in column_entries) of the infinite reachability
array; a row selection alpha picks rows e_i^T C_q A_v ((v, q, i) in
row_entries) of the infinite observability array.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .automata import Ndfa
from .errors import InfeasibleError, InvalidInputError
from .linalg import DEFAULT_TOL, rank
from .model import EPSILON, Lss, Word, a_word, check_word, ensure_valid, format_word, iter_words, parse_word
from .subspaces import reach_space, unobs_space

logger = logging.getLogger(__name__)

X0_SLOT = "x0"


def _sort_key(entry) -> tuple:
    word, *rest = entry
    return (len(word), word, *rest)


@dataclass(frozen=True)
class NiceColumnSelection:
    x0_words: frozenset = field(default_factory=frozenset)
    column_entries: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "x0_words", frozenset(tuple(w) for w in self.x0_words))
        object.__setattr__(self, "column_entries", frozenset(
            (tuple(w), int(q), int(j)) for w, q, j in self.column_entries))

    def __len__(self):
        return len(self.x0_words) + len(self.column_entries)

    def sorted_entries(self) -> list:
        return sorted(self.column_entries, key=_sort_key)


@dataclass(frozen=True)
class NiceRowSelection:
    row_entries: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "row_entries", frozenset(
            (tuple(v), int(q), int(i)) for v, q, i in self.row_entries))

    def __len__(self):
        return len(self.row_entries)

    def sorted_entries(self) -> list:
        return sorted(self.row_entries, key=_sort_key)


def validate_nice(sel) -> list:
    """
    List the violations of the nice-selection closure property.

    Columns need (w, q, j) for every (w s, q, j) and w for every x0 word w s;
    rows need (v, q, i) for every (s v, q, i).

    Returns:
        list[str]: one message per entry whose reduced entry is missing
    """
    violations = []
    if isinstance(sel, NiceColumnSelection):
        for w in sorted(sel.x0_words, key=lambda w: (len(w), w)):
            if w and w[:-1] not in sel.x0_words:
                violations.append(f"x0 word {format_word(w)} needs {format_word(w[:-1])}")
        for w, q, j in sel.sorted_entries():
            if w and (w[:-1], q, j) not in sel.column_entries:
                violations.append(f"({format_word(w)},{q},{j}) needs ({format_word(w[:-1])},{q},{j})")
    elif isinstance(sel, NiceRowSelection):
        for v, q, i in sel.sorted_entries():
            if v and (v[1:], q, i) not in sel.row_entries:
                violations.append(f"({format_word(v)},{q},{i}) needs ({format_word(v[1:])},{q},{i})")
    else:
        raise InvalidInputError(f"Not a selection: {type(sel).__name__}")
    return violations


def check_against(sel, sys: Lss) -> None:
    """Raise if the selection uses letters, modes or channels the system does not have."""
    entries = sel.column_entries if isinstance(sel, NiceColumnSelection) else sel.row_entries
    limit = sys.m if isinstance(sel, NiceColumnSelection) else sys.p
    for w, q, k in entries:
        check_word(w, sys.D)
        if not 1 <= q <= sys.D:
            raise InvalidInputError(f"Selection entry uses mode {q}; the system has {sys.D}")
        if not 1 <= k <= limit:
            raise InvalidInputError(f"Selection entry uses channel {k}; the system has {limit}")
    for w in getattr(sel, "x0_words", ()):
        check_word(w, sys.D)


# ---------------------------------------------------------------------------
# Languages
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SelectionLanguages:
    """
    Per-index languages of a selection.

    For a column selection the keys are X0_SLOT and the pairs (q, j) of J_beta;
    for a row selection the keys are the pairs (q, i) of I_alpha. `words` holds
    the explicit word sets when the languages are finite and None otherwise.
    """

    kind: str
    D: int
    languages: dict
    words: dict | None = None

    @property
    def indices(self) -> list:
        return sorted(k for k in self.languages if k != X0_SLOT)

    @property
    def subset_cardinality(self) -> int:
        extra = 1 if self.kind == "beta" else 0
        return len(self.indices) + extra

    @property
    def finite(self) -> bool:
        return self.words is not None

    @classmethod
    def for_beta(cls, D: int, x0_language: Ndfa, column_languages: dict) -> "SelectionLanguages":
        return cls("beta", D, {X0_SLOT: x0_language, **column_languages})

    @classmethod
    def for_alpha(cls, D: int, row_languages: dict) -> "SelectionLanguages":
        return cls("alpha", D, dict(row_languages))


def extract_languages(sel, D: int) -> SelectionLanguages:
    """Split a finite selection into per-index word sets and their trie automata."""
    words = {}
    if isinstance(sel, NiceColumnSelection):
        kind = "beta"
        words[X0_SLOT] = frozenset(sel.x0_words)
        entries = sel.column_entries
    elif isinstance(sel, NiceRowSelection):
        kind = "alpha"
        entries = sel.row_entries
    else:
        raise InvalidInputError(f"Not a selection: {type(sel).__name__}")

    grouped = {}
    for w, q, k in entries:
        grouped.setdefault((q, k), set()).add(w)
    words.update({key: frozenset(ws) for key, ws in grouped.items()})
    languages = {key: Ndfa.from_words(ws) for key, ws in words.items()}
    return SelectionLanguages(kind, D, languages, words)


# ---------------------------------------------------------------------------
# Word ordering and greedy construction
# ---------------------------------------------------------------------------

def word_order_key(v: Word, D: int) -> int:
    """phi(v) = q_1 (D+1)^(k-1) + ... + q_k; v precedes w iff phi(v) < phi(w)."""
    check_word(v, D)
    key = 0
    for q in v:
        key = key * (D + 1) + q
    return key


def _greedy_scan(sys: Lss, r: int, with_x0: bool, tol: float):
    """
    Scan the columns of [B~, A_{v_1} B~, A_{v_2} B~, ...] with v_1 < v_2 < ...
    and keep each column that raises the rank, until r are kept.

    A column that depends on earlier ones stays dependent after applying any
    A_q, so only extensions of kept columns are scanned. Within a word block
    the x0 column comes first, then B_1 e_1, ..., B_D e_m.
    """
    slots = ([X0_SLOT] if with_x0 else []) + [(q, j) for q in range(1, sys.D + 1)
                                              for j in range(1, sys.m + 1)]
    column_of = {X0_SLOT: sys.x0}
    for q, j in slots[1 if with_x0 else 0:]:
        column_of[(q, j)] = sys.B(q)[:, j - 1]

    kept = {slot: [] for slot in slots}
    frontier = {slot: [EPSILON] for slot in slots}
    # current image of each kept (slot, word), so extensions cost one product
    images = {}
    basis = np.zeros((sys.n, 0))
    while len(images) < r and any(frontier.values()):
        candidates = sorted({w for ws in frontier.values() for w in ws}, key=lambda w: (len(w), w))
        next_frontier = {slot: [] for slot in slots}
        for word in candidates:
            for slot in slots:
                if word not in frontier[slot] or len(images) >= r:
                    continue
                if word:
                    column = sys.A(word[-1]) @ images[(slot, word[:-1])]
                else:
                    column = column_of[slot]
                trial = np.column_stack([basis, column])
                if rank(trial, tol) > basis.shape[1]:
                    basis = trial
                    images[(slot, word)] = column
                    kept[slot].append(word)
                    next_frontier[slot].extend(word + (q,) for q in range(1, sys.D + 1))
        frontier = next_frontier
    return kept


def select_nice_columns(sys: Lss, r: int, tol: float = DEFAULT_TOL) -> NiceColumnSelection:
    """
    Nice column selection beta with dim R_beta = r.

    Raises:
        InfeasibleError: If r exceeds dim R_{n-1}; the message names the maximum
    """
    ensure_valid(sys)
    achievable = reach_space(sys, max(sys.n - 1, 0), tol).rank
    if not 0 <= r <= achievable:
        raise InfeasibleError(
            f"Requested dimension {r} but at most {achievable} columns are independent")
    kept = _greedy_scan(sys, r, with_x0=True, tol=tol)
    selection = NiceColumnSelection(
        frozenset(kept[X0_SLOT]),
        frozenset((w, *slot) for slot, ws in kept.items() if slot != X0_SLOT for w in ws),
    )
    if len(selection) < r:
        raise InfeasibleError(f"Column scan found only {len(selection)} of {r} independent columns")
    logger.debug("select_nice_columns: r=%d with %d x0 words and %d column entries",
                 r, len(selection.x0_words), len(selection.column_entries))
    return selection


def select_nice_rows(sys: Lss, r: int, tol: float = DEFAULT_TOL) -> NiceRowSelection:
    """
    Nice row selection alpha with dim O_alpha = n - r.

    Runs the column scan on the dual data; a dual column (w, q, i) is the
    transposed row e_i^T C_q A_{reverse(w)}.
    """
    ensure_valid(sys)
    achievable = unobs_space(sys, max(sys.n - 1, 0), tol).rank
    if not 0 <= r <= achievable:
        raise InfeasibleError(
            f"Requested dimension {r} but at most {achievable} rows are independent")
    kept = _greedy_scan(sys.dual(), r, with_x0=False, tol=tol)
    selection = NiceRowSelection(frozenset(
        (tuple(reversed(w)), q, i) for (q, i), ws in kept.items() for w in ws))
    if len(selection) < r:
        raise InfeasibleError(f"Row scan found only {len(selection)} of {r} independent rows")
    return selection


def full_column_selection(D: int, m: int, N: int, with_x0: bool = True) -> NiceColumnSelection:
    """Every column of depth <= N; turns the beta reducer into the N-matching reducer."""
    words = list(iter_words(D, N))
    return NiceColumnSelection(
        frozenset(words) if with_x0 else frozenset(),
        frozenset((w, q, j) for w in words for q in range(1, D + 1) for j in range(1, m + 1)),
    )


def full_row_selection(D: int, p: int, N: int) -> NiceRowSelection:
    words = list(iter_words(D, N))
    return NiceRowSelection(frozenset(
        (v, q, i) for v in words for q in range(1, D + 1) for i in range(1, p + 1)))


def mode_focused_selection() -> NiceColumnSelection:
    """
    Eight-element selection emphasising mode 1 (D >= 2, m >= 1):
    {e, 1, (e,1,1), (1,1,1), (11,1,1), (111,1,1), (112,1,1), (e,2,1)}.
    """
    return NiceColumnSelection(
        frozenset({EPSILON, (1,)}),
        frozenset({
            (EPSILON, 1, 1), ((1,), 1, 1), ((1, 1), 1, 1),
            ((1, 1, 1), 1, 1), ((1, 1, 2), 1, 1), (EPSILON, 2, 1),
        }),
    )


PRESETS = {"mode1": mode_focused_selection}


# ---------------------------------------------------------------------------
# Selected columns and rows
# ---------------------------------------------------------------------------

def selected_columns(sys: Lss, sel: NiceColumnSelection) -> np.ndarray:
    """Matrix whose image is R_beta: A_w x0 for x0 words, then A_w B_q e_j."""
    cols = [a_word(sys, w) @ sys.x0 for w in sorted(sel.x0_words, key=lambda w: (len(w), w))]
    cols += [a_word(sys, w) @ sys.B(q)[:, j - 1] for w, q, j in sel.sorted_entries()]
    return np.column_stack(cols) if cols else np.zeros((sys.n, 0))


def selected_rows(sys: Lss, sel: NiceRowSelection) -> np.ndarray:
    """Matrix whose kernel is O_alpha: rows e_i^T C_q A_v."""
    rows = [sys.C(q)[i - 1] @ a_word(sys, v) for v, q, i in sel.sorted_entries()]
    return np.vstack(rows) if rows else np.zeros((0, sys.n))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def selection_to_dict(sel) -> dict:
    if isinstance(sel, NiceColumnSelection):
        return {
            "x0_words": [format_word(w, empty="") for w in sorted(sel.x0_words, key=lambda w: (len(w), w))],
            "columns": [{"w": format_word(w, empty=""), "q": q, "j": j} for w, q, j in sel.sorted_entries()],
        }
    return {"rows": [{"v": format_word(v, empty=""), "q": q, "i": i} for v, q, i in sel.sorted_entries()]}


def selection_from_dict(data: dict):
    """Column selection when "columns" or "x0_words" is present, row selection for "rows"."""
    try:
        if "rows" in data:
            return NiceRowSelection(frozenset(
                (parse_word(e["v"]), e["q"], e["i"]) for e in data["rows"]))
        return NiceColumnSelection(
            frozenset(parse_word(w) for w in data.get("x0_words", [])),
            frozenset((parse_word(e["w"]), e["q"], e["j"]) for e in data.get("columns", [])),
        )
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"Malformed selection JSON: {e}") from e


def load_selection(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Selection not found at {path}")
    with open(path, "r") as f:
        return selection_from_dict(json.load(f))


def save_selection(sel, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(selection_to_dict(sel), f, indent=2)
    return path
