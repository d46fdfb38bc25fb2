"""
Linear switched system model: data type, validation, word products,
Markov parameters, minimization and the JSON model format.

A system is Sigma = (p, m, n, Q, {(A_q, B_q, C_q) | q in Q}, x0) with
Q = {1, ..., D}. Words are tuples of letters; the empty tuple is epsilon.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import InvalidInputError, LetterError, ModelValidationError, SizeLimitError

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
EPSILON: Word = ()
MAX_MODES_FOR_TEXT = 9
DEFAULT_MAX_WORDS = 1_000_000


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------

def parse_word(text: str, D: int | None = None) -> Word:
    """
    Parse a digit string such as "1221" into a word.

    "", "e", "ε" and "eps" denote the empty word.
    """
    text = str(text).strip()
    if text in ("", "e", "ε", "eps"):
        return EPSILON
    if not text.isdigit():
        raise InvalidInputError(f"Word {text!r} must be a digit string over 1..9")
    word = tuple(int(ch) for ch in text)
    if 0 in word:
        raise LetterError(f"Word {text!r} uses letter 0; modes are numbered from 1")
    if D is not None:
        check_word(word, D)
    return word


def format_word(word: Word, empty: str = "ε") -> str:
    if not word:
        return empty
    if any(q > MAX_MODES_FOR_TEXT for q in word):
        raise InvalidInputError("Words over more than 9 modes have no digit-string form")
    return "".join(str(q) for q in word)


def check_word(word: Word, D: int) -> None:
    for q in word:
        if not 1 <= q <= D:
            raise LetterError(f"Letter {q} outside mode range 1..{D}")


def word_count(D: int, N: int) -> int:
    """Number of words of length <= N over D letters."""
    if N < 0:
        return 0
    if D == 1:
        return N + 1
    return (D ** (N + 1) - 1) // (D - 1)


def iter_words(D: int, max_len: int) -> Iterator[Word]:
    """Yield all words of length <= max_len, shortest first, lexicographic within a length."""
    for length in range(max_len + 1):
        yield from itertools.product(range(1, D + 1), repeat=length)


# ---------------------------------------------------------------------------
# System
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mode:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


@dataclass(frozen=True)
class ValidationIssue:
    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _matrix(data, rows: int, cols: int) -> np.ndarray:
    arr = np.array(data, dtype=float)
    # JSON cannot express the shape of an empty matrix
    if arr.size == 0 and rows >= 0 and cols >= 0 and rows * cols == 0:
        return np.zeros((rows, cols))
    return arr


@dataclass(frozen=True, eq=False)
class Lss:
    """
    Continuous-time linear switched system.

    Modes are stored 0-based in `modes`; the public accessors take the
    1-based mode index q used throughout the theory.
    """

    p: int
    m: int
    n: int
    D: int
    modes: tuple[Mode, ...]
    x0: np.ndarray = field(repr=False)

    @classmethod
    def from_matrices(cls, As, Bs, Cs, x0=None) -> "Lss":
        """Build a system from per-mode lists, inferring dimensions from mode 1."""
        As = [np.atleast_2d(np.array(A, dtype=float)) for A in As]
        n = As[0].shape[0] if As else 0
        Bs = [np.array(B, dtype=float) for B in Bs]
        Bs = [B.reshape(n, 1) if B.ndim == 1 else B for B in Bs]
        Cs = [np.array(C, dtype=float) for C in Cs]
        Cs = [C.reshape(1, n) if C.ndim == 1 else C for C in Cs]
        m = Bs[0].shape[1] if Bs else 0
        p = Cs[0].shape[0] if Cs else 0
        x0 = np.zeros(n) if x0 is None else np.array(x0, dtype=float).reshape(-1)
        modes = tuple(Mode(_frozen(A), _frozen(B), _frozen(C)) for A, B, C in zip(As, Bs, Cs))
        return cls(p=p, m=m, n=n, D=len(modes), modes=modes, x0=_frozen(x0))

    def A(self, q: int) -> np.ndarray:
        return self.modes[q - 1].A

    def B(self, q: int) -> np.ndarray:
        return self.modes[q - 1].B

    def C(self, q: int) -> np.ndarray:
        return self.modes[q - 1].C

    def c_tilde(self) -> np.ndarray:
        """Stacked outputs [C_1; ...; C_D] (Dp x n)."""
        return np.vstack([mode.C for mode in self.modes])

    def b_tilde(self) -> np.ndarray:
        """Stacked inputs [x0, B_1, ..., B_D] (n x (mD + 1))."""
        return np.hstack([self.x0.reshape(-1, 1)] + [mode.B for mode in self.modes])

    def dual(self) -> "Lss":
        """Data ({A_q^T, C_q^T}, 0) used to compute observability spaces by reachability."""
        return Lss.from_matrices(
            [mode.A.T for mode in self.modes],
            [mode.C.T for mode in self.modes],
            [mode.B.T for mode in self.modes],
            np.zeros(self.n),
        )

    # JSON model format -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "n": self.n,
            "D": self.D,
            "modes": [
                {"A": mode.A.tolist(), "B": mode.B.tolist(), "C": mode.C.tolist()}
                for mode in self.modes
            ],
            "x0": self.x0.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Lss":
        """
        Build a system from the JSON model format.

        Dimensions are taken from the declared p, m, n, D; mismatching matrices
        are kept as-is so that validate() can report them.

        Raises:
            InvalidInputError: If a key is missing or an entry is not numeric
        """
        try:
            p, m, n, D = (int(data[key]) for key in ("p", "m", "n", "D"))
            modes = tuple(
                Mode(
                    _frozen(_matrix(mode["A"], n, n)),
                    _frozen(_matrix(mode["B"], n, m)),
                    _frozen(_matrix(mode["C"], p, n)),
                )
                for mode in data["modes"]
            )
            x0 = _frozen(np.array(data["x0"], dtype=float).reshape(-1))
        except KeyError as e:
            raise InvalidInputError(f"Model JSON is missing key {e}") from e
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Model JSON holds non-numeric data: {e}") from e
        return cls(p=p, m=m, n=n, D=D, modes=modes, x0=x0)


def validate(sys: Lss) -> list[ValidationIssue]:
    """
    Collect every invariant violation of a system.

    Returns:
        list: empty when the system is well formed
    """
    issues = []
    if sys.D < 1:
        issues.append(ValidationIssue("D", f"need at least one mode, got D={sys.D}"))
    if sys.n < 0:
        issues.append(ValidationIssue("n", f"state dimension must be >= 0, got {sys.n}"))
    if sys.m < 1:
        issues.append(ValidationIssue("m", f"input dimension must be >= 1, got {sys.m}"))
    if sys.p < 1:
        issues.append(ValidationIssue("p", f"output dimension must be >= 1, got {sys.p}"))
    if len(sys.modes) != sys.D:
        issues.append(ValidationIssue("modes", f"expected {sys.D} modes, got {len(sys.modes)}"))

    expected = {"A": (sys.n, sys.n), "B": (sys.n, sys.m), "C": (sys.p, sys.n)}
    for q, mode in enumerate(sys.modes, start=1):
        for name, shape in expected.items():
            arr = getattr(mode, name)
            if arr.shape != shape:
                issues.append(ValidationIssue(
                    f"mode {q} field {name}", f"expected shape {shape}, got {arr.shape}"))
            elif not np.all(np.isfinite(arr)):
                issues.append(ValidationIssue(f"mode {q} field {name}", "non-finite entries"))

    if sys.x0.shape != (sys.n,):
        issues.append(ValidationIssue("x0", f"expected length {sys.n}, got {sys.x0.shape[0]}"))
    elif not np.all(np.isfinite(sys.x0)):
        issues.append(ValidationIssue("x0", "non-finite entries"))
    return issues


def ensure_valid(sys: Lss) -> Lss:
    issues = validate(sys)
    if issues:
        raise ModelValidationError(issues)
    return sys


# ---------------------------------------------------------------------------
# Word products and Markov parameters
# ---------------------------------------------------------------------------

def a_word(sys: Lss, word: Word) -> np.ndarray:
    """
    A_w = A_{q_k} ... A_{q_1} for w = q_1 ... q_k (first letter acts first).

    A_epsilon is the identity.
    """
    check_word(word, sys.D)
    result = np.eye(sys.n)
    for q in word:
        result = sys.A(q) @ result
    return result


@dataclass(frozen=True, eq=False)
class MarkovParameter:
    word: Word
    value: np.ndarray


def markov_parameter(sys: Lss, word: Word) -> MarkovParameter:
    """M(v) = C~ A_v B~, a (Dp) x (mD + 1) matrix."""
    return MarkovParameter(word, sys.c_tilde() @ a_word(sys, word) @ sys.b_tilde())


def markov_parameters_up_to(sys: Lss, N: int, max_words: int = DEFAULT_MAX_WORDS) -> dict:
    """
    All Markov parameters for words of length <= N.

    Products are built incrementally (A_{w q} B~ = A_q (A_w B~)) level by level,
    so the returned dict iterates in the word ordering (shortest first).

    Raises:
        SizeLimitError: If the number of words exceeds max_words
    """
    if N < 0:
        raise InvalidInputError(f"N must be >= 0, got {N}")
    count = word_count(sys.D, N)
    if count > max_words:
        raise SizeLimitError(
            f"{count} words of length <= {N} over {sys.D} modes exceed the limit of {max_words}")

    C_tilde = sys.c_tilde()
    level = {EPSILON: sys.b_tilde()}
    result = {EPSILON: MarkovParameter(EPSILON, C_tilde @ level[EPSILON])}
    for _ in range(N):
        next_level = {}
        for word, X in level.items():
            for q in range(1, sys.D + 1):
                longer = word + (q,)
                next_level[longer] = sys.A(q) @ X
                result[longer] = MarkovParameter(longer, C_tilde @ next_level[longer])
        level = next_level
    return result


def minimize(sys: Lss, tol: float | None = None) -> Lss:
    """
    Reachability reduction followed by observability reduction.

    Projects onto R_{n-1} (one-sided, reachability side) and then factors out
    O_{n-1} of the result (one-sided, observability side). The result has the
    same Markov parameters as the input.
    """
    # local imports: both modules build on this one
    from .linalg import DEFAULT_TOL
    from .moment import project_observability, project_reachability
    from .subspaces import reach_space, unobs_space

    ensure_valid(sys)
    tol = DEFAULT_TOL if tol is None else tol
    if sys.n == 0:
        return sys

    reachable = project_reachability(sys, reach_space(sys, sys.n - 1, tol).V)
    if reachable.n == 0:
        return reachable
    minimal = project_observability(reachable, unobs_space(reachable, reachable.n - 1, tol).W)
    logger.debug("minimize: n=%d -> reachable %d -> minimal %d", sys.n, reachable.n, minimal.n)
    return minimal


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def load_model(path) -> Lss:
    """
    Load a model JSON file.

    Raises:
        FileNotFoundError: If the file does not exist
        InvalidInputError: If the JSON is malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model not found at {path}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from e
    return Lss.from_dict(data)


def save_model(sys: Lss, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(sys.to_dict(), f)
    return path
