"""
Nondeterministic finite automata over the mode alphabet {1, ..., D}.

Automata index the (possibly infinite) word languages of nice selections.
There are no epsilon transitions; quotients are built by aggregating
successor states instead.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import InvalidInputError, LetterError, SizeLimitError
from .model import EPSILON, Word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ndfa:
    """
    A = (S, Q, {->_q}, F, s0) with S = {0, ..., state_count - 1}.

    Attributes:
        state_count: number of states
        initial: initial state s0
        finals: accepting states F
        transitions: triples (from, letter, to)
    """

    state_count: int
    initial: int
    finals: frozenset
    transitions: frozenset

    def __post_init__(self):
        finals = frozenset(int(s) for s in self.finals)
        transitions = frozenset((int(s), int(q), int(t)) for s, q, t in self.transitions)
        object.__setattr__(self, "finals", finals)
        object.__setattr__(self, "transitions", transitions)

        states = range(self.state_count)
        if self.initial not in states:
            raise InvalidInputError(f"Initial state {self.initial} outside 0..{self.state_count - 1}")
        if not finals <= set(states):
            raise InvalidInputError(f"Final states {sorted(finals - set(states))} do not exist")
        for s, q, t in transitions:
            if s not in states or t not in states:
                raise InvalidInputError(f"Transition ({s}, {q}, {t}) has an invalid endpoint")
            if q < 1:
                raise LetterError(f"Transition ({s}, {q}, {t}) uses letter {q}; letters start at 1")

    # Construction ----------------------------------------------------------

    @classmethod
    def empty(cls) -> "Ndfa":
        """Single non-final state: accepts nothing."""
        return cls(1, 0, frozenset(), frozenset())

    @classmethod
    def universal(cls, D: int) -> "Ndfa":
        """Accepts every word over {1, ..., D}."""
        return cls(1, 0, frozenset({0}), frozenset((0, q, 0) for q in range(1, D + 1)))

    @classmethod
    def from_words(cls, words) -> "Ndfa":
        """Trie automaton accepting exactly the given finite word set."""
        children = [{}]
        finals = set()
        for word in sorted(set(tuple(w) for w in words), key=lambda w: (len(w), w)):
            state = 0
            for q in word:
                if q not in children[state]:
                    children.append({})
                    children[state][q] = len(children) - 1
                state = children[state][q]
            finals.add(state)
        transitions = {(s, q, t) for s, edges in enumerate(children) for q, t in edges.items()}
        return cls(len(children), 0, frozenset(finals), frozenset(transitions))

    # Structure -------------------------------------------------------------

    @cached_property
    def _outgoing(self) -> dict:
        out = defaultdict(list)
        for s, q, t in sorted(self.transitions):
            out[s].append((q, t))
        return out

    @cached_property
    def _incoming(self) -> dict:
        inc = defaultdict(list)
        for s, q, t in sorted(self.transitions):
            inc[t].append((q, s))
        return inc

    @property
    def letters(self) -> list:
        return sorted({q for _, q, _ in self.transitions})

    def successors(self, states, q: int) -> frozenset:
        return frozenset(t for s in states for letter, t in self._outgoing.get(s, ()) if letter == q)

    def accepts(self, word: Word) -> bool:
        current = frozenset({self.initial})
        for q in word:
            if q < 1:
                raise LetterError(f"Letter {q} is not a mode")
            current = self.successors(current, q)
            if not current:
                return False
        return bool(current & self.finals)

    __call__ = accepts

    def accessible_states(self) -> set:
        seen, stack = {self.initial}, [self.initial]
        while stack:
            s = stack.pop()
            for _, t in self._outgoing.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    def coreachable_states(self) -> set:
        """States from which some final state can be reached (backward search from F)."""
        seen, stack = set(self.finals), list(self.finals)
        while stack:
            t = stack.pop()
            for _, s in self._incoming.get(t, ()):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    def is_coreachable(self) -> bool:
        return len(self.coreachable_states()) == self.state_count

    def is_empty(self) -> bool:
        return self.initial not in self.coreachable_states()

    def is_finite(self) -> bool:
        """True iff the language is finite, i.e. the trimmed automaton has no cycle."""
        trimmed = trim_coreachable(self)
        colour = {}

        def has_cycle(s):
            colour[s] = 1
            for _, t in trimmed._outgoing.get(s, ()):
                if colour.get(t) == 1 or (t not in colour and has_cycle(t)):
                    return True
            colour[s] = 2
            return False

        return not any(s not in colour and has_cycle(s) for s in range(trimmed.state_count))

    # JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "states": self.state_count,
            "initial": self.initial,
            "finals": sorted(self.finals),
            "transitions": [list(tr) for tr in sorted(self.transitions)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Ndfa":
        try:
            return cls(
                int(data["states"]),
                int(data["initial"]),
                frozenset(data["finals"]),
                frozenset(tuple(tr) for tr in data["transitions"]),
            )
        except KeyError as e:
            raise InvalidInputError(f"Automaton JSON is missing key {e}") from e
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Malformed automaton JSON: {e}") from e


def trim_coreachable(a: Ndfa) -> Ndfa:
    """
    Equivalent automaton in which every state is accessible and co-reachable.

    States are renumbered in increasing order of their old ids. An empty
    language gives Ndfa.empty().
    """
    useful = a.accessible_states() & a.coreachable_states()
    if a.initial not in useful:
        return Ndfa.empty()
    renumber = {old: new for new, old in enumerate(sorted(useful))}
    trimmed = Ndfa(
        len(renumber),
        renumber[a.initial],
        frozenset(renumber[s] for s in a.finals if s in renumber),
        frozenset(
            (renumber[s], q, renumber[t])
            for s, q, t in a.transitions
            if s in renumber and t in renumber
        ),
    )
    if trimmed.state_count < a.state_count:
        logger.debug("trim_coreachable: %d -> %d states", a.state_count, trimmed.state_count)
    return trimmed


def generating_ndfa(upsilon: Word) -> Ndfa:
    """
    Automaton of the generating language of a mode sequence q_1 ... q_k.

    The language holds every word (q_1)^w_1 ... (q_k)^w_k with w_i >= 0.
    State s_i means "the last block used is q_i"; all states are final.
    """
    if not upsilon:
        raise InvalidInputError("The mode sequence must not be empty")
    if any(q < 1 for q in upsilon):
        raise LetterError(f"Mode sequence {upsilon} has letters below 1")
    k = len(upsilon)
    transitions = {(i, upsilon[j - 1], j) for i in range(k + 1) for j in range(i + 1, k + 1)}
    transitions |= {(i, upsilon[i - 1], i) for i in range(1, k + 1)}
    return Ndfa(k + 1, 0, frozenset(range(k + 1)), frozenset(transitions))


def left_quotient(a: Ndfa, q0: int) -> Ndfa:
    """Automaton accepting {w | q0 w in L(a)}; a fresh initial state takes over the q0-successors."""
    targets = a.successors({a.initial}, q0)
    fresh = a.state_count
    transitions = set(a.transitions)
    for s in targets:
        transitions |= {(fresh, q, t) for q, t in a._outgoing.get(s, ())}
    finals = set(a.finals)
    if targets & a.finals:
        finals.add(fresh)
    return Ndfa(a.state_count + 1, fresh, frozenset(finals), frozenset(transitions))


def right_quotient(a: Ndfa, q: int) -> Ndfa:
    """Automaton accepting {v | v q in L(a)}."""
    finals = {s for s, letter, t in a.transitions if letter == q and t in a.finals}
    return Ndfa(a.state_count, a.initial, frozenset(finals), a.transitions)


def accepted_words(a: Ndfa, max_len: int, limit: int | None = None) -> list:
    """
    Accepted words of length <= max_len, shortest first and lexicographic within a length.

    Raises:
        SizeLimitError: As soon as more than `limit` words have been found
    """
    letters = a.letters
    found = [EPSILON] if a.accepts(EPSILON) else []
    level = {EPSILON: frozenset({a.initial})}
    live = a.coreachable_states()
    for _ in range(max_len):
        next_level = {}
        for word, states in level.items():
            for q in letters:
                reached = a.successors(states, q) & live
                if reached:
                    next_level[word + (q,)] = reached
        level = next_level
        found.extend(w for w, states in sorted(level.items()) if states & a.finals)
        if limit is not None and len(found) > limit:
            raise SizeLimitError(f"Automaton accepts more than {limit} words of length <= {max_len}")
        if not level:
            break
    return found


def load_ndfa(path) -> Ndfa:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Automaton not found at {path}")
    with open(path, "r") as f:
        return Ndfa.from_dict(json.load(f))


def save_ndfa(a: Ndfa, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(a.to_dict(), f)
    return path
