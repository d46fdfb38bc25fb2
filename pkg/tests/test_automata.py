import numpy as np
import pytest

from lssreduce.automata import (Ndfa, accepted_words, generating_ndfa, left_quotient, load_ndfa, right_quotient,
                                save_ndfa, trim_coreachable)
from lssreduce.errors import InvalidInputError, SizeLimitError
from lssreduce.model import iter_words


def in_generating_language(word, upsilon):
    """Pattern oracle: word = (q_1)^w_1 ... (q_k)^w_k for some w_i >= 0."""
    position = 0
    for q in word:
        while position < len(upsilon) and upsilon[position] != q:
            position += 1
        if position == len(upsilon):
            return False
    return True


def random_ndfa(seed, states=6, D=2):
    rng = np.random.default_rng(seed)
    transitions = {(int(s), int(q), int(t))
                   for s, q, t in zip(rng.integers(0, states, 14), rng.integers(1, D + 1, 14),
                                      rng.integers(0, states, 14))}
    finals = frozenset(int(s) for s in rng.choice(states, 2, replace=False))
    return Ndfa(states, 0, finals, frozenset(transitions))


def test_epsilon_accepted_when_initial_is_final():
    a = Ndfa(1, 0, frozenset({0}), frozenset())
    assert a.accepts(())
    assert not a.accepts((1,))


def test_self_loop_language():
    a = Ndfa(1, 0, frozenset({0}), frozenset({(0, 1, 0)}))
    assert all(a.accepts((1,) * k) for k in range(6))
    assert not a.accepts((1, 2))


def test_invalid_automata_are_rejected():
    with pytest.raises(InvalidInputError):
        Ndfa(2, 2, frozenset(), frozenset())
    with pytest.raises(InvalidInputError):
        Ndfa(2, 0, frozenset({3}), frozenset())
    with pytest.raises(InvalidInputError):
        Ndfa(2, 0, frozenset(), frozenset({(0, 0, 1)}))


@pytest.mark.parametrize("upsilon", [(1, 2), (2, 1), (1, 1), (1, 2, 1), (2, 1, 1, 2), (3, 1, 2)])
def test_generating_language_matches_pattern(upsilon):
    a = generating_ndfa(upsilon)
    for word in iter_words(3, 5):
        assert a.accepts(word) == in_generating_language(word, upsilon), word


def test_generating_language_examples():
    a = generating_ndfa((1, 2))
    for word in [(), (1,), (2,), (1, 2), (1, 1, 2), (1, 2, 2)]:
        assert a.accepts(word)
    assert not a.accepts((2, 1))
    assert not a.accepts((1, 2, 1))
    single = generating_ndfa((1,))
    assert all(single.accepts((1,) * k) for k in range(5))


def test_generating_language_needs_a_mode():
    with pytest.raises(InvalidInputError):
        generating_ndfa(())


def test_repeated_letters_collapse():
    assert accepted_words(generating_ndfa((1, 1)), 5) == [(1,) * k for k in range(6)]


@pytest.mark.parametrize("upsilon", [(1, 2), (1, 2, 1), (2, 1, 1, 2)])
def test_generating_languages_are_prefix_closed(upsilon):
    a = generating_ndfa(upsilon)
    for word in iter_words(2, 6):
        if word and a.accepts(word):
            assert a.accepts(word[:-1])


@pytest.mark.parametrize("upsilon", [(1, 2), (1, 2, 1), (3, 1, 2), (2, 1, 1, 2)])
def test_quotients_match_prefix_and_suffix_definitions(upsilon):
    a = generating_ndfa(upsilon)
    for q in (1, 2, 3):
        left, right = left_quotient(a, q), right_quotient(a, q)
        for word in iter_words(3, 5):
            assert left.accepts(word) == a.accepts((q,) + word)
            assert right.accepts(word) == a.accepts(word + (q,))


def test_quotient_examples():
    a = generating_ndfa((1, 2))
    assert accepted_words(left_quotient(a, 2), 3) == [(), (2,), (2, 2), (2, 2, 2)]
    assert accepted_words(right_quotient(a, 1), 3) == [(), (1,), (1, 1), (1, 1, 1)]
    assert left_quotient(a, 3).is_empty()
    assert right_quotient(Ndfa(1, 0, frozenset({0}), frozenset({(0, 1, 0)})), 2).is_empty()


def test_trim_removes_dead_sink():
    a = Ndfa(3, 0, frozenset({1}), frozenset({(0, 1, 1), (0, 2, 2), (2, 1, 2)}))
    trimmed = trim_coreachable(a)
    assert trimmed.state_count == 2
    assert trimmed.is_coreachable()
    assert not a.is_coreachable()


@pytest.mark.parametrize("seed", range(8))
def test_trim_preserves_language_and_is_idempotent(seed):
    a = random_ndfa(seed)
    trimmed = trim_coreachable(a)
    assert trimmed.is_empty() or trimmed.is_coreachable()
    for word in iter_words(2, 8):
        assert trimmed.accepts(word) == a.accepts(word)
    assert trim_coreachable(trimmed) == trimmed


def test_trim_of_empty_language():
    a = Ndfa(2, 0, frozenset(), frozenset({(0, 1, 1)}))
    trimmed = trim_coreachable(a)
    assert trimmed.finals == frozenset()
    assert trimmed.is_empty()


def test_from_words_and_universal():
    words = [(), (1,), (2, 1), (2, 1, 2)]
    a = Ndfa.from_words(words)
    assert accepted_words(a, 4) == [(), (1,), (2, 1), (2, 1, 2)]
    assert a.is_finite()
    universal = Ndfa.universal(2)
    assert accepted_words(universal, 2) == list(iter_words(2, 2))
    assert not universal.is_finite()


def test_accepted_words_order():
    words = accepted_words(generating_ndfa((2, 1)), 2)
    assert words == [(), (1,), (2,), (1, 1), (2, 1), (2, 2)]
    expected = sorted(words, key=lambda w: (len(w), w))
    assert words == expected


def test_accepted_words_stops_at_limit():
    universal = Ndfa.universal(2)
    assert len(accepted_words(universal, 3, limit=15)) == 15
    with pytest.raises(SizeLimitError):
        accepted_words(universal, 40, limit=100)
    finite = Ndfa.from_words([(), (1,), (1, 2)])
    assert accepted_words(finite, 40, limit=3) == [(), (1,), (1, 2)]


def test_json_round_trip(tmp_path):
    a = generating_ndfa((1, 2, 1))
    loaded = load_ndfa(save_ndfa(a, tmp_path / "a.json"))
    assert loaded == a
    with pytest.raises(InvalidInputError):
        Ndfa.from_dict({"states": 1})
