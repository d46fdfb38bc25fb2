import json

import numpy as np
import pytest

from lssreduce.errors import InvalidInputError, LetterError, ModelValidationError, SizeLimitError
from lssreduce.generate import random_lss, random_minimal_lss
from lssreduce.model import (EPSILON, Lss, a_word, ensure_valid, format_word, iter_words, load_model,
                             markov_parameter, markov_parameters_up_to, minimize, parse_word, save_model,
                             validate, word_count)
from lssreduce.subspaces import is_minimal


def test_parse_and_format_words():
    assert parse_word("1221") == (1, 2, 2, 1)
    assert parse_word("") == EPSILON
    assert parse_word("ε") == EPSILON
    assert format_word(EPSILON) == "ε"
    assert format_word((1, 2), empty="") == "12"


def test_parse_word_rejects_letter_zero_and_out_of_range():
    with pytest.raises(LetterError):
        parse_word("102")
    with pytest.raises(LetterError):
        parse_word("13", D=2)
    with pytest.raises(InvalidInputError):
        parse_word("1a")


def test_word_count_and_order():
    assert word_count(2, 1) == 3
    assert word_count(2, 2) == 7
    assert word_count(1, 4) == 5
    words = list(iter_words(2, 2))
    assert words == [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]


def test_a_word_applies_first_letter_first():
    A1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    A2 = np.array([[1.0, 0.0], [1.0, 1.0]])
    sys = Lss.from_matrices([A1, A2], [np.ones(2)] * 2, [np.ones(2)] * 2)
    assert np.allclose(a_word(sys, (1, 2)), A2 @ A1)
    assert np.allclose(a_word(sys, EPSILON), np.eye(2))


def test_a_word_rejects_unknown_letter(small_system):
    with pytest.raises(LetterError):
        a_word(small_system, (3,))


def test_markov_parameter_shape_and_value(small_system):
    sys = small_system
    M = markov_parameter(sys, (2, 1)).value
    assert M.shape == (sys.D * sys.p, sys.m * sys.D + 1)
    expected = np.vstack([sys.C(1), sys.C(2)]) @ sys.A(1) @ sys.A(2) @ np.column_stack([sys.x0, sys.B(1), sys.B(2)])
    assert np.allclose(M, expected)


def test_markov_parameters_up_to_matches_direct_products(small_system):
    params = markov_parameters_up_to(small_system, 3)
    assert list(params) == list(iter_words(2, 3))
    for word, param in params.items():
        assert np.allclose(param.value, markov_parameter(small_system, word).value)


def test_markov_parameters_guard(small_system):
    with pytest.raises(SizeLimitError):
        markov_parameters_up_to(small_system, 10, max_words=100)


def test_validate_reports_each_issue():
    sys = Lss.from_matrices([np.eye(2), np.eye(2)], [np.ones((2, 1)), np.ones((3, 1))], [np.ones((1, 2))] * 2)
    issues = validate(sys)
    assert [issue.location for issue in issues] == ["mode 2 field B"]
    with pytest.raises(ModelValidationError) as info:
        ensure_valid(sys)
    assert info.value.issues == issues


def test_validate_non_finite_entries():
    A = np.eye(2)
    A[0, 0] = np.inf
    sys = Lss.from_matrices([A], [np.ones(2)], [np.ones(2)])
    assert validate(sys)[0].location == "mode 1 field A"


def test_json_round_trip_is_exact(tmp_path, small_system):
    path = save_model(small_system, tmp_path / "m.json")
    loaded = load_model(path)
    for q in range(1, small_system.D + 1):
        assert np.array_equal(loaded.A(q), small_system.A(q))
        assert np.array_equal(loaded.B(q), small_system.B(q))
        assert np.array_equal(loaded.C(q), small_system.C(q))
    assert np.array_equal(loaded.x0, small_system.x0)
    save_model(loaded, tmp_path / "again.json")
    assert (tmp_path / "m.json").read_text() == (tmp_path / "again.json").read_text()


def test_load_model_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_model(tmp_path / "bad.json")
    (tmp_path / "partial.json").write_text(json.dumps({"p": 1, "m": 1, "n": 1}))
    with pytest.raises(InvalidInputError):
        load_model(tmp_path / "partial.json")


def test_zero_dimensional_system_round_trips(tmp_path):
    sys = Lss.from_matrices([np.zeros((0, 0))], [np.zeros((0, 1))], [np.zeros((1, 0))])
    assert validate(sys) == []
    loaded = load_model(save_model(sys, tmp_path / "empty.json"))
    assert loaded.n == 0 and validate(loaded) == []


def padded_system():
    base = random_minimal_lss(3, 2, seed=5)
    # pad with an unreachable and unobservable state
    As = [np.block([[base.A(q), np.zeros((3, 1))], [np.zeros((1, 3)), -np.ones((1, 1))]]) for q in (1, 2)]
    Bs = [np.vstack([base.B(q), np.zeros((1, 1))]) for q in (1, 2)]
    Cs = [np.hstack([base.C(q), np.zeros((1, 1))]) for q in (1, 2)]
    return Lss.from_matrices(As, Bs, Cs, np.append(base.x0, 0.0))


def test_minimize_keeps_markov_parameters():
    padded = padded_system()
    minimal = minimize(padded)
    assert minimal.n == 3
    assert is_minimal(minimal)
    original = markov_parameters_up_to(padded, 4)
    reduced = markov_parameters_up_to(minimal, 4)
    for word in original:
        assert np.allclose(original[word].value, reduced[word].value, atol=1e-9)


@pytest.mark.parametrize("make", [padded_system, lambda: random_lss(4, 2, seed=8, zero_x0=True)])
def test_minimizing_twice_changes_nothing(make):
    sys = make()
    once = minimize(sys)
    twice = minimize(once)
    assert twice.n == once.n
    depth = 2 * sys.n
    first = markov_parameters_up_to(once, depth)
    second = markov_parameters_up_to(twice, depth)
    for word, param in first.items():
        scale = max(1.0, np.abs(param.value).max())
        assert np.allclose(param.value, second[word].value, rtol=0, atol=1e-9 * scale)


def test_random_lss_is_deterministic():
    a = random_lss(5, 2, seed=3)
    b = random_lss(5, 2, seed=3)
    assert np.array_equal(a.A(2), b.A(2))
    assert np.array_equal(a.x0, b.x0)


def test_random_lss_spectral_abscissa():
    sys = random_lss(6, 2, seed=1, stable=False)
    for q in (1, 2):
        assert np.max(np.linalg.eigvals(sys.A(q)).real) == pytest.approx(0.5)
    sys = random_lss(6, 2, seed=1)
    assert all(np.max(np.linalg.eigvals(sys.A(q)).real) < 0 for q in (1, 2))


def test_random_lss_per_mode_abscissa():
    for abscissa in ([-0.5, 0.5], {1: -0.5, 2: 0.5}, {2: 0.5}):
        sys = random_lss(6, 2, seed=2, abscissa=abscissa)
        for q, target in ((1, -0.5), (2, 0.5)):
            assert np.max(np.linalg.eigvals(sys.A(q)).real) == pytest.approx(target, abs=1e-9)
    with pytest.raises(InvalidInputError):
        random_lss(6, 2, abscissa=[0.1, 0.2, 0.3])
    with pytest.raises(InvalidInputError):
        random_lss(6, 2, abscissa={3: 0.1})
