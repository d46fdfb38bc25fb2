import numpy as np
import pytest
import scipy.linalg

from lssreduce.errors import InvalidInputError
from lssreduce.generate import random_lss
from lssreduce.model import Lss, a_word, iter_words
from lssreduce.subspaces import is_minimal, is_observable, is_span_reachable, reach_space, unobs_space


def brute_force_reach(sys, N):
    return np.hstack([a_word(sys, w) @ sys.b_tilde() for w in iter_words(sys.D, N)])


def brute_force_obs_rows(sys, N):
    return np.vstack([sys.c_tilde() @ a_word(sys, w) for w in iter_words(sys.D, N)])


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_reach_space_equals_brute_force_span(N, span_distance):
    sys = random_lss(6, 2, 1, 1, seed=21, zero_x0=True)
    V = reach_space(sys, N).V
    assert np.allclose(V.matrix.T @ V.matrix, np.eye(V.dim))
    assert span_distance(V.matrix, brute_force_reach(sys, N)) < 1e-10


@pytest.mark.parametrize("N", [0, 1, 2])
def test_unobs_space_kernel_equals_brute_force(N, span_distance):
    sys = random_lss(6, 2, 1, 1, seed=22)
    W = unobs_space(sys, N).W
    kernel = scipy.linalg.null_space(W)
    expected = scipy.linalg.null_space(brute_force_obs_rows(sys, N))
    assert kernel.shape[1] == expected.shape[1]
    assert span_distance(kernel, expected) < 1e-9


def test_reach_space_is_monotone_in_N():
    sys = random_lss(7, 2, 1, 1, seed=2)
    ranks = [reach_space(sys, N).rank for N in range(6)]
    assert ranks == sorted(ranks)
    assert ranks[-1] <= 7


def test_reach_space_rejects_negative_depth(small_system):
    with pytest.raises(InvalidInputError):
        reach_space(small_system, -1)


def test_reach_space_with_zero_inputs_is_empty():
    sys = Lss.from_matrices([np.eye(3)], [np.zeros((3, 1))], [np.ones((1, 3))])
    assert reach_space(sys, 2).rank == 0


def test_minimality_checks():
    sys = random_lss(4, 2, 1, 1, seed=8)
    assert is_span_reachable(sys) and is_observable(sys) and is_minimal(sys)

    # a diagonal mode with input only on the first state cannot reach the others
    A = np.diag([-1.0, -2.0, -3.0])
    B = np.array([[1.0], [0.0], [0.0]])
    C = np.ones((1, 3))
    partial = Lss.from_matrices([A], [B], [C])
    assert not is_span_reachable(partial)
    assert is_observable(partial)
    assert not is_minimal(partial)
