"""
Shared fixtures for the lssreduce tests
"""

import numpy as np
import pytest

from lssreduce.generate import random_lss
from lssreduce.model import Lss


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_system():
    """n=4, D=2, m=p=1 stable system with a random initial state."""
    return random_lss(4, 2, 1, 1, seed=7)


@pytest.fixture
def zero_x0_system():
    """n=8, D=2, m=p=1 system with x0 = 0, so R_N and O_N have the same dimension."""
    return random_lss(8, 2, 1, 1, seed=11, zero_x0=True)


@pytest.fixture
def block_system():
    """
    n=6 system with state blocks a=(0,1), b=(2,3), c=(4,5).

    A_1 keeps a and maps b into c, A_2 maps a into b; inputs and x0 live in a
    and the output sees c. Block c is reached along 21 but never along 12.
    """
    rng = np.random.default_rng(3)
    a, b, c = slice(0, 2), slice(2, 4), slice(4, 6)
    A1 = np.zeros((6, 6))
    A1[a, a] = rng.standard_normal((2, 2))
    A1[c, b] = rng.standard_normal((2, 2))
    A1[c, c] = -np.eye(2)
    A2 = np.zeros((6, 6))
    A2[b, a] = rng.standard_normal((2, 2))
    A2[b, b] = -np.eye(2)
    A2[c, c] = -np.eye(2)
    B = np.zeros((6, 1))
    B[a, 0] = rng.standard_normal(2)
    C = np.zeros((1, 6))
    C[0, a] = rng.standard_normal(2)
    C[0, c] = [1.0, 1.0]
    x0 = np.zeros(6)
    x0[a] = rng.standard_normal(2)
    return Lss.from_matrices([A1, A2], [B, B], [C, C], x0)


def _span_distance(X, Y, tol=1e-10):
    """Spectral distance between the projectors onto im(X) and im(Y), computed with plain numpy."""
    def projector(M):
        M = np.atleast_2d(M)
        if M.size == 0:
            return np.zeros((M.shape[0], M.shape[0]))
        U, s, _ = np.linalg.svd(M, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            return np.zeros((M.shape[0], M.shape[0]))
        U = U[:, s > tol * s[0]]
        return U @ U.T
    return float(np.linalg.norm(projector(X) - projector(Y), 2))


@pytest.fixture
def span_distance():
    return _span_distance
