"""
Random test systems for experiments and tests.

Each mode matrix is a scaled Gaussian matrix shifted so that its spectral
abscissa (largest real part of an eigenvalue) takes a prescribed value:
negative values give stable modes, positive values unstable ones.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import InfeasibleError, InvalidInputError
from .model import Lss
from .subspaces import is_minimal

logger = logging.getLogger(__name__)

STABLE_ABSCISSA = -0.5
UNSTABLE_ABSCISSA = 0.5


def random_mode_matrix(n: int, rng: np.random.Generator, abscissa: float, scale: float = 1.0) -> np.ndarray:
    S = scale * rng.standard_normal((n, n)) / np.sqrt(max(n, 1))
    if n == 0:
        return S
    shift = abscissa - np.max(np.linalg.eigvals(S).real)
    return S + shift * np.eye(n)


def mode_abscissae(D: int, abscissa, default: float = STABLE_ABSCISSA) -> list:
    """
    One spectral abscissa per mode.

    `abscissa` is a number for every mode, a sequence of D values, or a
    dict {q: value} whose missing modes get `default`.
    """
    if isinstance(abscissa, dict):
        unknown = sorted(q for q in abscissa if not 1 <= q <= D)
        if unknown:
            raise InvalidInputError(f"Abscissa given for modes {unknown}; the system has {D}")
        return [float(abscissa.get(q, default)) for q in range(1, D + 1)]
    if np.isscalar(abscissa):
        return [float(abscissa)] * D
    values = [float(a) for a in abscissa]
    if len(values) != D:
        raise InvalidInputError(f"Expected {D} abscissae, got {len(values)}")
    return values


def random_lss(n: int, D: int, m: int = 1, p: int = 1, seed=None, stable: bool = True,
               abscissa=None, scale: float = 1.0, zero_x0: bool = False) -> Lss:
    """
    Random linear switched system.

    Args:
        n: state dimension
        D: number of modes
        m: inputs
        p: outputs
        seed: seed for numpy's default_rng
        stable: default abscissa -0.5 when True, +0.5 when False
        abscissa: spectral abscissa per mode (see mode_abscissae), overrides `stable`
        scale: standard deviation scale of the unshifted mode matrices
        zero_x0: use x0 = 0 instead of a random initial state
    """
    if n < 0 or D < 1 or m < 1 or p < 1:
        raise InvalidInputError(f"Invalid dimensions n={n}, D={D}, m={m}, p={p}")
    rng = np.random.default_rng(seed)
    default = STABLE_ABSCISSA if stable else UNSTABLE_ABSCISSA
    abscissae = mode_abscissae(D, default if abscissa is None else abscissa, default)
    As = [random_mode_matrix(n, rng, a, scale) for a in abscissae]
    Bs = [rng.standard_normal((n, m)) for _ in range(D)]
    Cs = [rng.standard_normal((p, n)) for _ in range(D)]
    x0 = np.zeros(n) if zero_x0 else rng.standard_normal(n)
    return Lss.from_matrices(As, Bs, Cs, x0)


def random_minimal_lss(n: int, D: int, m: int = 1, p: int = 1, seed=None, attempts: int = 20,
                       **kwargs) -> Lss:
    """Random system that is span-reachable and observable; redraws up to `attempts` times."""
    seeds = np.random.SeedSequence(seed).spawn(attempts)
    for child in seeds:
        sys = random_lss(n, D, m, p, seed=child, **kwargs)
        if is_minimal(sys):
            return sys
        logger.debug("random_minimal_lss: draw not minimal, retrying")
    raise InfeasibleError(f"No minimal system found in {attempts} draws")
