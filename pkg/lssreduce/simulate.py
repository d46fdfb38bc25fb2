"""
Simulation of switched systems along timed switching sequences, random
dwell-time switching signals, white-noise inputs and the best-fit rate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import CoverageError, DimensionError, InfeasibleError, InvalidInputError
from .linalg import expm
from .model import Lss, Word, check_word, ensure_valid

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class SwitchingSequence:
    """Timed mode sequence (q_1, t_1) ... (q_k, t_k) with every t_i > 0."""

    segments: tuple

    def __post_init__(self):
        segments = tuple((int(q), float(t)) for q, t in self.segments)
        if not segments:
            raise InvalidInputError("A switching sequence needs at least one segment")
        for q, t in segments:
            if q < 1:
                raise InvalidInputError(f"Mode {q} is not a valid mode index")
            if not (np.isfinite(t) and t > 0):
                raise InvalidInputError(f"Segment duration must be positive, got {t}")
        object.__setattr__(self, "segments", segments)

    @property
    def total_duration(self) -> float:
        return float(sum(t for _, t in self.segments))

    @property
    def mode_word(self) -> Word:
        return tuple(q for q, _ in self.segments)

    @classmethod
    def parse(cls, text: str) -> "SwitchingSequence":
        """Parse "1:0.7,2:0.3" into ((1, 0.7), (2, 0.3))."""
        try:
            pairs = [item.split(":") for item in text.split(",") if item.strip()]
            return cls(tuple((int(q), float(t)) for q, t in pairs))
        except ValueError as e:
            raise InvalidInputError(f"Cannot parse switching sequence {text!r}: {e}") from e

    def __str__(self):
        return "".join(f"({q},{t:g})" for q, t in self.segments)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Uniformly sampled vector signal; values has one row per sample."""

    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidInputError(f"Sampling step must be positive, got {self.dt}")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("Signal contains non-finite samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def to_frame(self, prefix: str = "v") -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=[f"{prefix}{i + 1}" for i in range(self.channels)])
        frame.insert(0, "t", self.times)
        return frame


def write_signal_csv(signal: SampledSignal, path) -> Path:
    """Write t,v1..vk with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    signal.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def read_signal_csv(path) -> SampledSignal:
    """
    Read a signal CSV written by write_signal_csv.

    Raises:
        InvalidInputError: If the file has no t column or fewer than two rows
    """
    frame = pd.read_csv(path)
    if "t" not in frame.columns or len(frame) < 2:
        raise InvalidInputError(f"{path} needs a 't' column and at least two samples")
    t = frame["t"].to_numpy()
    dt = float(t[1] - t[0])
    return SampledSignal(dt, frame.drop(columns="t").to_numpy())


def _zoh_maps(sys: Lss, dt: float) -> list:
    # expm([[A, B], [0, 0]] dt) = [[Phi, Gamma], [0, I]]
    n, m = sys.n, sys.m
    maps = []
    for mode in sys.modes:
        augmented = np.zeros((n + m, n + m))
        augmented[:n, :n] = mode.A
        augmented[:n, n:] = mode.B
        E = expm(augmented, dt)
        maps.append((E[:n, :n], E[:n, n:]))
    return maps


def grid_steps(mu: SwitchingSequence, dt: float) -> list:
    """Number of dt steps per segment after snapping switch instants to the grid."""
    boundaries = np.rint(np.cumsum([t for _, t in mu.segments]) / dt).astype(int)
    steps = np.diff(np.concatenate([[0], boundaries]))
    if np.any(steps <= 0):
        raise CoverageError(f"A segment of {mu} is shorter than half a step (dt={dt})")
    return steps.tolist()


def simulate(sys: Lss, mu: SwitchingSequence, u: SampledSignal) -> SampledSignal:
    """
    Output of the system along a timed switching sequence.

    The input is held constant over each step (zero-order hold) and the state is
    advanced by the exact exponential of the augmented matrix, so the result is
    exact for piecewise-constant inputs. The state carries over across switches.
    Output sample j is C_q x(j dt) with q the mode active on the step ending at
    j (the first mode at j = 0).

    Args:
        sys: system to simulate
        mu: timed switching sequence
        u: input samples; row k acts on [k dt, (k+1) dt)

    Returns:
        SampledSignal: K + 1 output samples on the input grid, K = total steps

    Raises:
        CoverageError: If u has fewer than K samples
    """
    ensure_valid(sys)
    check_word(mu.mode_word, sys.D)
    if u.channels != sys.m:
        raise DimensionError(f"Input has {u.channels} channels, system expects {sys.m}")

    steps = grid_steps(mu, u.dt)
    total = sum(steps)
    if len(u.values) < total:
        raise CoverageError(
            f"Input covers {len(u.values)} steps but the switching sequence needs {total}")

    maps = _zoh_maps(sys, u.dt)
    y = np.empty((total + 1, sys.p))
    x = np.array(sys.x0, dtype=float)
    y[0] = sys.C(mu.segments[0][0]) @ x
    k = 0
    for (q, _), count in zip(mu.segments, steps):
        Phi, Gamma = maps[q - 1]
        C = sys.C(q)
        for _ in range(count):
            x = Phi @ x + Gamma @ u.values[k]
            k += 1
            y[k] = C @ x
    return SampledSignal(u.dt, y)


def _dwell_array(D: int, min_dwell) -> np.ndarray:
    if isinstance(min_dwell, dict):
        missing = set(range(1, D + 1)) - set(min_dwell)
        if missing:
            raise InvalidInputError(f"Minimum dwell time missing for modes {sorted(missing)}")
        min_dwell = [min_dwell[q] for q in range(1, D + 1)]
    dwell = np.array(min_dwell, dtype=float).reshape(-1)
    if dwell.size == 1:
        dwell = np.full(D, dwell[0])
    if dwell.size != D:
        raise InvalidInputError(f"Need {D} minimum dwell times, got {dwell.size}")
    if not np.all(dwell > 0):
        raise InvalidInputError("Minimum dwell times must be positive")
    return dwell


def random_switching(D: int, horizon: float, min_dwell, seed=None,
                     first_mode: int | None = None,
                     mean_extra: float | None = None) -> SwitchingSequence:
    """
    Random switching signal with per-mode minimum dwell time.

    Each segment lasts its mode's minimum dwell plus an exponential extra
    (mean `mean_extra`, default the mean minimum dwell). Consecutive modes
    differ. The last segment absorbs whatever remains of the horizon, and a
    segment is stretched to the horizon when the remainder could not host the
    next mode's minimum dwell.

    Args:
        D: number of modes
        horizon: total duration
        min_dwell: per-mode minimum dwell (sequence, dict q -> value, or scalar)
        seed: seed for numpy's default_rng
        first_mode: pin the first active mode

    Raises:
        InfeasibleError: If no mode (or not the pinned first mode) fits in the horizon
    """
    dwell = _dwell_array(D, min_dwell)
    if not horizon >= dwell.min():
        logger.error("horizon %s shorter than every minimum dwell %s", horizon, dwell)
        raise InfeasibleError(f"Horizon {horizon} is shorter than every minimum dwell time")
    if first_mode is not None and not (1 <= first_mode <= D and dwell[first_mode - 1] <= horizon):
        raise InfeasibleError(f"Mode {first_mode} cannot start a sequence of length {horizon}")

    if D == 1:
        return SwitchingSequence(((1, float(horizon)),))

    rng = np.random.default_rng(seed)
    scale = float(np.mean(dwell)) if mean_extra is None else float(mean_extra)
    if first_mode is None:
        feasible = [q for q in range(1, D + 1) if dwell[q - 1] <= horizon]
        q = int(rng.choice(feasible))
    else:
        q = int(first_mode)

    segments, t = [], 0.0
    while True:
        remaining = horizon - t
        duration = dwell[q - 1] + rng.exponential(scale)
        following = int(rng.choice([r for r in range(1, D + 1) if r != q]))
        if duration >= remaining or remaining - duration < dwell[following - 1]:
            segments.append((q, remaining))
            break
        segments.append((q, duration))
        t += duration
        q = following
    return SwitchingSequence(tuple(segments))


def white_noise(m: int, horizon: float, dt: float, seed=None) -> SampledSignal:
    """I.i.d. standard normal samples covering [0, horizon] on a dt grid."""
    rng = np.random.default_rng(seed)
    count = int(np.rint(horizon / dt)) + 1
    return SampledSignal(dt, rng.standard_normal((count, m)))


def constant_input(m: int, horizon: float, dt: float, value: float = 0.0) -> SampledSignal:
    count = int(np.rint(horizon / dt)) + 1
    return SampledSignal(dt, np.full((count, m), float(value)))


def bfr(y: SampledSignal, ybar: SampledSignal) -> float:
    """
    Best fit rate 100 * max(1 - ||y - ybar|| / ||y - y_m||, 0) in percent.

    y_m is the per-channel time mean of the reference y. For a constant
    reference the rate is 100 when ybar equals y and 0 otherwise.
    """
    if y.values.shape != ybar.values.shape:
        raise DimensionError(f"Signal shapes differ: {y.values.shape} vs {ybar.values.shape}")
    if not np.isclose(y.dt, ybar.dt, rtol=1e-12, atol=0.0):
        raise DimensionError(f"Sampling steps differ: {y.dt} vs {ybar.dt}")

    error = np.linalg.norm(y.values - ybar.values)
    spread = np.linalg.norm(y.values - y.values.mean(axis=0))
    if spread == 0.0:
        return 100.0 if error == 0.0 else 0.0
    return float(100.0 * max(1.0 - error / spread, 0.0))
