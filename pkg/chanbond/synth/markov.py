"""
Two-State Markov Channel
Run-length fitting and geometric-holding-time sampling of one busy/idle channel
"""
from typing import Any, Optional, Tuple

import numpy as np

from chanbond.errors import DegenerateFitError, InvalidArgumentError
from chanbond.models.synth import MarkovChannelParams


def _as_series(series: Any) -> np.ndarray:
    x = np.asarray(series)
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgumentError("Expected a non-empty 1-D busy/idle series")
    if not np.isin(x, (0, 1)).all():
        raise InvalidArgumentError("Series values must be 0 or 1")
    return x.astype(np.int8)


def run_lengths(series: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Lengths of the maximal busy runs and idle runs, boundary runs included"""
    x = _as_series(series)
    starts = np.concatenate(([0], np.flatnonzero(np.diff(x)) + 1))
    lengths = np.diff(np.concatenate((starts, [len(x)])))
    values = x[starts]
    return lengths[values == 1], lengths[values == 0]


def markov_from_runs(busy: np.ndarray, idle: np.ndarray, channel: Optional[Any] = None) -> MarkovChannelParams:
    if len(busy) == 0:
        raise DegenerateFitError(0, channel)
    if len(idle) == 0:
        raise DegenerateFitError(1, channel)
    return MarkovChannelParams(
        mean_busy_duration=float(np.mean(busy)),
        mean_idle_duration=float(np.mean(idle)),
    )


def fit_markov(channel_series: Any, channel: Optional[Any] = None) -> MarkovChannelParams:
    """Mean busy and idle holding times of a series that visits both states"""
    busy, idle = run_lengths(channel_series)
    return markov_from_runs(busy, idle, channel)


def sample_markov_channel(params: MarkovChannelParams, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """One channel: stationary initial state, then alternating geometric holding times"""
    state = int(rng.random() < params.stationary_occupancy)
    p_leave = (params.p_idle_to_busy, params.p_busy_to_idle)
    cycle = params.mean_busy_duration + params.mean_idle_duration
    batch = max(16, int(2 * n_samples / cycle) + 16)

    values, lengths = [], []
    covered = 0
    while covered < n_samples:
        # holding times of idle and busy runs, alternating from the current state
        idle_runs = rng.geometric(p_leave[0], size=batch)
        busy_runs = rng.geometric(p_leave[1], size=batch)
        pair = (idle_runs, busy_runs) if state == 0 else (busy_runs, idle_runs)
        chunk = np.column_stack(pair).ravel()
        lengths.append(chunk)
        values.append(np.tile([state, 1 - state], batch))
        covered += int(chunk.sum())
    lengths_all = np.concatenate(lengths)
    values_all = np.concatenate(values)
    return np.repeat(values_all, lengths_all)[:n_samples].astype(np.uint8)
