"""I.i.d. Bernoulli occupancy baseline."""
from typing import Any

import numpy as np

from chanbond.errors import InvalidArgumentError
from chanbond.models.synth import IidChannelParams


def fit_iid(channel_series: Any) -> IidChannelParams:
    x = np.asarray(channel_series)
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgumentError("Expected a non-empty 1-D busy/idle series")
    return IidChannelParams(occupancy_probability=float(x.mean()))


def sample_iid_channel(params: IidChannelParams, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.random(n_samples) < params.occupancy_probability).astype(np.uint8)
