"""
Synthetic Trace Generator
Builds occupancy traces and epochs from per-channel fitted models
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from chanbond.errors import InvalidArgumentError
from chanbond.models.synth import ChannelModel, FittedEpoch, IidChannelParams, MarkovChannelParams, ModelKind
from chanbond.models.trace import DEFAULT_SAMPLE_PERIOD_NS, Epoch, OccupancyTrace

from .iid import sample_iid_channel
from .markov import sample_markov_channel

logger = logging.getLogger(__name__)


def _sample_channel(model: ChannelModel, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(model, MarkovChannelParams):
        return sample_markov_channel(model, n_samples, rng)
    if isinstance(model, IidChannelParams):
        return sample_iid_channel(model, n_samples, rng)
    raise InvalidArgumentError(f"Unknown channel model {type(model).__name__}")


def generate_channels(
    models: Sequence[ChannelModel],
    n_samples: int,
    seed: int,
    sample_period_ns: int = DEFAULT_SAMPLE_PERIOD_NS,
    channel_labels: Optional[List[int]] = None,
) -> OccupancyTrace:
    """Simulate each channel independently, in column order, from one seeded stream"""
    if not models:
        raise InvalidArgumentError("At least one channel model is required")
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(seed)
    columns = [_sample_channel(model, n_samples, rng) for model in models]
    return OccupancyTrace(
        bits=np.column_stack(columns),
        sample_period_ns=sample_period_ns,
        channel_labels=channel_labels or [],
        meta={"source": "synthetic", "seed": seed},
    )


def generate_markov(
    params: Sequence[MarkovChannelParams],
    n_samples: int,
    seed: int,
    sample_period_ns: int = DEFAULT_SAMPLE_PERIOD_NS,
) -> OccupancyTrace:
    return generate_channels(params, n_samples, seed, sample_period_ns)


def generate_iid(
    channel_means: Sequence[Union[float, IidChannelParams]],
    n_samples: int,
    seed: int,
    sample_period_ns: int = DEFAULT_SAMPLE_PERIOD_NS,
) -> OccupancyTrace:
    models = [
        m if isinstance(m, IidChannelParams) else IidChannelParams(occupancy_probability=m)
        for m in channel_means
    ]
    return generate_channels(models, n_samples, seed, sample_period_ns)


def synthesize_epoch(source: Epoch, fitted: FittedEpoch, seed: int) -> Epoch:
    """Same-length synthetic stand-in for a source epoch"""
    if len(fitted.channels) != source.n_channels:
        raise InvalidArgumentError(
            f"Fitted {len(fitted.channels)} channels for a {source.n_channels}-channel epoch"
        )
    trace = generate_channels(fitted.channels, source.n_samples, seed, source.sample_period_ns)
    return Epoch.from_bits(
        trace.bits,
        epoch_id=source.epoch_id,
        sample_period_ns=source.sample_period_ns,
        band_name=source.band_name,
        channel_labels=list(source.channel_labels),
    )


def epochs_from_trace(trace: OccupancyTrace, epoch_samples: int, band_name: str = "synthetic") -> List[Epoch]:
    """Cut a generated trace into back-to-back epochs without any occupancy filter"""
    if epoch_samples < 1:
        raise InvalidArgumentError(f"epoch_samples must be >= 1, got {epoch_samples}")
    epochs = []
    for k in range(trace.n_samples // epoch_samples):
        start = k * epoch_samples
        epochs.append(Epoch.from_bits(
            trace.bits[start: start + epoch_samples],
            source_offset=start,
            sample_period_ns=trace.sample_period_ns,
            epoch_id=k,
            band_name=band_name,
            channel_labels=list(trace.channel_labels),
        ))
    return epochs


def perfectly_correlated_epochs(
    params: MarkovChannelParams,
    n_epochs: int,
    n_channels: int,
    epoch_samples: int,
    seed: int,
    sample_period_ns: int = DEFAULT_SAMPLE_PERIOD_NS,
) -> List[Epoch]:
    """Epochs whose channels all replay one Markov series, so every pairwise correlation is 1"""
    base = generate_channels([params], n_epochs * epoch_samples, seed, sample_period_ns)
    bits = np.repeat(base.bits, n_channels, axis=1)
    trace = OccupancyTrace(bits=bits, sample_period_ns=sample_period_ns, meta={"source": "correlated"})
    return epochs_from_trace(trace, epoch_samples, band_name="correlated")


def synthetic_corpus(
    model: ModelKind,
    n_epochs: int,
    n_channels: int,
    epoch_samples: int,
    mean_occupancy: float,
    seed: int,
    sample_period_ns: int = DEFAULT_SAMPLE_PERIOD_NS,
    mean_busy_range: Tuple[float, float] = (5.0, 50.0),
) -> List[Epoch]:
    """Independent epochs whose per-channel occupancies scatter uniformly in (0, 2 * mean_occupancy)"""
    if not 0.0 < mean_occupancy < 1.0:
        raise InvalidArgumentError(f"mean_occupancy must lie in (0, 1), got {mean_occupancy}")
    if n_epochs < 1 or n_channels < 1:
        raise InvalidArgumentError("A synthetic corpus needs at least one epoch and one channel")
    epochs = []
    for k in range(n_epochs):
        rng = np.random.default_rng([seed, k])
        occupancy = np.clip(rng.uniform(0.0, 2.0 * mean_occupancy, n_channels), 0.01, 0.95)
        if model is ModelKind.MARKOV:
            busy = rng.uniform(*mean_busy_range, n_channels)
            models: List[ChannelModel] = [
                MarkovChannelParams(mean_busy_duration=b, mean_idle_duration=max(1.0, b * (1.0 - o) / o))
                for b, o in zip(busy, occupancy)
            ]
        else:
            models = [IidChannelParams(occupancy_probability=float(o)) for o in occupancy]
        trace = generate_channels(models, epoch_samples, int(rng.integers(2**32)), sample_period_ns)
        epochs.append(Epoch.from_bits(
            trace.bits,
            source_offset=k * epoch_samples,
            sample_period_ns=sample_period_ns,
            epoch_id=k,
            band_name=f"synthetic-{model.value}",
        ))
    logger.info(f"Generated {n_epochs} {model.value} epochs of {epoch_samples} samples")
    return epochs
