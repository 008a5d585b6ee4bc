"""
Model Fitting
Fits per-channel Markov or i.i.d. models to epochs, one epoch at a time or pooled over a corpus
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from chanbond.errors import DegenerateFitError, InvalidArgumentError
from chanbond.models.synth import ChannelModel, FittedEpoch, IidChannelParams, ModelKind
from chanbond.models.trace import Epoch

from .iid import fit_iid
from .markov import markov_from_runs, run_lengths

logger = logging.getLogger(__name__)


def _fit_pooled(
    series: Sequence[np.ndarray],
    model: ModelKind,
    channel: int,
    fallback_iid: bool,
) -> ChannelModel:
    if model is ModelKind.IID:
        return fit_iid(np.concatenate(series))
    busy, idle = zip(*(run_lengths(s) for s in series))
    try:
        return markov_from_runs(np.concatenate(busy), np.concatenate(idle), channel)
    except DegenerateFitError:
        if not fallback_iid:
            raise
        return IidChannelParams(occupancy_probability=float(np.concatenate(series).mean()))


def _fit_columns(
    epochs: Sequence[Epoch],
    model: ModelKind,
    fallback_iid: bool,
    epoch_id: Optional[int] = None,
) -> FittedEpoch:
    n_channels = epochs[0].n_channels
    channels: List[ChannelModel] = []
    fallback: List[int] = []
    for c in range(n_channels):
        fitted = _fit_pooled([e.bits[:, c] for e in epochs], model, c, fallback_iid)
        if model is ModelKind.MARKOV and isinstance(fitted, IidChannelParams):
            fallback.append(c)
        channels.append(fitted)
    if fallback:
        logger.warning(
            f"Channels {fallback} of epoch {epoch_id if epoch_id is not None else 'corpus'} "
            f"never change state; fitted as i.i.d."
        )
    return FittedEpoch(epoch_id=epoch_id, model=model, channels=channels, fallback_channels=fallback)


def fit_epoch(epoch: Epoch, model: ModelKind, fallback_iid: bool = True) -> FittedEpoch:
    """Fit every channel of one epoch; constant channels fall back to i.i.d. unless disabled"""
    return _fit_columns([epoch], model, fallback_iid, epoch_id=epoch.epoch_id)


def fit_corpus(
    epochs: Sequence[Epoch],
    model: ModelKind,
    per_corpus: bool = False,
    fallback_iid: bool = True,
) -> List[FittedEpoch]:
    """One fit per epoch, or a single fit pooling every epoch's runs per channel"""
    if not epochs:
        raise InvalidArgumentError("No epochs to fit")
    if len({e.n_channels for e in epochs}) != 1:
        raise InvalidArgumentError("All epochs must have the same number of channels")
    if per_corpus:
        return [_fit_columns(epochs, model, fallback_iid)]
    return [fit_epoch(e, model, fallback_iid) for e in epochs]
