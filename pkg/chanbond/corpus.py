"""
Epoch Corpus
Turns trace files, or a synthetic model, into the list of epochs a run works on
"""
import logging
from pathlib import Path
from typing import List, Sequence

from chanbond.config import RunConfig
from chanbond.errors import InvalidArgumentError
from chanbond.models.trace import Epoch, OccupancyTrace, PowerTrace
from chanbond.occupancy.operations import binarize, downsample, epoch_samples, segment_epochs
from chanbond.occupancy.trace_io import read_trace
from chanbond.synth.generator import synthetic_corpus

logger = logging.getLogger(__name__)


def occupancy_from_file(path: Path, config: RunConfig) -> OccupancyTrace:
    """Read a trace; power traces are downsampled and binarized with the configured CCA"""
    trace = read_trace(path, config.trace_kind)
    if isinstance(trace, PowerTrace):
        if config.downsample > 1:
            trace = downsample(trace, config.downsample, config.downsample_mode)
        return binarize(trace, config.to_phy_mac().cca)
    if config.downsample > 1:
        raise InvalidArgumentError(f"{path} is an occupancy trace; downsampling applies to power traces")
    return trace


def collect_epochs(paths: Sequence[Path], config: RunConfig) -> List[Epoch]:
    """Retained epochs of every input, numbered in file order then window order"""
    if config.synth is not None:
        epochs = synthetic_corpus(
            config.synth,
            config.synth_epochs,
            config.synth_channels,
            epoch_samples(config.epoch_duration_ns, config.slot_us * 1000),
            config.synth_occupancy,
            config.seed,
            sample_period_ns=config.slot_us * 1000,
        )
        return [e for e in epochs if e.mean_occupancy >= config.min_occupancy]

    if not paths:
        raise InvalidArgumentError("No trace files given and no synthetic model selected")
    band = config.band_spec()
    epochs: List[Epoch] = []
    base = 0
    for path in paths:
        trace = occupancy_from_file(Path(path), config)
        kept = segment_epochs(trace, band, config.epoch_duration_ns, config.min_occupancy)
        epochs.extend(e.model_copy(update={"epoch_id": base + e.epoch_id}) for e in kept)
        base += trace.n_samples // epoch_samples(config.epoch_duration_ns, trace.sample_period_ns)
    logger.info(f"{len(epochs)} epochs retained from {len(paths)} trace file(s)")
    return epochs
