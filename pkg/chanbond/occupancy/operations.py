"""
Occupancy Operations
Binarization, downsampling, band occupancy and epoch segmentation of traces
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from chanbond.errors import InvalidArgumentError
from chanbond.models.trace import (
    RSSI_MAX_UNITS,
    BandSpec,
    CcaThreshold,
    Epoch,
    OccupancyTrace,
    PowerTrace,
    RssiCalibration,
)

logger = logging.getLogger(__name__)

DEFAULT_MIN_OCCUPANCY = 0.05
DEFAULT_EPOCH_MS = 100


def binarize(trace: PowerTrace, cca: Optional[CcaThreshold] = None) -> OccupancyTrace:
    """A sample is busy iff its power strictly exceeds the CCA threshold"""
    cca = cca or CcaThreshold()
    if trace.n_samples == 0:
        raise InvalidArgumentError("Cannot binarize an empty trace")
    bits = (trace.samples > cca.raw_units).astype(np.uint8)
    return OccupancyTrace(
        bits=bits,
        sample_period_ns=trace.sample_period_ns,
        channel_labels=list(trace.channel_labels),
        meta={**trace.meta, "cca_units": cca.raw_units},
    )


def downsample(trace: PowerTrace, factor: int, mode: str = "first") -> PowerTrace:
    """Keep one sample per block of `factor`; trailing partial blocks are dropped.

    mode "first" keeps the first sample of each block, "max" keeps the block
    maximum, which can only over-report occupancy.
    """
    if factor < 1:
        raise InvalidArgumentError(f"Downsampling factor must be >= 1, got {factor}")
    if trace.n_samples < factor:
        raise InvalidArgumentError(
            f"Trace has {trace.n_samples} samples, fewer than the factor {factor}"
        )
    n_blocks = trace.n_samples // factor
    blocks = trace.samples[: n_blocks * factor].reshape(n_blocks, factor, trace.n_channels)
    if mode == "first":
        samples = blocks[:, 0, :]
    elif mode == "max":
        samples = blocks.max(axis=1)
    else:
        raise InvalidArgumentError(f"Unknown downsampling mode '{mode}'")
    return PowerTrace(
        samples=samples,
        sample_period_ns=trace.sample_period_ns * factor,
        channel_labels=list(trace.channel_labels),
        meta=dict(trace.meta),
    )


def _check_band(band: BandSpec, n_channels: int) -> None:
    if not band.fits(n_channels):
        raise InvalidArgumentError(
            f"Band '{band.name}' needs column {band.channels[-1]} but the trace has {n_channels}"
        )


def mean_occupancy(
    trace: OccupancyTrace,
    band: BandSpec,
    sample_range: Optional[Tuple[int, int]] = None,
) -> float:
    """Fraction of busy (sample, channel) cells of a band over [start, stop)"""
    _check_band(band, trace.n_channels)
    start, stop = sample_range if sample_range is not None else (0, trace.n_samples)
    if not 0 <= start <= stop <= trace.n_samples:
        raise InvalidArgumentError(f"Sample range [{start}, {stop}) is outside the trace")
    if stop == start:
        raise InvalidArgumentError("Cannot compute the occupancy of an empty range")
    window = trace.bits[start:stop, band.columns]
    return int(window.sum(dtype=np.int64)) / window.size


def epoch_samples(epoch_duration_ns: int, sample_period_ns: int) -> int:
    """Samples per epoch; the duration must be a whole number of samples"""
    if epoch_duration_ns < sample_period_ns:
        raise InvalidArgumentError(
            f"Epoch of {epoch_duration_ns} ns is shorter than one sample ({sample_period_ns} ns)"
        )
    if epoch_duration_ns % sample_period_ns:
        raise InvalidArgumentError(
            f"Epoch of {epoch_duration_ns} ns is not a multiple of the sample period ({sample_period_ns} ns)"
        )
    return epoch_duration_ns // sample_period_ns


def segment_epochs(
    trace: OccupancyTrace,
    band: BandSpec,
    epoch_duration_ns: int = DEFAULT_EPOCH_MS * 1_000_000,
    min_occupancy: float = DEFAULT_MIN_OCCUPANCY,
) -> List[Epoch]:
    """Cut non-overlapping windows from sample 0 and keep those with occupancy >= min_occupancy"""
    _check_band(band, trace.n_channels)
    size = epoch_samples(epoch_duration_ns, trace.sample_period_ns)
    n_windows = trace.n_samples // size
    labels = [trace.channel_labels[c] for c in band.columns]

    band_bits = trace.bits[: n_windows * size, band.columns]
    windows = band_bits.reshape(n_windows, size, band.size)
    means = windows.reshape(n_windows, -1).sum(axis=1, dtype=np.int64) / (size * band.size)

    epochs: List[Epoch] = []
    for index in range(n_windows):
        if means[index] < min_occupancy:
            continue
        epochs.append(
            Epoch(
                bits=windows[index],
                mean_occupancy=float(means[index]),
                source_offset=index * size,
                sample_period_ns=trace.sample_period_ns,
                epoch_id=index,
                band_name=band.name,
                channel_labels=labels,
            )
        )
    logger.info(f"Band {band.name}: kept {len(epochs)} of {n_windows} epochs (min occupancy {min_occupancy})")
    return epochs


def fully_idle_channels(epoch: Epoch) -> List[int]:
    """Band-relative channels that stay idle for the whole epoch"""
    return [int(c) for c in np.flatnonzero(~epoch.bits.any(axis=0))]


def rssi_units_to_dbm(units: int, cal: Optional[RssiCalibration] = None) -> float:
    """Affine RSSI-to-dBm map; the default passes through (150 units, -83.5 dBm)"""
    cal = cal or RssiCalibration()
    if not 0 <= units <= RSSI_MAX_UNITS:
        raise InvalidArgumentError(f"RSSI units must lie in [0, {RSSI_MAX_UNITS}], got {units}")
    return cal.intercept + cal.slope * units


def dbm_to_rssi_units(dbm: float, cal: Optional[RssiCalibration] = None) -> int:
    """Nearest RSSI unit for a dBm level, clamped to the 10-bit range"""
    cal = cal or RssiCalibration()
    units = int(round((dbm - cal.intercept) / cal.slope))
    return min(max(units, 0), RSSI_MAX_UNITS)
