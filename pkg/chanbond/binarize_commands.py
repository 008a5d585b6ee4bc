"""
Binarize Commands
Power trace -> occupancy trace, with optional downsampling
"""
import logging
from pathlib import Path
from typing import Optional

import click

from chanbond.errors import ChanBondError
from chanbond.models.trace import BUILTIN_BANDS, CcaThreshold
from chanbond.occupancy.operations import (
    DEFAULT_EPOCH_MS,
    DEFAULT_MIN_OCCUPANCY,
    binarize,
    downsample,
    rssi_units_to_dbm,
    segment_epochs,
)
from chanbond.occupancy.trace_io import read_power_trace, write_trace
from chanbond.utils.console import console, setup_logging

logger = logging.getLogger(__name__)


@click.command("binarize")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--cca", "cca_units", type=click.IntRange(0, 1023), default=None, help="CCA threshold in RSSI units [150]")
@click.option("--cca-dbm", type=float, default=None, help="CCA threshold in dBm instead of units")
@click.option("--downsample", "factor", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--downsample-mode", type=click.Choice(["first", "max"]), default="first", show_default=True)
@click.option("--epoch-ms", type=click.IntRange(min=1), default=DEFAULT_EPOCH_MS, show_default=True)
@click.option("--min-occupancy", type=click.FloatRange(0, 1), default=DEFAULT_MIN_OCCUPANCY, show_default=True)
@click.option("--log-level", default="WARNING", show_default=True)
def binarize_command(
    input_path: Path,
    output_path: Path,
    cca_units: Optional[int],
    cca_dbm: Optional[float],
    factor: int,
    downsample_mode: str,
    epoch_ms: int,
    min_occupancy: float,
    log_level: str,
) -> None:
    """Binarize INPUT_PATH against the CCA threshold and write OUTPUT_PATH."""
    setup_logging(log_level)
    if cca_units is not None and cca_dbm is not None:
        raise click.UsageError("Give either --cca or --cca-dbm, not both")
    try:
        if cca_dbm is not None:
            cca = CcaThreshold.from_dbm(cca_dbm)
        else:
            units = 150 if cca_units is None else cca_units
            cca = CcaThreshold(raw_units=units, dbm_equivalent=rssi_units_to_dbm(units))
        trace = read_power_trace(input_path)
        if factor > 1:
            trace = downsample(trace, factor, downsample_mode)
        occupancy = binarize(trace, cca)
        header = {
            "cca_units": cca.raw_units,
            "cca_dbm": cca.dbm_equivalent,
            "downsample": factor,
            "downsample_mode": downsample_mode,
            "source": input_path.name,
        }
        write_trace(occupancy, output_path, header)

        band_lines = []
        whole_epochs = epoch_ms * 1_000_000 % occupancy.sample_period_ns == 0
        for band in BUILTIN_BANDS.values():
            if not whole_epochs or not band.fits(occupancy.n_channels):
                continue
            epochs = segment_epochs(occupancy, band, epoch_ms * 1_000_000, min_occupancy)
            band_lines.append(f"{band.name}: {len(epochs)} epochs retained")
    except ChanBondError:
        raise
    except Exception as e:
        raise ChanBondError(f"Failed to binarize {input_path}: {e}")

    mean = float(occupancy.bits.mean())
    console.print(
        f"CCA {cca.raw_units} units ({cca.dbm_equivalent:.1f} dBm); "
        f"{occupancy.n_samples} samples x {occupancy.n_channels} channels; mean occupancy {mean:.4f}"
    )
    for line in band_lines:
        console.print(line)
