# Occupancy module
from .operations import (
    DEFAULT_EPOCH_MS,
    DEFAULT_MIN_OCCUPANCY,
    binarize,
    dbm_to_rssi_units,
    downsample,
    epoch_samples,
    fully_idle_channels,
    mean_occupancy,
    rssi_units_to_dbm,
    segment_epochs,
)
from .trace_io import (
    decode_binary_trace,
    encode_binary_trace,
    read_occupancy_trace,
    read_power_trace,
    read_trace,
    write_trace,
)
