"""
Trace File I/O
Reads and writes power and occupancy traces as CSV or as the binary WACT format
"""
import logging
import struct
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import orjson
import polars as pl

from chanbond.errors import TraceFormatError
from chanbond.models.trace import (
    DEFAULT_SAMPLE_PERIOD_NS,
    RSSI_MAX_UNITS,
    OccupancyTrace,
    PowerTrace,
    default_channel_labels,
)
from chanbond.utils.json_serializer import compact_config, config_line

logger = logging.getLogger(__name__)

MAGIC = b"WACT"
FORMAT_VERSION = 1
# version 2 inserts a length-prefixed JSON config block between header and payload
CONFIG_VERSION = 2
KIND_POWER = 0
KIND_OCCUPANCY = 1
# magic, version, kind, n_channels, n_samples, sample_period_ns
HEADER = struct.Struct("<4sBBHQI")
CONFIG_LENGTH = struct.Struct("<I")
BINARY_SUFFIXES = {".wact", ".bin"}

Trace = Union[PowerTrace, OccupancyTrace]


def is_binary_path(path: Path) -> bool:
    return Path(path).suffix.lower() in BINARY_SUFFIXES


def _matrix(trace: Trace) -> np.ndarray:
    return trace.samples if isinstance(trace, PowerTrace) else trace.bits


# CSV

def write_csv_trace(trace: Trace, path: Path, config: Optional[Mapping[str, Any]] = None) -> None:
    """Write `t,<label>,...` rows, t being the sample index; period and config go in comment lines"""
    matrix = _matrix(trace)
    columns: Dict[str, np.ndarray] = {"t": np.arange(trace.n_samples, dtype=np.int64)}
    for col, label in enumerate(trace.channel_labels):
        columns[str(label)] = matrix[:, col].astype(np.int64)
    frame = pl.DataFrame(columns)
    with open(path, "wb") as fh:
        fh.write(f"# sample_period_ns: {trace.sample_period_ns}\n".encode())
        if config is not None:
            fh.write(config_line(config))
        frame.write_csv(fh)


def _parse_csv_comments(path: Path) -> Dict[str, str]:
    meta: Dict[str, str] = {}
    with open(path, "r") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
    return meta


def _csv_meta(path: Path, comments: Dict[str, str]) -> Dict[str, Any]:
    meta: Dict[str, Any] = {"source": str(path)}
    if "config" in comments:
        try:
            meta["config"] = orjson.loads(comments["config"])
        except orjson.JSONDecodeError as e:
            raise TraceFormatError(f"CSV trace {path} has an unreadable config comment: {e}")
    return meta


def _read_csv_matrix(path: Path) -> Tuple[np.ndarray, List[int], int, Dict[str, Any]]:
    meta = _parse_csv_comments(path)
    try:
        frame = pl.read_csv(path, comment_prefix="#")
    except Exception as e:
        raise TraceFormatError(f"Failed to parse CSV trace {path}: {e}")
    if frame.width < 2 or frame.columns[0] != "t":
        raise TraceFormatError(f"CSV trace {path} must start with a 't' column and name at least one channel")
    try:
        labels = [int(name.lower().removeprefix("ch")) for name in frame.columns[1:]]
    except ValueError:
        raise TraceFormatError(f"CSV trace {path} has non-numeric channel headers: {frame.columns[1:]}")
    body = frame.select(frame.columns[1:])
    if body.null_count().sum_horizontal().item():
        raise TraceFormatError(f"CSV trace {path} has missing values")
    try:
        matrix = body.cast(pl.Int64).to_numpy()
    except Exception as e:
        raise TraceFormatError(f"CSV trace {path} has non-integer samples: {e}")
    period = int(meta.get("sample_period_ns", DEFAULT_SAMPLE_PERIOD_NS))
    return matrix, labels, period, _csv_meta(path, meta)


def read_csv_power_trace(path: Path) -> PowerTrace:
    matrix, labels, period, meta = _read_csv_matrix(path)
    if matrix.size and (matrix.min() < 0 or matrix.max() > RSSI_MAX_UNITS):
        raise TraceFormatError(f"CSV power trace {path} has samples outside [0, {RSSI_MAX_UNITS}]")
    return PowerTrace(samples=matrix, sample_period_ns=period, channel_labels=labels, meta=meta)


def read_csv_occupancy_trace(path: Path) -> OccupancyTrace:
    matrix, labels, period, meta = _read_csv_matrix(path)
    if matrix.size and not np.isin(matrix, (0, 1)).all():
        raise TraceFormatError(f"CSV occupancy trace {path} has values other than 0 and 1")
    return OccupancyTrace(bits=matrix, sample_period_ns=period, channel_labels=labels, meta=meta)


# Binary

def encode_binary_trace(trace: Trace, config: Optional[Mapping[str, Any]] = None) -> bytes:
    """Serialize to the WACT layout: fixed header, the config block when given, then the payload"""
    if isinstance(trace, PowerTrace):
        kind = KIND_POWER
        payload = trace.samples.astype("<u2").tobytes(order="C")
    else:
        kind = KIND_OCCUPANCY
        payload = np.packbits(trace.bits.ravel(order="C"), bitorder="little").tobytes()
    version = FORMAT_VERSION if config is None else CONFIG_VERSION
    header = HEADER.pack(MAGIC, version, kind, trace.n_channels, trace.n_samples, trace.sample_period_ns)
    if config is not None:
        block = compact_config(config)
        header += CONFIG_LENGTH.pack(len(block)) + block
    return header + payload


def _decode_config_block(data: bytes) -> Tuple[Dict[str, Any], int]:
    """The version 2 config block and the offset where the payload starts"""
    start = HEADER.size + CONFIG_LENGTH.size
    if len(data) < start:
        raise TraceFormatError("Truncated config length", offset=len(data))
    (length,) = CONFIG_LENGTH.unpack_from(data, HEADER.size)
    if len(data) < start + length:
        raise TraceFormatError(
            f"Truncated config block: expected {length} bytes, found {len(data) - start}", offset=len(data)
        )
    try:
        config = orjson.loads(data[start: start + length])
    except orjson.JSONDecodeError as e:
        raise TraceFormatError(f"Unreadable config block: {e}", offset=start)
    if not isinstance(config, dict):
        raise TraceFormatError("Config block is not a JSON object", offset=start)
    return config, start + length


def decode_binary_trace(data: bytes) -> Trace:
    """Parse WACT bytes, reporting the byte offset of the first problem"""
    if len(data) < HEADER.size:
        raise TraceFormatError(
            f"Truncated header: need {HEADER.size} bytes, file has {len(data)}", offset=len(data)
        )
    magic, version, kind, n_channels, n_samples, period_ns = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise TraceFormatError(f"Bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version not in (FORMAT_VERSION, CONFIG_VERSION):
        raise TraceFormatError(f"Unsupported version {version}", offset=4)
    if kind not in (KIND_POWER, KIND_OCCUPANCY):
        raise TraceFormatError(f"Unknown trace kind {kind}", offset=5)
    if n_channels < 1:
        raise TraceFormatError("Trace declares zero channels", offset=6)
    if period_ns < 1:
        raise TraceFormatError("Trace declares a zero sample period", offset=16)

    meta: Dict[str, Any] = {}
    body = HEADER.size
    if version == CONFIG_VERSION:
        meta["config"], body = _decode_config_block(data)

    n_cells = n_samples * n_channels
    expected = 2 * n_cells if kind == KIND_POWER else (n_cells + 7) // 8
    available = len(data) - body
    if available < expected:
        raise TraceFormatError(
            f"Truncated payload: expected {expected} bytes after the header, found {available}",
            offset=len(data),
        )
    if available > expected:
        logger.warning(f"Ignoring {available - expected} trailing bytes after the trace payload")

    payload = memoryview(data)[body: body + expected]
    labels = default_channel_labels(n_channels)
    if kind == KIND_POWER:
        samples = np.frombuffer(payload, dtype="<u2").reshape(n_samples, n_channels)
        if samples.size and samples.max() > RSSI_MAX_UNITS:
            bad = int(np.argmax(samples.ravel() > RSSI_MAX_UNITS))
            raise TraceFormatError(
                f"Power sample {int(samples.ravel()[bad])} exceeds {RSSI_MAX_UNITS}",
                offset=body + 2 * bad,
            )
        return PowerTrace(samples=samples, sample_period_ns=period_ns, channel_labels=labels, meta=meta)
    packed = np.frombuffer(payload, dtype=np.uint8)
    bits = np.unpackbits(packed, count=n_cells, bitorder="little").reshape(n_samples, n_channels)
    return OccupancyTrace(bits=bits, sample_period_ns=period_ns, channel_labels=labels, meta=meta)


# Dispatch by suffix

def write_trace(trace: Trace, path: Union[str, Path], config: Optional[Mapping[str, Any]] = None) -> Path:
    """Write by suffix; `config` is embedded in the file header when given"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if is_binary_path(path):
        path.write_bytes(encode_binary_trace(trace, config))
    else:
        write_csv_trace(trace, path, config)
    logger.info(f"Wrote {trace.n_samples}x{trace.n_channels} trace to {path}")
    return path


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise TraceFormatError(f"Cannot read trace file {path}: {e.strerror}")


def _sniff_binary(path: Path) -> bool:
    if is_binary_path(path):
        return True
    try:
        with open(path, "rb") as fh:
            return fh.read(len(MAGIC)) == MAGIC
    except OSError as e:
        raise TraceFormatError(f"Cannot read trace file {path}: {e.strerror}")


def read_power_trace(path: Union[str, Path]) -> PowerTrace:
    path = Path(path)
    if not _sniff_binary(path):
        return read_csv_power_trace(path)
    trace = decode_binary_trace(_read_bytes(path))
    if not isinstance(trace, PowerTrace):
        raise TraceFormatError(f"{path} holds an occupancy trace, expected a power trace", offset=5)
    return trace


def read_occupancy_trace(path: Union[str, Path]) -> OccupancyTrace:
    path = Path(path)
    if not _sniff_binary(path):
        return read_csv_occupancy_trace(path)
    trace = decode_binary_trace(_read_bytes(path))
    if not isinstance(trace, OccupancyTrace):
        raise TraceFormatError(f"{path} holds a power trace, expected an occupancy trace", offset=5)
    return trace


def read_trace(path: Union[str, Path], kind: str = "occupancy") -> Trace:
    """Either trace kind; binary files carry their kind, CSV files are read as `kind`"""
    path = Path(path)
    if _sniff_binary(path):
        return decode_binary_trace(_read_bytes(path))
    if kind == "power":
        return read_csv_power_trace(path)
    if kind == "occupancy":
        return read_csv_occupancy_trace(path)
    raise TraceFormatError(f"Unknown trace kind '{kind}' for {path}")
