import struct

import numpy as np
import pytest

from chanbond.errors import TraceFormatError
from chanbond.models.trace import OccupancyTrace, PowerTrace
from chanbond.occupancy import (
    decode_binary_trace,
    encode_binary_trace,
    read_occupancy_trace,
    read_power_trace,
    read_trace,
    write_trace,
)
from chanbond.occupancy.trace_io import HEADER


def test_header_is_twenty_bytes():
    assert HEADER.size == 20


def test_occupancy_bits_are_packed_row_major_lsb_first():
    trace = OccupancyTrace(bits=[[1, 0, 1], [0, 1, 1]], sample_period_ns=10_000)
    data = encode_binary_trace(trace)
    magic, version, kind, n_channels, n_samples, period = struct.unpack_from("<4sBBHQI", data)
    assert (magic, version, kind, n_channels, n_samples, period) == (b"WACT", 1, 1, 3, 2, 10_000)
    assert data[20:] == bytes([0b110101])


def test_power_payload_is_little_endian_u16():
    trace = PowerTrace(samples=[[1, 1023]])
    data = encode_binary_trace(trace)
    assert data[4:6] == bytes([1, 0])
    assert data[20:] == bytes([1, 0, 0xFF, 0x03])


def test_binary_decode_restores_trace():
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, size=(37, 5))
    decoded = decode_binary_trace(encode_binary_trace(OccupancyTrace(bits=bits, sample_period_ns=100)))
    assert isinstance(decoded, OccupancyTrace)
    assert np.array_equal(decoded.bits, bits)
    assert decoded.sample_period_ns == 100


def test_truncated_header_reports_offset():
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(b"WACT\x01")
    assert exc.value.offset == 5
    assert "byte offset 5" in str(exc.value)


def test_bad_magic_reports_offset_zero():
    data = bytearray(encode_binary_trace(OccupancyTrace(bits=[[1]])))
    data[:4] = b"NOPE"
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(bytes(data))
    assert exc.value.offset == 0


def test_truncated_payload_reports_end_of_file():
    data = encode_binary_trace(PowerTrace(samples=np.zeros((10, 2), dtype=int)))
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(data[:-3])
    assert exc.value.offset == len(data) - 3


def test_out_of_range_power_sample_reports_its_offset():
    header = HEADER.pack(b"WACT", 1, 0, 2, 1, 10_000)
    data = header + struct.pack("<HH", 10, 2000)
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(data)
    assert exc.value.offset == 22


def test_unknown_version_is_rejected():
    header = HEADER.pack(b"WACT", 9, 1, 1, 0, 10_000)
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(header)
    assert exc.value.offset == 4


def test_config_block_sits_between_header_and_payload():
    trace = OccupancyTrace(bits=[[1, 0, 1], [0, 1, 1]], sample_period_ns=10_000)
    data = encode_binary_trace(trace, {"seed": 7, "model": "iid"})
    assert data[4] == 2
    (length,) = struct.unpack_from("<I", data, 20)
    assert data[24: 24 + length] == b'{"model":"iid","seed":7}'
    assert data[24 + length:] == bytes([0b110101])
    decoded = decode_binary_trace(data)
    assert decoded.meta["config"] == {"model": "iid", "seed": 7}
    assert decoded.bits.tolist() == [[1, 0, 1], [0, 1, 1]]


def test_truncated_config_block_reports_end_of_file():
    data = encode_binary_trace(OccupancyTrace(bits=[[1]]), {"seed": 1})
    cut = data[:26]
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(cut)
    assert exc.value.offset == 26


def test_config_block_must_be_an_object():
    block = b"[1,2]"
    data = HEADER.pack(b"WACT", 2, 1, 1, 1, 10_000) + struct.pack("<I", len(block)) + block + b"\x01"
    with pytest.raises(TraceFormatError) as exc:
        decode_binary_trace(data)
    assert exc.value.offset == 24


def test_csv_trace_layout(tmp_path):
    path = tmp_path / "power.csv"
    write_trace(PowerTrace(samples=np.zeros((2, 16), dtype=int), sample_period_ns=10_000), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# sample_period_ns: 10000"
    assert lines[1].startswith("t,36,40,44")
    assert lines[2].startswith("0,0,0")


def test_csv_power_trace_is_read_back(tmp_path):
    path = tmp_path / "power.csv"
    samples = np.array([[10, 200], [151, 0], [1023, 3]])
    write_trace(PowerTrace(samples=samples, sample_period_ns=20_000, channel_labels=[36, 40]), path)
    trace = read_power_trace(path)
    assert np.array_equal(trace.samples, samples)
    assert trace.channel_labels == [36, 40]
    assert trace.sample_period_ns == 20_000


def test_csv_config_comment_is_read_back(tmp_path):
    path = write_trace(OccupancyTrace(bits=[[0, 1]]), tmp_path / "occ.csv", {"seed": 3})
    assert path.read_text().splitlines()[1] == '# config: {"seed":3}'
    trace = read_occupancy_trace(path)
    assert trace.meta["config"] == {"seed": 3}
    assert trace.bits.tolist() == [[0, 1]]


def test_csv_without_period_comment_uses_default(tmp_path):
    path = tmp_path / "occ.csv"
    path.write_text("t,ch36,ch40\n0,1,0\n1,0,0\n")
    trace = read_occupancy_trace(path)
    assert trace.sample_period_ns == 10_000
    assert trace.channel_labels == [36, 40]
    assert trace.bits.tolist() == [[1, 0], [0, 0]]


def test_csv_occupancy_rejects_non_binary_values(tmp_path):
    path = tmp_path / "occ.csv"
    path.write_text("t,36\n0,2\n")
    with pytest.raises(TraceFormatError):
        read_occupancy_trace(path)


def test_csv_without_t_column_is_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,36\n0,1\n")
    with pytest.raises(TraceFormatError):
        read_power_trace(path)


def test_binary_file_is_detected_by_magic(tmp_path):
    path = tmp_path / "trace.dat"
    path.write_bytes(encode_binary_trace(OccupancyTrace(bits=[[0, 1]])))
    assert isinstance(read_trace(path, "power"), OccupancyTrace)


def test_reading_the_wrong_binary_kind_fails(tmp_path):
    path = tmp_path / "trace.wact"
    write_trace(OccupancyTrace(bits=[[0, 1]]), path)
    with pytest.raises(TraceFormatError):
        read_power_trace(path)


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(TraceFormatError):
        read_power_trace(tmp_path / "absent.wact")
