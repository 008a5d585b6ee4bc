"""
Trace Models
Pydantic models for power traces, occupancy traces, bands and epochs
"""
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

RSSI_MAX_UNITS = 1023
DEFAULT_SAMPLE_PERIOD_NS = 10_000

# Column order of a full 16-channel capture: U-NII-1&2 then U-NII-2c
STANDARD_CHANNEL_LABELS: Tuple[int, ...] = (
    36, 40, 44, 48, 52, 56, 60, 64,
    100, 104, 108, 112, 116, 120, 124, 128,
)


def default_channel_labels(n_channels: int) -> List[int]:
    """Standard 802.11 labels for 16-wide captures, plain 1..n otherwise"""
    if n_channels == len(STANDARD_CHANNEL_LABELS):
        return list(STANDARD_CHANNEL_LABELS)
    return list(range(1, n_channels + 1))


def _frozen_matrix(value: Any, dtype: Any) -> np.ndarray:
    array = np.array(value, dtype=dtype, copy=True)
    if array.ndim != 2:
        raise ValueError(f"expected a 2-D samples x channels matrix, got {array.ndim}-D")
    if array.shape[1] < 1:
        raise ValueError("a trace needs at least one channel")
    array.setflags(write=False)
    return array


def _fill_labels(data: Any, matrix_key: str) -> Any:
    if isinstance(data, dict) and not data.get("channel_labels"):
        matrix = np.asarray(data.get(matrix_key))
        if matrix.ndim == 2:
            data = {**data, "channel_labels": default_channel_labels(matrix.shape[1])}
    return data


class RssiCalibration(BaseModel):
    """Affine map between raw 10-bit RSSI units and dBm"""
    model_config = ConfigDict(frozen=True)

    slope: float = Field(0.1, gt=0, description="dB per RSSI unit")
    intercept: float = Field(-98.5, description="dBm at 0 RSSI units")


class CcaThreshold(BaseModel):
    """Clear channel assessment level used to binarize power samples"""
    model_config = ConfigDict(frozen=True)

    raw_units: int = Field(150, ge=0, le=RSSI_MAX_UNITS, description="Threshold in 10-bit RSSI units")
    dbm_equivalent: float = Field(-83.5, description="Same threshold in dBm")

    @classmethod
    def from_dbm(cls, dbm: float, cal: Optional[RssiCalibration] = None) -> "CcaThreshold":
        from chanbond.occupancy.operations import dbm_to_rssi_units

        return cls(raw_units=dbm_to_rssi_units(dbm, cal), dbm_equivalent=dbm)


class PowerTrace(BaseModel):
    """Raw RSSI samples, one row per temporal sample and one column per basic channel"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray = Field(..., description="n_samples x n_channels RSSI units in [0, 1023]")
    sample_period_ns: int = Field(DEFAULT_SAMPLE_PERIOD_NS, gt=0, description="Time between samples")
    channel_labels: List[int] = Field(default_factory=list, description="802.11 channel numbers per column")
    meta: Dict[str, Any] = Field(default_factory=dict, description="Scenario tag and free-form notes")

    @model_validator(mode="before")
    @classmethod
    def default_labels(cls, data: Any) -> Any:
        return _fill_labels(data, "samples")

    @field_validator("samples")
    @classmethod
    def check_samples(cls, value: Any) -> np.ndarray:
        array = _frozen_matrix(value, np.int64)
        if array.size and (array.min() < 0 or array.max() > RSSI_MAX_UNITS):
            raise ValueError(f"power samples must lie in [0, {RSSI_MAX_UNITS}]")
        return array

    @model_validator(mode="after")
    def check_labels(self) -> "PowerTrace":
        if len(self.channel_labels) != self.n_channels:
            raise ValueError("channel_labels must name every column")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.samples.shape[1])


class OccupancyTrace(BaseModel):
    """Busy (1) / idle (0) matrix derived from a power trace or a synthetic model"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray = Field(..., description="n_samples x n_channels matrix of 0/1")
    sample_period_ns: int = Field(DEFAULT_SAMPLE_PERIOD_NS, gt=0, description="Time between samples")
    channel_labels: List[int] = Field(default_factory=list, description="802.11 channel numbers per column")
    meta: Dict[str, Any] = Field(default_factory=dict, description="Scenario tag and free-form notes")

    @model_validator(mode="before")
    @classmethod
    def default_labels(cls, data: Any) -> Any:
        return _fill_labels(data, "bits")

    @field_validator("bits")
    @classmethod
    def check_bits(cls, value: Any) -> np.ndarray:
        raw = np.asarray(value)
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise ValueError("occupancy bits must be 0 or 1")
        return _frozen_matrix(raw, np.uint8)

    @model_validator(mode="after")
    def check_labels(self) -> "OccupancyTrace":
        if len(self.channel_labels) != self.n_channels:
            raise ValueError("channel_labels must name every column")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.bits.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.bits.shape[1])


class BandSpec(BaseModel):
    """A set of basic channels, given as 1-based trace columns"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Band identifier")
    channels: Tuple[int, ...] = Field(..., description="1-based column indices, strictly increasing")

    @field_validator("channels")
    @classmethod
    def check_channels(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("a band needs at least one channel")
        if value[0] < 1:
            raise ValueError("band channels are 1-based column indices")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("band channels must be strictly increasing")
        return value

    @property
    def columns(self) -> List[int]:
        """0-based trace columns of the band"""
        return [c - 1 for c in self.channels]

    @property
    def size(self) -> int:
        return len(self.channels)

    def fits(self, n_channels: int) -> bool:
        return self.channels[-1] <= n_channels


UNII_1_2 = BandSpec(name="unii12", channels=tuple(range(1, 9)))
UNII_2C = BandSpec(name="unii2c", channels=tuple(range(9, 17)))
BUILTIN_BANDS: Dict[str, BandSpec] = {UNII_1_2.name: UNII_1_2, UNII_2C.name: UNII_2C}


class Epoch(BaseModel):
    """One fixed-length occupancy window restricted to a band; the unit of simulation"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray = Field(..., description="n_epoch_samples x |B| matrix of 0/1")
    mean_occupancy: float = Field(..., ge=0.0, le=1.0, description="Mean band occupancy of the window")
    source_offset: int = Field(0, ge=0, description="First sample index in the parent trace")
    sample_period_ns: int = Field(DEFAULT_SAMPLE_PERIOD_NS, gt=0, description="Time between samples")
    epoch_id: int = Field(0, ge=0, description="Position of the window in the parent trace")
    band_name: str = Field("custom", description="Band the window was cut from")
    channel_labels: List[int] = Field(default_factory=list, description="802.11 channel numbers per column")

    @model_validator(mode="before")
    @classmethod
    def default_labels(cls, data: Any) -> Any:
        return _fill_labels(data, "bits")

    @field_validator("bits")
    @classmethod
    def check_bits(cls, value: Any) -> np.ndarray:
        raw = np.asarray(value)
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise ValueError("occupancy bits must be 0 or 1")
        array = _frozen_matrix(raw, np.uint8)
        if array.shape[0] < 1:
            raise ValueError("an epoch needs at least one sample")
        return array

    @model_validator(mode="after")
    def check_mean(self) -> "Epoch":
        if abs(float(self.bits.mean()) - self.mean_occupancy) > 1e-9:
            raise ValueError("mean_occupancy does not match the epoch bits")
        if len(self.channel_labels) != self.n_channels:
            raise ValueError("channel_labels must name every column")
        return self

    @classmethod
    def from_bits(cls, bits: Any, **kwargs: Any) -> "Epoch":
        """Build an epoch computing its mean occupancy from the bits"""
        array = np.asarray(bits, dtype=np.uint8)
        return cls(bits=array, mean_occupancy=float(array.mean()), **kwargs)

    @property
    def n_samples(self) -> int:
        return int(self.bits.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.bits.shape[1])

    @property
    def duration_s(self) -> float:
        return self.n_samples * self.sample_period_ns * 1e-9
