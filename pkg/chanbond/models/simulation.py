"""
Simulation Models
MAC/PHY configuration, bonding policies and the transmission log of one epoch
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .trace import CcaThreshold


class PolicyKind(str, Enum):
    SINGLE_CHANNEL = "sc"
    CONTIGUOUS = "co"
    NON_CONTIGUOUS = "nc"


class SecondaryCheck(str, Enum):
    PIFS_WINDOW = "pifs"
    INSTANT_AT_EXPIRY = "instant"


class Scenario(str, Enum):
    DEFERRAL = "deferral"
    HIDDEN = "hidden"


class BondingPolicy(BaseModel):
    """Which basic channels to aggregate when the backoff expires"""
    model_config = ConfigDict(frozen=True)

    kind: PolicyKind = Field(..., description="Single channel, contiguous or non-contiguous")
    secondary_check: SecondaryCheck = Field(SecondaryCheck.PIFS_WINDOW, description="How secondaries are sensed")
    aligned: bool = Field(False, description="Restrict contiguous bonding to 20/40/80/160 MHz blocks")

    @property
    def label(self) -> str:
        return self.kind.value

    @classmethod
    def parse(cls, text: str, **kwargs) -> "BondingPolicy":
        return cls(kind=PolicyKind(text.strip().lower()), **kwargs)


class PhyMacConfig(BaseModel):
    """Trace-driven setup: every MAC/PHY constant of the simulated BSS, durations in microseconds"""
    model_config = ConfigDict(frozen=True)

    cca: CcaThreshold = Field(default_factory=CcaThreshold, description="CCA threshold")
    data_subcarriers: int = Field(234, gt=0, description="Data subcarriers of a 20 MHz channel")
    bits_per_symbol: int = Field(8, gt=0, description="Bits per subcarrier (256-QAM)")
    coding_rate: float = Field(5 / 6, gt=0, le=1, description="Channel coding rate")
    symbol_us: float = Field(13.6, gt=0, description="OFDM symbol duration including guard interval")
    rate_per_channel_bps: Optional[float] = Field(None, gt=0, description="Override of the 20 MHz data rate")
    channel_bandwidth_mhz: float = Field(20.0, gt=0, description="Basic channel bandwidth b")
    packet_length_bits: int = Field(12_000, gt=0, description="Data packet length L_d")
    max_aggregation: int = Field(64, ge=1, description="Max aggregated packets per frame N_a")
    slot_us: int = Field(10, gt=0, description="Empty slot duration, equal to the sample period")
    sifs_us: int = Field(20, ge=0, description="SIFS duration")
    difs_us: int = Field(30, ge=0, description="DIFS duration")
    pifs_us: int = Field(30, ge=0, description="PIFS duration")
    rts_us: int = Field(50, ge=0, description="RTS duration")
    cts_us: int = Field(40, ge=0, description="CTS duration")
    back_us: int = Field(50, ge=0, description="Block ACK duration")
    txop_us: int = Field(5_000, gt=0, description="Max TXOP duration")
    cw_min: int = Field(16, ge=2, description="Minimum contention window")
    backoff_stages: int = Field(5, ge=0, description="Number of backoff stages m")

    @field_validator("cw_min")
    @classmethod
    def check_cw_min(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError("cw_min must be a power of two")
        return value

    @model_validator(mode="after")
    def check_slot_grid(self) -> "PhyMacConfig":
        for name in ("sifs_us", "difs_us", "pifs_us", "rts_us", "cts_us", "back_us", "txop_us"):
            if getattr(self, name) % self.slot_us:
                raise ValueError(f"{name} must be a multiple of slot_us ({self.slot_us})")
        return self

    @property
    def r20_bps(self) -> float:
        """Data rate of one basic channel at the configured MCS"""
        if self.rate_per_channel_bps is not None:
            return self.rate_per_channel_bps
        bits = self.data_subcarriers * self.bits_per_symbol * self.coding_rate
        return bits / (self.symbol_us * 1e-6)

    @property
    def slot_ns(self) -> int:
        return self.slot_us * 1000

    @property
    def overhead_us(self) -> int:
        """RTS, CTS, BACK and the three SIFS between them"""
        return self.rts_us + self.sifs_us + self.cts_us + self.sifs_us + self.sifs_us + self.back_us

    def samples(self, duration_us: int) -> int:
        return duration_us // self.slot_us

    @property
    def difs_samples(self) -> int:
        return self.samples(self.difs_us)

    @property
    def pifs_samples(self) -> int:
        return self.samples(self.pifs_us)


class MachineStateKind(str, Enum):
    BUSY = "busy"
    DIFS = "difs"
    BACKOFF = "bo"
    TXRX = "txrx"


@dataclass
class MachineState:
    """Mutable state of the DCF machine while it walks one epoch"""
    current: MachineStateKind = MachineStateKind.BUSY
    difs_progress: int = 0
    backoff_counter: Optional[int] = None
    backoff_stage: int = 0
    pending: Optional["TxRecord"] = None


class FrameTiming(BaseModel):
    """Size and airtime of one bonded frame exchange"""
    model_config = ConfigDict(frozen=True)

    n_packets: int = Field(..., ge=1, description="Aggregated data packets")
    total_samples: int = Field(..., ge=1, description="RTS to BACK airtime in samples")
    data_samples: int = Field(..., ge=1, description="DATA airtime in samples")


class TxRecord(BaseModel):
    """One frame exchange of the simulated BSS"""
    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0, description="First sample of the exchange")
    end: int = Field(..., description="One past the last sample of the exchange")
    channels: Tuple[int, ...] = Field(..., description="Band-relative 0-based channels used")
    n_packets: int = Field(..., ge=1, description="Aggregated data packets")
    lost: bool = Field(False, description="Set when hidden-terminal activity corrupted the frame")

    @model_validator(mode="after")
    def check_span(self) -> "TxRecord":
        if self.end <= self.start:
            raise ValueError("a transmission spans at least one sample")
        if not self.channels:
            raise ValueError("a transmission uses at least one channel")
        return self

    @property
    def n_samples(self) -> int:
        return self.end - self.start


class EpochSimResult(BaseModel):
    """Transmission log and throughput of one (epoch, primary, policy) run"""
    model_config = ConfigDict(frozen=True)

    records: List[TxRecord] = Field(default_factory=list, description="Frames in time order")
    packets_sent: int = Field(..., ge=0, description="Packets of frames that were not lost")
    throughput_bps: float = Field(..., ge=0, description="packets_sent * L_d / T_per")
    primary: int = Field(..., ge=0, description="Band-relative primary channel")
    policy: BondingPolicy = Field(..., description="Policy that selected the channels")
    seed: int = Field(..., description="Seed of the backoff stream")
    scenario: Scenario = Field(Scenario.DEFERRAL, description="How neighbours reacted")
    epoch_id: int = Field(0, ge=0, description="Epoch the run replayed")
    duration_s: float = Field(..., gt=0, description="Epoch duration T_per")

    @model_validator(mode="after")
    def check_packets(self) -> "EpochSimResult":
        if self.packets_sent != sum(r.n_packets for r in self.records if not r.lost):
            raise ValueError("packets_sent must count the packets of delivered frames")
        if any(self.primary not in r.channels for r in self.records):
            raise ValueError("every frame must include the primary channel")
        return self

    @property
    def n_frames(self) -> int:
        return len(self.records)

    @property
    def n_lost(self) -> int:
        return sum(1 for r in self.records if r.lost)
