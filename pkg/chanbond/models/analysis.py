"""
Analysis Models
Pydantic models for scenario metrics, correlation and sweep reports
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .simulation import EpochSimResult, PolicyKind, Scenario


class LoadClass(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class CorrelationClass(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    UNCLASSIFIED = "unclassified"


class HiddenConfig(BaseModel):
    """How hidden-terminal activity turns into frame loss"""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(0.01, ge=0.0, le=1.0, description="Fraction of active samples that loses a frame")
    escalate_on_loss: bool = Field(True, description="Double the contention window after a lost frame")


class DeprivationReport(BaseModel):
    """Bandwidth the bonding BSS took from neighbours that were active meanwhile"""
    model_config = ConfigDict(frozen=True)

    omega_mhz: float = Field(..., ge=0, description="Bandwidth deprivation in MHz")
    omega_mbps: float = Field(..., ge=0, description="Same deprivation as MCS 9 data rate in Mb/s")
    contributions: List[int] = Field(default_factory=list, description="Active (sample, channel) cells per frame")


class CorrelationReport(BaseModel):
    """Correlation of the best primary with the other channels of its band"""
    model_config = ConfigDict(frozen=True)

    best_primary: int = Field(..., ge=0, description="Band-relative best primary p*")
    xi: float = Field(..., ge=-1.0, le=1.0, description="Mean Pearson correlation with the other channels")
    rho: List[float] = Field(..., description="Correlation of p* with each other channel, in channel order")
    correlation_class: CorrelationClass = Field(..., description="Low, medium, high or unclassified")
    constant_channels: List[int] = Field(default_factory=list, description="Channels with zero variance")
    reference_policy: PolicyKind = Field(PolicyKind.CONTIGUOUS, description="Policy whose best primary is p*")


class SweepReport(BaseModel):
    """Throughput of every (primary, policy) pair of one epoch"""
    model_config = ConfigDict(frozen=True)

    epoch_id: int = Field(..., ge=0)
    mean_occupancy: float = Field(..., ge=0, le=1)
    load_class: LoadClass
    scenario: Scenario = Scenario.DEFERRAL
    throughput: Dict[PolicyKind, List[float]] = Field(..., description="Throughput per primary, per policy")
    best_primary: Dict[PolicyKind, int] = Field(..., description="Argmax primary per policy, lowest index on ties")
    normalized_best: Dict[PolicyKind, Optional[float]] = Field(
        ..., description="Best throughput over the single-channel best throughput"
    )
    co_nc_ratio: List[Optional[float]] = Field(
        default_factory=list, description="Contiguous over non-contiguous throughput per primary"
    )
    results: Dict[PolicyKind, List[EpochSimResult]] = Field(default_factory=dict, description="Raw runs")

    @property
    def single_channel_best(self) -> float:
        return max(self.throughput[PolicyKind.SINGLE_CHANNEL])


class EpochEvaluation(BaseModel):
    """One epoch under one scenario: sweep, correlation and deprivation of every run"""
    model_config = ConfigDict(frozen=True)

    sweep: SweepReport
    correlation: CorrelationReport
    deprivation: Dict[PolicyKind, List[DeprivationReport]] = Field(
        ..., description="Deprivation per primary, per policy"
    )
    channel_labels: List[int] = Field(..., description="802.11 labels of the band's channels")
    idle_channels: List[int] = Field(
        default_factory=list, description="Band-relative channels idle for the whole epoch"
    )

    @property
    def epoch_id(self) -> int:
        return self.sweep.epoch_id


class RelativeErrorSummary(BaseModel):
    """Mean relative error of model throughput against trace throughput"""
    model_config = ConfigDict(frozen=True)

    mre: Optional[float] = Field(..., description="Mean of |model - reference| / reference, None if no pairs")
    n_pairs: int = Field(..., ge=0, description="Pairs that entered the mean")
    n_excluded: int = Field(0, ge=0, description="Pairs dropped because the reference was zero")
