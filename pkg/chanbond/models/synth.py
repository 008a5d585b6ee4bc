"""
Synthetic Model Models
Fitted per-channel occupancy models and the model-vs-trace comparison
"""
import math
from enum import Enum
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .analysis import CorrelationClass, LoadClass


class ModelKind(str, Enum):
    MARKOV = "markov"
    IID = "iid"


class MarkovChannelParams(BaseModel):
    """Two-state chain with geometric holding times on the sample grid"""
    model_config = ConfigDict(frozen=True)

    mean_busy_duration: float = Field(..., ge=1.0, description="Mean busy run length in samples")
    mean_idle_duration: float = Field(..., ge=1.0, description="Mean idle run length in samples")

    @field_validator("mean_busy_duration", "mean_idle_duration")
    @classmethod
    def check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("mean holding times must be finite")
        return value

    @property
    def p_busy_to_idle(self) -> float:
        return 1.0 / self.mean_busy_duration

    @property
    def p_idle_to_busy(self) -> float:
        return 1.0 / self.mean_idle_duration

    @property
    def stationary_occupancy(self) -> float:
        return self.mean_busy_duration / (self.mean_busy_duration + self.mean_idle_duration)


class IidChannelParams(BaseModel):
    """Per-sample Bernoulli occupancy"""
    model_config = ConfigDict(frozen=True)

    occupancy_probability: float = Field(..., ge=0.0, le=1.0, description="Probability a sample is busy")


ChannelModel = Union[MarkovChannelParams, IidChannelParams]


class FittedEpoch(BaseModel):
    """Models fitted to the channels of one epoch (or the whole corpus)"""
    model_config = ConfigDict(frozen=True)

    epoch_id: Optional[int] = Field(None, description="None when fitted over the whole corpus")
    model: ModelKind
    channels: List[ChannelModel]
    fallback_channels: List[int] = Field(default_factory=list, description="Degenerate channels fitted as i.i.d.")


class EpochModelError(BaseModel):
    """Trace vs model outcome for one source epoch and one model"""
    model_config = ConfigDict(frozen=True)

    epoch_id: int
    model: ModelKind
    load_class: LoadClass
    correlation_class: CorrelationClass
    xi_source: float
    xi_model: float
    mre: Optional[float]
    n_excluded: int = 0
    fallback_channels: List[int] = Field(default_factory=list)


class ModelErrorRow(BaseModel):
    """MRE aggregated over one (model, grouping, class) cell"""
    model_config = ConfigDict(frozen=True)

    model: ModelKind
    grouping: str = Field(..., description="'load' or 'correlation'")
    group: str
    n_epochs: int
    mre: Optional[float]
    max_mre: Optional[float]


class ModelComparisonReport(BaseModel):
    """Model error table grouped by load and by correlation class"""
    model_config = ConfigDict(frozen=True)

    epochs: List[EpochModelError]
    table: List[ModelErrorRow]
    n_fallback_epochs: int = Field(0, description="Epochs where at least one channel fell back to i.i.d.")
