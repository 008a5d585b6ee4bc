"""
Run Configuration
Settings for a batch run, read from defaults, the environment, a flat TOML
file and command line overrides, in increasing order of precedence
"""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict

from chanbond.dcf.timing import frame_duration
from chanbond.errors import EXIT_USAGE, ChanBondError, ConfigInfeasibleError
from chanbond.models.analysis import HiddenConfig
from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind, Scenario, SecondaryCheck
from chanbond.models.synth import ModelKind
from chanbond.models.trace import BUILTIN_BANDS, BandSpec, CcaThreshold
from chanbond.occupancy.operations import DEFAULT_EPOCH_MS, DEFAULT_MIN_OCCUPANCY, rssi_units_to_dbm

load_dotenv()

logger = logging.getLogger(__name__)

# keys forwarded to PhyMacConfig, named after the trace-driven setup table
PHY_KEYS = (
    "packet_length_bits",
    "max_aggregation",
    "slot_us",
    "sifs_us",
    "difs_us",
    "pifs_us",
    "rts_us",
    "cts_us",
    "back_us",
    "txop_us",
    "cw_min",
    "backoff_stages",
    "rate_per_channel_bps",
)


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseSettings):
    """Everything a simulate or synth run depends on"""
    model_config = SettingsConfigDict(env_prefix="CHANBOND_", extra="forbid", frozen=True)

    seed: int = Field(0, ge=0, description="Global seed")
    band: str = Field("unii12", description="unii12, unii2c or custom")
    band_channels: Annotated[Optional[List[int]], NoDecode] = Field(None, description="1-based columns of a custom band")
    epoch_ms: float = Field(float(DEFAULT_EPOCH_MS), gt=0, description="Epoch duration T_per")
    min_occupancy: float = Field(DEFAULT_MIN_OCCUPANCY, ge=0, le=1, description="Epoch retention threshold")
    policies: Annotated[List[PolicyKind], NoDecode] = Field(
        default_factory=lambda: [PolicyKind.SINGLE_CHANNEL, PolicyKind.CONTIGUOUS, PolicyKind.NON_CONTIGUOUS]
    )
    scenarios: Annotated[List[Scenario], NoDecode] = Field(default_factory=lambda: [Scenario.DEFERRAL])
    secondary_check: SecondaryCheck = SecondaryCheck.PIFS_WINDOW
    aligned: bool = Field(False, description="Power-of-two channelization for contiguous bonding")
    xi_reference: PolicyKind = Field(PolicyKind.CONTIGUOUS, description="Policy whose best primary defines xi")
    alpha: float = Field(0.01, ge=0, le=1, description="Hidden-terminal loss fraction")
    escalate_on_loss: bool = True

    trace_kind: str = Field("occupancy", description="How CSV inputs are read: occupancy or power")
    cca_units: int = Field(150, ge=0, le=1023, description="CCA threshold for power inputs")
    cca_dbm: Optional[float] = Field(None, description="CCA threshold in dBm, overrides cca_units")
    downsample: int = Field(1, ge=1, description="Keep one power sample per block of this size")
    downsample_mode: str = Field("first", description="first or max")

    packet_length_bits: int = 12_000
    max_aggregation: int = 64
    slot_us: int = 10
    sifs_us: int = 20
    difs_us: int = 30
    pifs_us: int = 30
    rts_us: int = 50
    cts_us: int = 40
    back_us: int = 50
    txop_us: int = 5_000
    cw_min: int = 16
    backoff_stages: int = 5
    rate_per_channel_bps: Optional[float] = None

    synth: Optional[ModelKind] = Field(None, description="Simulate a synthetic corpus instead of traces")
    synth_epochs: int = Field(100, ge=1)
    synth_occupancy: float = Field(0.15, gt=0, lt=1, description="Target mean occupancy of the corpus")
    synth_channels: int = Field(8, ge=1)

    workers: int = Field(1, ge=1)
    out_dir: Path = Path("results")
    records: bool = Field(False, description="Also write every transmission record")
    log_level: str = "WARNING"
    quiet: bool = False

    @field_validator("policies", "scenarios", "band_channels", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("policies", "scenarios")
    @classmethod
    def check_not_empty(cls, value: List[Any]) -> List[Any]:
        if not value:
            raise ValueError("at least one entry is required")
        if len(set(value)) != len(value):
            raise ValueError("entries must be unique")
        return value

    @field_validator("trace_kind")
    @classmethod
    def check_trace_kind(cls, value: str) -> str:
        if value not in ("occupancy", "power"):
            raise ValueError("trace_kind must be occupancy or power")
        return value

    @field_validator("downsample_mode")
    @classmethod
    def check_downsample_mode(cls, value: str) -> str:
        if value not in ("first", "max"):
            raise ValueError("downsample_mode must be first or max")
        return value

    @model_validator(mode="after")
    def check_run(self) -> "RunConfig":
        if self.band == "custom":
            if not self.band_channels:
                raise ValueError("band 'custom' needs band_channels")
        elif self.band not in BUILTIN_BANDS:
            raise ValueError(f"unknown band '{self.band}', expected one of {sorted(BUILTIN_BANDS)} or custom")
        epoch_ns = self.epoch_ms * 1e6
        if epoch_ns != int(epoch_ns) or int(epoch_ns) % (self.slot_us * 1000):
            raise ValueError(f"epoch_ms {self.epoch_ms} is not a whole number of {self.slot_us} us slots")
        # surfaces MAC/PHY table violations before any work starts
        try:
            frame_duration(1, self.to_phy_mac())
        except ConfigInfeasibleError as e:
            raise ValueError(e.detail)
        self.band_spec()
        return self

    def to_phy_mac(self) -> PhyMacConfig:
        cca = (
            CcaThreshold.from_dbm(self.cca_dbm) if self.cca_dbm is not None
            else CcaThreshold(raw_units=self.cca_units, dbm_equivalent=rssi_units_to_dbm(self.cca_units))
        )
        return PhyMacConfig(cca=cca, **{key: getattr(self, key) for key in PHY_KEYS if getattr(self, key) is not None})

    def to_hidden(self) -> HiddenConfig:
        return HiddenConfig(alpha=self.alpha, escalate_on_loss=self.escalate_on_loss)

    def band_spec(self) -> BandSpec:
        if self.band == "custom":
            return BandSpec(name="custom", channels=tuple(self.band_channels))
        return BUILTIN_BANDS[self.band]

    def bonding_policies(self) -> List[BondingPolicy]:
        return [
            BondingPolicy(kind=kind, secondary_check=self.secondary_check, aligned=self.aligned)
            for kind in self.policies
        ]

    @property
    def epoch_duration_ns(self) -> int:
        return int(self.epoch_ms * 1e6)

    def header(self) -> Dict[str, Any]:
        """The configuration as embedded in every output file"""
        return self.model_dump(mode="json", exclude={"log_level", "quiet", "workers", "out_dir"})


def read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as e:
        raise ChanBondError(f"Cannot read config file {path}: {e.strerror}", exit_code=EXIT_USAGE)
    except tomllib.TOMLDecodeError as e:
        raise ChanBondError(f"Invalid config file {path}: {e}", exit_code=EXIT_USAGE)


def load_run_config(path: Optional[Path] = None, **overrides: Any) -> RunConfig:
    """Validated run configuration; overrides left as None do not mask file or env values"""
    values: Dict[str, Any] = read_config_file(path) if path is not None else {}
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        config = RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ChanBondError(f"Invalid configuration: {problems}", exit_code=EXIT_USAGE)
    logger.debug(f"Run configuration: {config.header()}")
    return config
