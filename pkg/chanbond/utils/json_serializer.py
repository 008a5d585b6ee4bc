"""
JSON Serializer Utilities
Converts numpy values, enums and result models to JSON-serializable primitives
and writes them with orjson
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import orjson
from pydantic import BaseModel

from chanbond.errors import TraceFormatError
from chanbond.models.analysis import DeprivationReport
from chanbond.models.simulation import EpochSimResult, TxRecord
from chanbond.models.synth import ChannelModel, FittedEpoch, IidChannelParams, MarkovChannelParams

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def serialize_number(obj: Any) -> Any:
    """Convert numpy scalars to plain Python numbers"""
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def to_json_serializable(doc: Any) -> Any:
    """Convert nested structures containing numpy values, enums or models to primitives"""
    if isinstance(doc, BaseModel):
        return to_json_serializable(doc.model_dump(mode="json"))
    if isinstance(doc, dict):
        return {
            (k.value if isinstance(k, Enum) else k): to_json_serializable(v) for k, v in doc.items()
        }
    if isinstance(doc, (list, tuple)):
        return [to_json_serializable(item) for item in doc]
    if isinstance(doc, np.ndarray):
        return doc.tolist()
    if isinstance(doc, Enum):
        return doc.value
    if isinstance(doc, Path):
        return str(doc)
    return serialize_number(doc)


def serialize_record(record: TxRecord) -> Dict[str, Any]:
    return {
        "start": record.start,
        "end": record.end,
        "channels": list(record.channels),
        "packets": record.n_packets,
        "lost": record.lost,
    }


def serialize_sim_result(
    result: EpochSimResult,
    channel_labels: Optional[Sequence[int]] = None,
    deprivation: Optional[DeprivationReport] = None,
    kappa: Optional[float] = None,
) -> Dict[str, Any]:
    """Serialize one run; record channels stay band-relative, `primary` is the 802.11 label when known"""
    payload = {
        "epoch_id": result.epoch_id,
        "scenario": result.scenario.value,
        "primary": channel_labels[result.primary] if channel_labels else result.primary,
        "primary_index": result.primary,
        "policy": result.policy.label,
        "seed": result.seed,
        "packets": result.packets_sent,
        "throughput_bps": result.throughput_bps,
        "records": [serialize_record(r) for r in result.records],
    }
    if deprivation is not None:
        payload["omega_mhz"] = deprivation.omega_mhz
        payload["omega_mbps"] = deprivation.omega_mbps
        payload["kappa"] = kappa
    return payload


def serialize_channel_model(model: ChannelModel) -> Dict[str, Any]:
    if isinstance(model, MarkovChannelParams):
        return {
            "mean_busy_samples": model.mean_busy_duration,
            "mean_idle_samples": model.mean_idle_duration,
        }
    return {"p_occupied": model.occupancy_probability}


def parse_channel_model(data: Dict[str, Any]) -> ChannelModel:
    """Inverse of serialize_channel_model"""
    if "p_occupied" in data:
        return IidChannelParams(occupancy_probability=data["p_occupied"])
    if "mean_busy_samples" in data and "mean_idle_samples" in data:
        return MarkovChannelParams(
            mean_busy_duration=data["mean_busy_samples"],
            mean_idle_duration=data["mean_idle_samples"],
        )
    raise TraceFormatError(f"Unrecognized channel model entry: {sorted(data)}")


def serialize_fitted_epoch(fitted: FittedEpoch) -> Dict[str, Any]:
    return {
        "epoch_id": fitted.epoch_id,
        "model": fitted.model.value,
        "fallback_channels": list(fitted.fallback_channels),
        "channels": [serialize_channel_model(c) for c in fitted.channels],
    }


def compact_config(config: Mapping[str, Any]) -> bytes:
    """Single-line JSON of a run configuration, as embedded in file headers"""
    return orjson.dumps(to_json_serializable(dict(config)), option=orjson.OPT_SORT_KEYS)


def config_line(config: Mapping[str, Any]) -> bytes:
    return b"# config: " + compact_config(config) + b"\n"


def dumps(payload: Any) -> bytes:
    return orjson.dumps(to_json_serializable(payload), option=JSON_OPTIONS)


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(payload) + b"\n")
    return path


def read_json(path: Path) -> Any:
    try:
        return orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as e:
        raise TraceFormatError(f"Failed to parse JSON file {path}: {e}")


def read_channel_models(path: Path) -> List[ChannelModel]:
    """Channel models from a params file: a `synth fit` output, a list of entries or a fitted-epoch object"""
    data = read_json(path)
    if isinstance(data, dict) and "fits" in data:
        data = data["fits"]
    if isinstance(data, dict) and "channels" in data:
        data = data["channels"]
    elif isinstance(data, list) and data and isinstance(data[0], dict) and "channels" in data[0]:
        data = data[0]["channels"]
    if not isinstance(data, list) or not data:
        raise TraceFormatError(f"Params file {path} holds no channel models")
    return [parse_channel_model(entry) for entry in data]
