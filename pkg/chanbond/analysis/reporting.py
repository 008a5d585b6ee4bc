"""
Reporting
Per-epoch evaluation, plot-ready result rows and per-regime summaries
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import polars as pl

from chanbond.errors import EmptyResultError
from chanbond.models.analysis import CorrelationClass, EpochEvaluation, HiddenConfig, SweepReport
from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind, Scenario
from chanbond.models.trace import Epoch
from chanbond.occupancy.operations import fully_idle_channels
from chanbond.scenarios.deprivation import bandwidth_deprivation, zero_sum_ratio
from chanbond.utils.json_serializer import config_line

from .correlation import best_primary_xi
from .load import LOAD_ORDER
from .sweep import sweep

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "epoch_id",
    "mean_occupancy",
    "load_class",
    "primary",
    "policy",
    "throughput_bps",
    "normalized",
    "xi",
    "corr_class",
    "omega_mhz",
]

ROW_SCHEMA = {
    "epoch_id": pl.Int64,
    "mean_occupancy": pl.Float64,
    "load_class": pl.Utf8,
    "primary": pl.Int64,
    "policy": pl.Utf8,
    "throughput_bps": pl.Float64,
    "normalized": pl.Float64,
    "xi": pl.Float64,
    "corr_class": pl.Utf8,
    "omega_mhz": pl.Float64,
    "omega_mbps": pl.Float64,
    "primary_index": pl.Int64,
    "scenario": pl.Utf8,
}

EPOCH_SCHEMA = {
    "epoch_id": pl.Int64,
    "load_class": pl.Utf8,
    "corr_class": pl.Utf8,
    "xi": pl.Float64,
    "policy": pl.Utf8,
    "normalized_best": pl.Float64,
}

REFERENCE_FALLBACK = (PolicyKind.CONTIGUOUS, PolicyKind.NON_CONTIGUOUS, PolicyKind.SINGLE_CHANNEL)


def pick_reference(report: SweepReport, preferred: PolicyKind) -> PolicyKind:
    """Policy whose best primary defines p*, falling back when it was not run"""
    for kind in (preferred, *REFERENCE_FALLBACK):
        if kind in report.throughput:
            return kind
    return PolicyKind.SINGLE_CHANNEL


def evaluate_epoch(
    epoch: Epoch,
    policies: Sequence[BondingPolicy],
    cfg: PhyMacConfig,
    seed: int,
    scenario: Scenario = Scenario.DEFERRAL,
    hidden: Optional[HiddenConfig] = None,
    reference: PolicyKind = PolicyKind.CONTIGUOUS,
    keep_records: bool = False,
) -> EpochEvaluation:
    """Sweep one epoch and attach its correlation and per-run deprivation"""
    report = sweep(epoch, policies, cfg, seed, scenario, hidden)
    correlation = best_primary_xi(epoch, report, pick_reference(report, reference))

    deprivation = {}
    for kind, runs in report.results.items():
        reports = [bandwidth_deprivation(run, epoch, cfg) for run in runs]
        if not keep_records:
            reports = [d.model_copy(update={"contributions": []}) for d in reports]
        deprivation[kind] = reports
    if not keep_records:
        report = report.model_copy(update={"results": {}})

    return EpochEvaluation(
        sweep=report,
        correlation=correlation,
        deprivation=deprivation,
        channel_labels=list(epoch.channel_labels),
        idle_channels=fully_idle_channels(epoch),
    )


def build_rows(
    evaluations: Sequence[EpochEvaluation],
    policies: Optional[Sequence[PolicyKind]] = None,
) -> pl.DataFrame:
    """One row per (epoch, primary, policy); all policies run when `policies` is None"""
    rows: List[Dict[str, Any]] = []
    for evaluation in evaluations:
        report = evaluation.sweep
        sc_best = report.single_channel_best
        kinds = policies if policies is not None else list(report.throughput)
        for kind in kinds:
            for p, throughput in enumerate(report.throughput[kind]):
                omega = evaluation.deprivation[kind][p]
                rows.append({
                    "epoch_id": report.epoch_id,
                    "mean_occupancy": report.mean_occupancy,
                    "load_class": report.load_class.value,
                    "primary": evaluation.channel_labels[p],
                    "policy": kind.value,
                    "throughput_bps": throughput,
                    "normalized": throughput / sc_best if sc_best > 0 else None,
                    "xi": evaluation.correlation.xi,
                    "corr_class": evaluation.correlation.correlation_class.value,
                    "omega_mhz": omega.omega_mhz,
                    "omega_mbps": omega.omega_mbps,
                    "primary_index": p,
                    "scenario": report.scenario.value,
                })
    return pl.DataFrame(rows, schema=ROW_SCHEMA)


def build_epoch_frame(evaluations: Sequence[EpochEvaluation]) -> pl.DataFrame:
    """One row per (epoch, policy) with the normalized best-primary throughput"""
    rows = [
        {
            "epoch_id": e.sweep.epoch_id,
            "load_class": e.sweep.load_class.value,
            "corr_class": e.correlation.correlation_class.value,
            "xi": e.correlation.xi,
            "policy": kind.value,
            "normalized_best": value,
        }
        for e in evaluations
        for kind, value in e.sweep.normalized_best.items()
    ]
    return pl.DataFrame(rows, schema=EPOCH_SCHEMA)


def write_csv_with_config(frame: pl.DataFrame, path: Path, config: Mapping[str, Any]) -> Path:
    """CSV preceded by a comment line holding the run configuration"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(config_line(config))
        frame.write_csv(fh)
    logger.info(f"Wrote {frame.height} rows to {path}")
    return path


def write_report_csv(rows: pl.DataFrame, path: Path, config: Mapping[str, Any]) -> Path:
    """Plot-ready CSV with the stable report column order"""
    return write_csv_with_config(rows.select(REPORT_COLUMNS), path, config)


def _regime_summary(
    rows: pl.DataFrame,
    epochs: pl.DataFrame,
    evaluations: Sequence[EpochEvaluation],
    kinds: Sequence[PolicyKind],
) -> Dict[str, Any]:
    summary: Dict[str, Any] = {"n_epochs": len(evaluations), "policies": {}}
    if not evaluations:
        return summary
    idle_counts = [len(e.idle_channels) for e in evaluations]
    summary["mean_idle_channels"] = sum(idle_counts) / len(idle_counts)
    summary["fraction_with_idle_channel"] = sum(1 for n in idle_counts if n) / len(idle_counts)

    means = {
        r["policy"]: r
        for r in rows.group_by("policy", maintain_order=True)
        .agg(
            pl.col("throughput_bps").mean().alias("mean_throughput_bps"),
            pl.col("omega_mhz").mean().alias("mean_omega_mhz"),
            pl.col("omega_mbps").mean().alias("mean_omega_mbps"),
        )
        .iter_rows(named=True)
    }
    best = {
        r["policy"]: r
        for r in epochs.group_by("policy", maintain_order=True)
        .agg(
            pl.col("normalized_best").mean().alias("mean_normalized_best"),
            (pl.col("normalized_best") < 1.0).mean().alias("fraction_below_single_channel"),
        )
        .iter_rows(named=True)
    }
    sc = means[PolicyKind.SINGLE_CHANNEL.value]
    for kind in kinds:
        m = means[kind.value]
        entry = {
            "mean_throughput_bps": m["mean_throughput_bps"],
            "mean_normalized_best": best[kind.value]["mean_normalized_best"],
            "fraction_below_single_channel": best[kind.value]["fraction_below_single_channel"],
            "mean_omega_mhz": m["mean_omega_mhz"],
            "mean_omega_mbps": m["mean_omega_mbps"],
        }
        if kind is not PolicyKind.SINGLE_CHANNEL:
            entry["kappa"] = zero_sum_ratio(
                m["mean_throughput_bps"] / 1e6,
                sc["mean_throughput_bps"] / 1e6,
                m["mean_omega_mbps"],
                sc["mean_omega_mbps"],
            )
        summary["policies"][kind.value] = entry

    ratios = [r for e in evaluations for r in e.sweep.co_nc_ratio if r is not None]
    if ratios:
        summary["co_nc"] = {
            "n_pairs": len(ratios),
            "mean_ratio": sum(ratios) / len(ratios),
            "co_beats_nc_fraction": sum(1 for r in ratios if r > 1.0) / len(ratios),
        }
    return summary


def _correlation_summary(
    epochs: pl.DataFrame,
    evaluations: Sequence[EpochEvaluation],
    kinds: Sequence[PolicyKind],
) -> Dict[str, Any]:
    normalized = {
        (r["corr_class"], r["policy"]): r["mean_normalized_best"]
        for r in epochs.group_by(["corr_class", "policy"])
        .agg(pl.col("normalized_best").mean().alias("mean_normalized_best"))
        .iter_rows(named=True)
    }
    total = len(evaluations)
    summary: Dict[str, Any] = {}
    for cls in CorrelationClass:
        count = sum(1 for e in evaluations if e.correlation.correlation_class is cls)
        summary[cls.value] = {
            "n_epochs": count,
            "fraction": count / total if total else 0.0,
            "mean_normalized_best": {k.value: normalized.get((cls.value, k.value)) for k in kinds},
        }
    return summary


def summarize(
    evaluations: Sequence[EpochEvaluation],
    policies: Optional[Sequence[PolicyKind]] = None,
) -> Dict[str, Any]:
    """Aggregates of one scenario, overall and per load class, plus the correlation-class breakdown"""
    if not evaluations:
        raise EmptyResultError("No epochs to summarize")
    kinds = list(policies) if policies is not None else list(evaluations[0].sweep.throughput)
    rows = build_rows(evaluations)
    epochs = build_epoch_frame(evaluations)

    by_load = {"all": _regime_summary(rows, epochs, evaluations, kinds)}
    for load in LOAD_ORDER:
        subset = [e for e in evaluations if e.sweep.load_class is load]
        by_load[load.value] = _regime_summary(
            rows.filter(pl.col("load_class") == load.value),
            epochs.filter(pl.col("load_class") == load.value),
            subset,
            kinds,
        )
    return {
        "scenario": evaluations[0].sweep.scenario.value,
        "n_epochs": len(evaluations),
        "by_load": by_load,
        "by_correlation": _correlation_summary(epochs, evaluations, kinds),
    }
