"""
Synth Commands
Fit, generate and compare synthetic occupancy models
"""
import logging
from pathlib import Path
from typing import Any, List, Optional, Tuple

import click
import polars as pl
from rich.table import Table

from chanbond.analysis.reporting import write_csv_with_config
from chanbond.config import load_run_config
from chanbond.corpus import collect_epochs
from chanbond.errors import ChanBondError, EmptyResultError
from chanbond.models.synth import ChannelModel, IidChannelParams, MarkovChannelParams, ModelComparisonReport, ModelKind
from chanbond.models.trace import DEFAULT_SAMPLE_PERIOD_NS
from chanbond.occupancy.trace_io import write_trace
from chanbond.synth.comparison import model_comparison
from chanbond.synth.fitting import fit_corpus
from chanbond.synth.generator import generate_channels
from chanbond.utils.console import console, setup_logging
from chanbond.utils.json_serializer import (
    read_channel_models,
    serialize_channel_model,
    serialize_fitted_epoch,
    write_json,
)

logger = logging.getLogger(__name__)

MODEL_CHOICE = click.Choice([k.value for k in ModelKind])


def corpus_options(func):
    """Options shared by the subcommands that read traces into epochs"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)),
        click.option("--seed", type=click.IntRange(min=0)),
        click.option("--band", type=click.Choice(["unii12", "unii2c", "custom"])),
        click.option("--band-channels", help="1-based trace columns of a custom band"),
        click.option("--epoch-ms", type=float),
        click.option("--min-occupancy", type=click.FloatRange(0, 1)),
        click.option("--trace-kind", type=click.Choice(["occupancy", "power"])),
        click.option("--log-level"),
        click.option("--quiet/--no-quiet", default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group("synth")
def synth_group() -> None:
    """Synthetic occupancy models."""


@synth_group.command("fit")
@click.argument("traces", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--model", type=MODEL_CHOICE, default="markov", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--per-corpus", is_flag=True, help="One fit pooled over every epoch")
@click.option("--fallback-iid", is_flag=True, help="Fit constant channels as i.i.d. instead of failing")
@corpus_options
def fit_command(
    traces: Tuple[Path, ...],
    model: str,
    out_path: Path,
    per_corpus: bool,
    fallback_iid: bool,
    config_path: Optional[Path],
    **options: Any,
) -> None:
    """Fit per-channel models to the retained epochs of TRACES."""
    config = load_run_config(config_path, **options)
    setup_logging(config.log_level, config.quiet)
    try:
        epochs = collect_epochs(traces, config)
        if not epochs:
            raise EmptyResultError("0 epochs retained")
        fitted = fit_corpus(epochs, ModelKind(model), per_corpus=per_corpus, fallback_iid=fallback_iid)
        header = {**config.header(), "model": model, "per_corpus": per_corpus, "fallback_iid": fallback_iid}
        write_json(out_path, {"config": header, "fits": [serialize_fitted_epoch(f) for f in fitted]})
    except ChanBondError:
        raise
    except Exception as e:
        raise ChanBondError(f"Failed to fit {model} models: {e}")
    n_fallback = sum(1 for f in fitted if f.fallback_channels)
    console.print(f"Fitted {len(fitted)} {model} model set(s) to {out_path} ({n_fallback} with i.i.d. fallback)")


def _generate_models(
    model: str,
    mean_busy: Optional[float],
    mean_idle: Optional[float],
    p: Optional[float],
    params: Optional[Path],
    channels: int,
) -> List[ChannelModel]:
    if params is not None:
        return read_channel_models(params)
    if model == ModelKind.MARKOV.value:
        if mean_busy is None or mean_idle is None:
            raise click.UsageError("--model markov needs --mean-busy and --mean-idle (or --params)")
        return [MarkovChannelParams(mean_busy_duration=mean_busy, mean_idle_duration=mean_idle)] * channels
    if p is None:
        raise click.UsageError("--model iid needs --p (or --params)")
    return [IidChannelParams(occupancy_probability=p)] * channels


@synth_group.command("generate")
@click.option("--model", type=MODEL_CHOICE, default="markov", show_default=True)
@click.option("--mean-busy", type=click.FloatRange(min=1), help="Mean busy run in samples")
@click.option("--mean-idle", type=click.FloatRange(min=1), help="Mean idle run in samples")
@click.option("--p", type=click.FloatRange(0, 1), help="Per-sample busy probability")
@click.option("--params", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Fitted params JSON")
@click.option("--channels", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--sample-period-ns", type=click.IntRange(min=1), default=DEFAULT_SAMPLE_PERIOD_NS, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--log-level", default="WARNING", show_default=True)
def generate_command(
    model: str,
    mean_busy: Optional[float],
    mean_idle: Optional[float],
    p: Optional[float],
    params: Optional[Path],
    channels: int,
    samples: int,
    sample_period_ns: int,
    seed: int,
    out_path: Path,
    log_level: str,
) -> None:
    """Write a synthetic occupancy trace."""
    setup_logging(log_level)
    models = _generate_models(model, mean_busy, mean_idle, p, params, channels)
    try:
        trace = generate_channels(models, samples, seed, sample_period_ns)
        header = {
            "model": model if params is None else "params",
            "seed": seed,
            "samples": samples,
            "sample_period_ns": sample_period_ns,
            "channels": [serialize_channel_model(m) for m in models],
        }
        write_trace(trace, out_path, header)
    except ChanBondError:
        raise
    except Exception as e:
        raise ChanBondError(f"Failed to generate a synthetic trace: {e}")
    console.print(
        f"Generated {trace.n_samples} x {trace.n_channels} trace, mean occupancy {float(trace.bits.mean()):.4f}"
    )


def comparison_frame(report: ModelComparisonReport) -> pl.DataFrame:
    return pl.DataFrame(
        [
            {
                "model": row.model.value,
                "grouping": row.grouping,
                "group": row.group,
                "n_epochs": row.n_epochs,
                "mre": row.mre,
                "max_mre": row.max_mre,
            }
            for row in report.table
        ],
        schema={
            "model": pl.Utf8,
            "grouping": pl.Utf8,
            "group": pl.Utf8,
            "n_epochs": pl.Int64,
            "mre": pl.Float64,
            "max_mre": pl.Float64,
        },
    )


def _print_table(report: ModelComparisonReport) -> None:
    table = Table(title="Model throughput error (MRE)")
    for column in ("model", "grouping", "group", "epochs", "mre", "max"):
        table.add_column(column)
    for row in report.table:
        table.add_row(
            row.model.value,
            row.grouping,
            row.group,
            str(row.n_epochs),
            "-" if row.mre is None else f"{row.mre:.4f}",
            "-" if row.max_mre is None else f"{row.max_mre:.4f}",
        )
    console.print(table)


@synth_group.command("compare")
@click.argument("traces", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--per-corpus", is_flag=True, help="Fit once over the whole corpus")
@click.option("--fallback-iid/--no-fallback-iid", default=True, show_default=True)
@click.option("--synth", type=click.Choice(["markov", "iid"]), help="Compare on a synthetic corpus")
@click.option("--synth-epochs", type=click.IntRange(min=1))
@click.option("--synth-occupancy", type=click.FloatRange(0, 1, min_open=True, max_open=True))
@click.option("--workers", type=click.IntRange(min=1))
@corpus_options
def compare_command(
    traces: Tuple[Path, ...],
    per_corpus: bool,
    fallback_iid: bool,
    config_path: Optional[Path],
    **options: Any,
) -> None:
    """MRE of Markov and i.i.d. stand-ins against the epochs of TRACES."""
    config = load_run_config(config_path, **options)
    setup_logging(config.log_level, config.quiet)
    try:
        epochs = collect_epochs(traces, config)
        if not epochs:
            raise EmptyResultError("0 epochs retained")
        report = model_comparison(
            epochs,
            config.to_phy_mac(),
            config.seed,
            fallback_iid=fallback_iid,
            per_corpus=per_corpus,
            workers=config.workers,
            show_progress=not config.quiet,
        )
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        header = {**config.header(), "per_corpus": per_corpus, "fallback_iid": fallback_iid}
        write_csv_with_config(comparison_frame(report), out_dir / "model_error.csv", header)
        write_json(out_dir / "model_error.json", {"config": header, **report.model_dump(mode="json")})
    except ChanBondError:
        raise
    except Exception as e:
        raise ChanBondError(f"Failed to compare models: {e}")
    if not config.quiet:
        _print_table(report)
