"""
Simulate Commands
Replays every retained epoch under each scenario and writes plot-ready reports
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
from tqdm import tqdm

from chanbond.analysis.reporting import build_rows, evaluate_epoch, summarize, write_report_csv
from chanbond.config import RunConfig, load_run_config
from chanbond.corpus import collect_epochs
from chanbond.errors import ChanBondError, EmptyResultError
from chanbond.models.analysis import EpochEvaluation
from chanbond.models.simulation import PolicyKind, Scenario
from chanbond.models.trace import Epoch
from chanbond.scenarios.deprivation import zero_sum_ratio
from chanbond.utils.console import console, setup_logging
from chanbond.utils.json_serializer import serialize_sim_result, write_json

logger = logging.getLogger(__name__)


def map_epochs(
    work: Callable[[Epoch], EpochEvaluation],
    epochs: Sequence[Epoch],
    workers: int,
    desc: str,
    quiet: bool,
) -> List[EpochEvaluation]:
    """Apply `work` to every epoch, results in epoch order whatever the worker count"""
    progress = dict(total=len(epochs), desc=desc, disable=quiet, unit="epoch")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(tqdm(pool.map(work, epochs, chunksize=8), **progress))
    return [work(epoch) for epoch in tqdm(epochs, **progress)]


def records_payload(evaluations: Sequence[EpochEvaluation]) -> List[Dict[str, Any]]:
    """Every run with its deprivation and its zero-sum ratio against single channel on the same primary"""
    payload = []
    for evaluation in evaluations:
        results = evaluation.sweep.results
        single = results[PolicyKind.SINGLE_CHANNEL]
        sc_omega = evaluation.deprivation[PolicyKind.SINGLE_CHANNEL]
        for kind, runs in results.items():
            for p, run in enumerate(runs):
                omega = evaluation.deprivation[kind][p]
                kappa = None
                if kind is not PolicyKind.SINGLE_CHANNEL:
                    kappa = zero_sum_ratio(
                        run.throughput_bps / 1e6,
                        single[p].throughput_bps / 1e6,
                        omega.omega_mbps,
                        sc_omega[p].omega_mbps,
                    )
                payload.append(serialize_sim_result(run, evaluation.channel_labels, omega, kappa))
    return payload


def run_simulation(traces: Sequence[Path], config: RunConfig) -> Tuple[Dict[str, Any], List[Path]]:
    """Write one CSV per scenario plus summary.json; returns the summary and the files written"""
    epochs = collect_epochs(traces, config)
    if not epochs:
        raise EmptyResultError("0 epochs retained")

    phy = config.to_phy_mac()
    policies = config.bonding_policies()
    out_dir = Path(config.out_dir)
    written: List[Path] = []
    summary: Dict[str, Any] = {"config": config.header(), "n_epochs": len(epochs), "scenarios": {}}

    for scenario in config.scenarios:
        work = partial(
            evaluate_epoch,
            policies=policies,
            cfg=phy,
            seed=config.seed,
            scenario=scenario,
            hidden=config.to_hidden() if scenario is Scenario.HIDDEN else None,
            reference=config.xi_reference,
            keep_records=config.records,
        )
        evaluations = map_epochs(work, epochs, config.workers, f"Simulating {scenario.value}", config.quiet)
        rows = build_rows(evaluations, config.policies)
        written.append(write_report_csv(rows, out_dir / f"{scenario.value}.csv", config.header()))
        summary["scenarios"][scenario.value] = summarize(evaluations, config.policies)
        if config.records:
            written.append(write_json(
                out_dir / f"{scenario.value}_records.json",
                {"config": config.header(), "runs": records_payload(evaluations)},
            ))

    written.append(write_json(out_dir / "summary.json", summary))
    return summary, written


@click.command("simulate")
@click.argument("traces", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=click.IntRange(min=0))
@click.option("--band", type=click.Choice(["unii12", "unii2c", "custom"]))
@click.option("--band-channels", help="1-based trace columns of a custom band, e.g. 1,2,3,4")
@click.option("--epoch-ms", type=float)
@click.option("--min-occupancy", type=click.FloatRange(0, 1))
@click.option("--policies", help="Comma list of sc, co, nc")
@click.option("--scenario", "scenarios", help="Comma list of deferral, hidden")
@click.option("--secondary-check", type=click.Choice(["pifs", "instant"]))
@click.option("--aligned/--no-aligned", default=None, help="Power-of-two contiguous channelization")
@click.option("--alpha", type=click.FloatRange(0, 1), help="Hidden-terminal loss fraction")
@click.option("--escalation/--no-escalation", "escalate_on_loss", default=None)
@click.option("--trace-kind", type=click.Choice(["occupancy", "power"]), help="How CSV inputs are read")
@click.option("--cca", "cca_units", type=click.IntRange(0, 1023))
@click.option("--downsample", type=click.IntRange(min=1))
@click.option("--synth", type=click.Choice(["markov", "iid"]), help="Simulate a synthetic corpus")
@click.option("--synth-epochs", type=click.IntRange(min=1))
@click.option("--synth-occupancy", type=click.FloatRange(0, 1, min_open=True, max_open=True))
@click.option("--records/--no-records", default=None, help="Also write every transmission record")
@click.option("--workers", type=click.IntRange(min=1))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--log-level")
@click.option("--quiet/--no-quiet", default=None)
def simulate_command(traces: Tuple[Path, ...], config_path: Optional[Path], **options: Any) -> None:
    """Simulate channel bonding over TRACES (or a synthetic corpus)."""
    config = load_run_config(config_path, **options)
    setup_logging(config.log_level, config.quiet)
    try:
        summary, written = run_simulation(traces, config)
    except ChanBondError:
        raise
    except Exception as e:
        raise ChanBondError(f"Failed to simulate: {e}")

    if not config.quiet:
        console.print(f"{summary['n_epochs']} epochs simulated under {', '.join(summary['scenarios'])}")
        for path in written:
            console.print(f"  wrote {path}")
