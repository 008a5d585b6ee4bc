"""
Primary Sweep
Runs every policy from every primary of an epoch and normalizes against single-channel operation
"""
import logging
from typing import Dict, List, Optional, Sequence

from chanbond.dcf.timing import derive_seed
from chanbond.errors import InvalidArgumentError
from chanbond.models.analysis import HiddenConfig, SweepReport
from chanbond.models.simulation import BondingPolicy, EpochSimResult, PhyMacConfig, PolicyKind, Scenario
from chanbond.models.trace import Epoch
from chanbond.scenarios.hidden import run_scenario

from .correlation import argmax_primary
from .load import classify_load

logger = logging.getLogger(__name__)


def normalized_best_throughput(throughputs: Sequence[float], single_channel: Sequence[float]) -> Optional[float]:
    """Best-primary throughput over the best single-channel throughput; None when the latter is zero"""
    sc_best = max(single_channel) if len(single_channel) else 0.0
    if sc_best == 0:
        return None
    return max(throughputs) / sc_best


def sweep(
    epoch: Epoch,
    policies: Sequence[BondingPolicy],
    cfg: PhyMacConfig,
    seed: int,
    scenario: Scenario = Scenario.DEFERRAL,
    hidden: Optional[HiddenConfig] = None,
    *,
    keep_results: bool = True,
    fixed_backoff: Optional[int] = None,
) -> SweepReport:
    """Throughput of each policy from each primary of the epoch.

    Single-channel runs are always made since every policy is normalized
    against them. All runs of the epoch start from the same derived seed.
    """
    if not policies:
        raise InvalidArgumentError("At least one bonding policy is required")
    kinds = [p.kind for p in policies]
    if len(set(kinds)) != len(kinds):
        raise InvalidArgumentError(f"Duplicate policies in {[k.value for k in kinds]}")

    run_policies = list(policies)
    if PolicyKind.SINGLE_CHANNEL not in kinds:
        run_policies.insert(0, BondingPolicy(kind=PolicyKind.SINGLE_CHANNEL))

    run_seed = derive_seed(seed, epoch.epoch_id)
    results: Dict[PolicyKind, List[EpochSimResult]] = {}
    for policy in run_policies:
        results[policy.kind] = [
            run_scenario(scenario, epoch, p, policy, cfg, run_seed, hidden, fixed_backoff=fixed_backoff)
            for p in range(epoch.n_channels)
        ]

    throughput = {kind: [r.throughput_bps for r in runs] for kind, runs in results.items()}
    single = throughput[PolicyKind.SINGLE_CHANNEL]
    best_primary = {kind: argmax_primary(values) for kind, values in throughput.items()}
    normalized = {kind: normalized_best_throughput(values, single) for kind, values in throughput.items()}

    co_nc_ratio: List[Optional[float]] = []
    if PolicyKind.CONTIGUOUS in throughput and PolicyKind.NON_CONTIGUOUS in throughput:
        co_nc_ratio = [
            co / nc if nc > 0 else None
            for co, nc in zip(throughput[PolicyKind.CONTIGUOUS], throughput[PolicyKind.NON_CONTIGUOUS])
        ]

    logger.debug(
        f"Epoch {epoch.epoch_id} {scenario.value}: best primaries "
        f"{ {k.value: v for k, v in best_primary.items()} }"
    )
    return SweepReport(
        epoch_id=epoch.epoch_id,
        mean_occupancy=epoch.mean_occupancy,
        load_class=classify_load(epoch.mean_occupancy),
        scenario=scenario,
        throughput=throughput,
        best_primary=best_primary,
        normalized_best=normalized,
        co_nc_ratio=co_nc_ratio,
        results=results if keep_results else {},
    )
