"""
DCF State Machine
Replays a fully backlogged channel-bonding BSS over one epoch.

The machine moves through Busy -> DIFS -> BO -> TX/RX on the primary
channel's samples. Rather than stepping one sample at a time it jumps
between state changes using next-idle / next-busy lookup tables, which
gives the same transitions as the per-sample rules.
"""
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from chanbond.errors import InvalidArgumentError
from chanbond.models.simulation import (
    BondingPolicy,
    EpochSimResult,
    FrameTiming,
    MachineState,
    MachineStateKind,
    PhyMacConfig,
    Scenario,
    TxRecord,
)
from chanbond.models.trace import Epoch

from .channels import select_channels
from .timing import draw_backoff, frame_duration

logger = logging.getLogger(__name__)

FrameJudge = Callable[[TxRecord], bool]


def _next_true(mask: np.ndarray) -> List[int]:
    """For each t, the first index >= t where mask holds, or len(mask)"""
    n = len(mask)
    index = np.where(mask, np.arange(n), n)
    return np.minimum.accumulate(index[::-1])[::-1].tolist()


def check_run_inputs(epoch: Epoch, primary: int, cfg: PhyMacConfig) -> None:
    if not 0 <= primary < epoch.n_channels:
        raise InvalidArgumentError(
            f"Primary {primary} is outside the {epoch.n_channels}-channel band"
        )
    if epoch.sample_period_ns != cfg.slot_ns:
        raise InvalidArgumentError(
            f"Slot of {cfg.slot_ns} ns does not match the epoch sample period of {epoch.sample_period_ns} ns"
        )


def walk_epoch(
    epoch: Epoch,
    primary: int,
    policy: BondingPolicy,
    cfg: PhyMacConfig,
    seed: int,
    *,
    frame_lost: Optional[FrameJudge] = None,
    escalate_on_loss: bool = True,
    fixed_backoff: Optional[int] = None,
    scenario: Scenario = Scenario.DEFERRAL,
) -> EpochSimResult:
    """Run the machine over every sample of the epoch.

    frame_lost, when given, judges each completed frame; lost frames deliver
    nothing and, with escalate_on_loss, move the backoff one stage up.
    fixed_backoff replaces every random draw with a constant.
    """
    check_run_inputs(epoch, primary, cfg)
    rng = np.random.default_rng(seed)
    n = epoch.n_samples
    busy = epoch.bits[:, primary].astype(bool)
    next_idle = _next_true(~busy)
    next_busy = _next_true(busy)
    difs = cfg.difs_samples

    timings: Dict[int, FrameTiming] = {}
    records: List[TxRecord] = []
    state = MachineState()
    t = 0
    while t < n:
        state.current = MachineStateKind.BUSY
        t = next_idle[t]
        if t >= n:
            break

        state.current = MachineStateKind.DIFS
        run_end = next_busy[t]
        if run_end - t < difs:
            state.difs_progress = run_end - t
            t = run_end
            continue
        state.difs_progress = difs
        t += difs

        state.current = MachineStateKind.BACKOFF
        if state.backoff_counter is None:
            if fixed_backoff is not None:
                state.backoff_counter = fixed_backoff
            else:
                state.backoff_counter = draw_backoff(rng, state.backoff_stage, cfg)
        if run_end - t <= state.backoff_counter:
            # frozen, resumes after the next DIFS
            state.backoff_counter -= run_end - t
            t = run_end
            continue
        t_expiry = t + state.backoff_counter
        state.backoff_counter = None

        channels = select_channels(policy, epoch, t_expiry, primary, cfg)
        timing = timings.get(len(channels))
        if timing is None:
            timing = timings[len(channels)] = frame_duration(len(channels), cfg)
        end = t_expiry + timing.total_samples
        if end > n:
            break

        state.current = MachineStateKind.TXRX
        state.pending = TxRecord(start=t_expiry, end=end, channels=channels, n_packets=timing.n_packets)
        if frame_lost is not None and frame_lost(state.pending):
            records.append(state.pending.model_copy(update={"lost": True}))
            if escalate_on_loss:
                state.backoff_stage = min(state.backoff_stage + 1, cfg.backoff_stages)
        else:
            records.append(state.pending)
            state.backoff_stage = 0
        state.pending = None
        t = end

    packets = sum(r.n_packets for r in records if not r.lost)
    duration_s = epoch.duration_s
    result = EpochSimResult(
        records=records,
        packets_sent=packets,
        throughput_bps=packets * cfg.packet_length_bits / duration_s,
        primary=primary,
        policy=policy,
        seed=seed,
        scenario=scenario,
        epoch_id=epoch.epoch_id,
        duration_s=duration_s,
    )
    logger.debug(
        f"Epoch {epoch.epoch_id} primary {primary} {policy.label} {scenario.value}: "
        f"{len(records)} frames, {packets} packets"
    )
    return result


def run_epoch(
    epoch: Epoch,
    primary: int,
    policy: BondingPolicy,
    cfg: PhyMacConfig,
    seed: int,
    *,
    fixed_backoff: Optional[int] = None,
) -> EpochSimResult:
    """Deferral scenario: neighbours sense the bonded frame and hold off, so nothing is lost"""
    return walk_epoch(epoch, primary, policy, cfg, seed, fixed_backoff=fixed_backoff)
