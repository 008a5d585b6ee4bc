"""
Hidden Terminals
Frame loss when neighbours do not hear the bonded transmission and keep transmitting
"""
import logging
from typing import Optional

import numpy as np

from chanbond.dcf.state_machine import run_epoch, walk_epoch
from chanbond.errors import InvalidArgumentError
from chanbond.models.analysis import HiddenConfig
from chanbond.models.simulation import BondingPolicy, EpochSimResult, PhyMacConfig, Scenario, TxRecord
from chanbond.models.trace import Epoch

logger = logging.getLogger(__name__)

_EPS = 1e-9


def active_samples(record: TxRecord, epoch: Epoch) -> int:
    """Samples of the frame span where at least one of its channels is busy"""
    if not record.channels:
        raise InvalidArgumentError("A frame without channels cannot be scored")
    if record.end > epoch.n_samples:
        raise InvalidArgumentError(
            f"Frame [{record.start}, {record.end}) runs past the {epoch.n_samples}-sample epoch"
        )
    span = epoch.bits[record.start: record.end, list(record.channels)]
    return int(np.count_nonzero(span.any(axis=1)))


def frame_lost(record: TxRecord, epoch: Epoch, cfg: Optional[HiddenConfig] = None) -> bool:
    """Lost iff the active samples reach alpha times the frame length (inclusive)"""
    cfg = cfg or HiddenConfig()
    return active_samples(record, epoch) >= cfg.alpha * record.n_samples - _EPS


def apply_hidden_scenario(
    epoch: Epoch,
    primary: int,
    policy: BondingPolicy,
    cfg: PhyMacConfig,
    seed: int,
    hidden: Optional[HiddenConfig] = None,
    *,
    fixed_backoff: Optional[int] = None,
) -> EpochSimResult:
    """Replay the machine scoring each frame against the activity it overlapped"""
    hidden = hidden or HiddenConfig()
    return walk_epoch(
        epoch,
        primary,
        policy,
        cfg,
        seed,
        frame_lost=lambda record: frame_lost(record, epoch, hidden),
        escalate_on_loss=hidden.escalate_on_loss,
        fixed_backoff=fixed_backoff,
        scenario=Scenario.HIDDEN,
    )


def run_scenario(
    scenario: Scenario,
    epoch: Epoch,
    primary: int,
    policy: BondingPolicy,
    cfg: PhyMacConfig,
    seed: int,
    hidden: Optional[HiddenConfig] = None,
    *,
    fixed_backoff: Optional[int] = None,
) -> EpochSimResult:
    if scenario is Scenario.HIDDEN:
        return apply_hidden_scenario(epoch, primary, policy, cfg, seed, hidden, fixed_backoff=fixed_backoff)
    return run_epoch(epoch, primary, policy, cfg, seed, fixed_backoff=fixed_backoff)
