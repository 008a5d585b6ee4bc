"""
Channel Selection
Secondary-channel sensing and the bonding policies' channel sets
"""
from typing import Sequence, Tuple

import numpy as np

from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind, SecondaryCheck
from chanbond.models.trace import Epoch


def available_mask(epoch: Epoch, t_expiry: int, check: SecondaryCheck, cfg: PhyMacConfig) -> np.ndarray:
    """Per-channel availability at a backoff expiry instant"""
    if check is SecondaryCheck.INSTANT_AT_EXPIRY or cfg.pifs_samples == 0:
        return epoch.bits[t_expiry] == 0
    window = epoch.bits[max(0, t_expiry - cfg.pifs_samples): t_expiry]
    if len(window) == 0:
        return epoch.bits[t_expiry] == 0
    return ~window.any(axis=0)


def _contiguous_run(available: np.ndarray, primary: int) -> Tuple[int, ...]:
    lo = hi = primary
    while lo > 0 and available[lo - 1]:
        lo -= 1
    while hi < len(available) - 1 and available[hi + 1]:
        hi += 1
    return tuple(range(lo, hi + 1))


def _aligned_block(available: np.ndarray, primary: int) -> Tuple[int, ...]:
    size = 1 << (len(available).bit_length() - 1)
    while size > 1:
        start = (primary // size) * size
        if start + size <= len(available) and available[start: start + size].all():
            return tuple(range(start, start + size))
        size //= 2
    return (primary,)


def choose_channels(
    kind: PolicyKind,
    available: Sequence[bool],
    primary: int,
    aligned: bool = False,
) -> Tuple[int, ...]:
    """Channel set a policy bonds given per-channel availability; always holds the primary"""
    mask = np.array(available, dtype=bool)
    mask[primary] = True
    if kind is PolicyKind.SINGLE_CHANNEL:
        return (primary,)
    if kind is PolicyKind.NON_CONTIGUOUS:
        return tuple(int(c) for c in np.flatnonzero(mask))
    if aligned:
        return _aligned_block(mask, primary)
    return _contiguous_run(mask, primary)


def select_channels(
    policy: BondingPolicy,
    epoch: Epoch,
    t_expiry: int,
    primary: int,
    cfg: PhyMacConfig,
) -> Tuple[int, ...]:
    if policy.kind is PolicyKind.SINGLE_CHANNEL:
        return (primary,)
    available = available_mask(epoch, t_expiry, policy.secondary_check, cfg)
    return choose_channels(policy.kind, available, primary, aligned=policy.aligned)
