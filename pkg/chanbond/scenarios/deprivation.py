"""
Bandwidth Deprivation
How much neighbour activity the bonding BSS overlapped, and whether its gain outweighs it
"""
from typing import Optional

from chanbond.models.analysis import DeprivationReport
from chanbond.models.simulation import EpochSimResult, PhyMacConfig
from chanbond.models.trace import Epoch


def bandwidth_deprivation(result: EpochSimResult, epoch: Epoch, cfg: PhyMacConfig) -> DeprivationReport:
    """Busy (sample, channel) cells under every frame, as MHz averaged over the epoch"""
    contributions = [
        int(epoch.bits[r.start: r.end, list(r.channels)].sum(dtype="int64")) for r in result.records
    ]
    sample_s = epoch.sample_period_ns * 1e-9
    omega_mhz = sum(contributions) * cfg.channel_bandwidth_mhz * sample_s / epoch.duration_s
    # each busy 20 MHz cell counts as a data frame sent at the per-channel rate
    omega_mbps = omega_mhz * (cfg.r20_bps / 1e6) / cfg.channel_bandwidth_mhz
    return DeprivationReport(omega_mhz=omega_mhz, omega_mbps=omega_mbps, contributions=contributions)


def zero_sum_ratio(
    gamma_policy: float,
    gamma_sc: float,
    omega_policy: float,
    omega_sc: float,
) -> Optional[float]:
    """Bonding gain over extra deprivation, all four means in one rate unit.

    Returns None when the deprivation difference is exactly zero.
    """
    denominator = omega_policy - omega_sc
    if denominator == 0:
        return None
    return (gamma_policy - gamma_sc) / denominator
