"""
DCF Timing
Backoff draws, per-epoch seeds and frame airtime sizing
"""
import math

import numpy as np

from chanbond.errors import ConfigInfeasibleError, InvalidArgumentError
from chanbond.models.simulation import FrameTiming, PhyMacConfig

_EPS = 1e-9


def derive_seed(global_seed: int, epoch_id: int) -> int:
    """Seed every run of an epoch starts its backoff stream from, whatever the primary or policy"""
    sequence = np.random.SeedSequence([int(global_seed), int(epoch_id)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def contention_window(stage: int, cfg: PhyMacConfig) -> int:
    """CW at a backoff stage; stages beyond m saturate"""
    if stage < 0:
        raise InvalidArgumentError(f"Backoff stage must be >= 0, got {stage}")
    return cfg.cw_min << min(stage, cfg.backoff_stages)


def draw_backoff(rng: np.random.Generator, stage: int, cfg: PhyMacConfig) -> int:
    """Uniform slot count in [0, CW - 1].

    One uniform variate per draw, scaled by CW, so a run at a higher stage
    never draws fewer slots than a run at a lower stage on the same stream.
    """
    return int(rng.random() * contention_window(stage, cfg))


def frame_duration(n_channels: int, cfg: PhyMacConfig) -> FrameTiming:
    """Aggregate as many packets as fit the TXOP at the bonded rate"""
    if n_channels < 1:
        raise InvalidArgumentError(f"A frame needs at least one channel, got {n_channels}")
    rate = n_channels * cfg.r20_bps
    budget_s = (cfg.txop_us - cfg.overhead_us) * 1e-6
    fitting = math.floor(max(budget_s, 0.0) * rate / cfg.packet_length_bits + _EPS)
    n_packets = max(1, min(cfg.max_aggregation, fitting))

    bits_per_sample = rate * cfg.slot_us * 1e-6
    data_samples = math.ceil(n_packets * cfg.packet_length_bits / bits_per_sample - _EPS)
    total_samples = cfg.samples(cfg.overhead_us) + data_samples
    if total_samples * cfg.slot_us > cfg.txop_us:
        raise ConfigInfeasibleError(
            f"A single {cfg.packet_length_bits}-bit packet on {n_channels} channel(s) needs "
            f"{total_samples * cfg.slot_us} us, more than the {cfg.txop_us} us TXOP"
        )
    return FrameTiming(n_packets=n_packets, total_samples=total_samples, data_samples=data_samples)
