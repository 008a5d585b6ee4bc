import numpy as np
import pytest

from chanbond.dcf import (
    available_mask,
    choose_channels,
    contention_window,
    derive_seed,
    draw_backoff,
    frame_duration,
    run_epoch,
)
from chanbond.errors import ConfigInfeasibleError, InvalidArgumentError
from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind, SecondaryCheck
from chanbond.models.synth import ModelKind
from chanbond.models.trace import Epoch
from chanbond.synth import synthetic_corpus

from .conftest import EPOCH_SAMPLES, make_epoch

SC = BondingPolicy(kind=PolicyKind.SINGLE_CHANNEL)
CO = BondingPolicy(kind=PolicyKind.CONTIGUOUS)
NC = BondingPolicy(kind=PolicyKind.NON_CONTIGUOUS)


# timing

def test_eight_channel_frame(phy):
    timing = frame_duration(8, phy)
    assert (timing.n_packets, timing.total_samples, timing.data_samples) == (64, 104, 84)


def test_single_channel_frame(phy):
    timing = frame_duration(1, phy)
    assert timing.n_packets == 45
    assert timing.total_samples == 491
    assert timing.total_samples * phy.slot_us == 4910


def test_frame_packets_never_exceed_aggregation_cap(phy):
    assert all(frame_duration(n, phy).n_packets <= phy.max_aggregation for n in range(1, 9))


def test_frame_that_cannot_fit_txop_is_infeasible():
    cfg = PhyMacConfig(rate_per_channel_bps=1e6)
    with pytest.raises(ConfigInfeasibleError):
        frame_duration(1, cfg)


def test_frame_needs_a_channel(phy):
    with pytest.raises(InvalidArgumentError):
        frame_duration(0, phy)


def test_contention_window_doubles_then_saturates(phy):
    assert [contention_window(s, phy) for s in range(8)] == [16, 32, 64, 128, 256, 512, 512, 512]


def test_contention_window_rejects_negative_stage(phy):
    with pytest.raises(InvalidArgumentError):
        contention_window(-1, phy)


def test_backoff_draws_stay_in_window(phy):
    rng = np.random.default_rng(0)
    draws = [draw_backoff(rng, 0, phy) for _ in range(2000)]
    assert min(draws) == 0
    assert max(draws) == 15


def test_derived_seed_is_stable_and_epoch_specific():
    assert derive_seed(42, 3) == derive_seed(42, 3)
    assert derive_seed(42, 3) != derive_seed(42, 4)
    assert derive_seed(42, 3) != derive_seed(43, 3)


# channel choice

MASK = [1, 1, 0, 1, 1, 1, 1, 1]


def test_contiguous_takes_run_around_primary():
    assert choose_channels(PolicyKind.CONTIGUOUS, MASK, 3) == (3, 4, 5, 6, 7)


def test_non_contiguous_takes_every_free_channel():
    assert choose_channels(PolicyKind.NON_CONTIGUOUS, MASK, 3) == (0, 1, 3, 4, 5, 6, 7)


def test_single_channel_takes_only_primary():
    assert choose_channels(PolicyKind.SINGLE_CHANNEL, MASK, 3) == (3,)


def test_primary_is_kept_even_when_marked_busy():
    assert choose_channels(PolicyKind.CONTIGUOUS, [0] * 8, 5) == (5,)


def test_aligned_contiguous_uses_power_of_two_blocks():
    assert choose_channels(PolicyKind.CONTIGUOUS, MASK, 3, aligned=True) == (3,)
    assert choose_channels(PolicyKind.CONTIGUOUS, MASK, 5, aligned=True) == (4, 5, 6, 7)
    assert choose_channels(PolicyKind.CONTIGUOUS, [1] * 8, 2, aligned=True) == tuple(range(8))


@pytest.mark.slow
def test_policy_channel_sets_nest():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        mask = rng.integers(0, 2, size=8).astype(bool)
        primary = int(rng.integers(0, 8))
        sc = set(choose_channels(PolicyKind.SINGLE_CHANNEL, mask, primary))
        co = set(choose_channels(PolicyKind.CONTIGUOUS, mask, primary))
        nc = set(choose_channels(PolicyKind.NON_CONTIGUOUS, mask, primary))
        assert sc == {primary}
        assert sc <= co <= nc


def test_pifs_window_sees_recent_activity(phy):
    bits = np.zeros((10, 8), dtype=np.uint8)
    bits[2, 1] = 1
    epoch = make_epoch(bits)
    assert not available_mask(epoch, 3, SecondaryCheck.PIFS_WINDOW, phy)[1]
    assert available_mask(epoch, 3, SecondaryCheck.INSTANT_AT_EXPIRY, phy)[1]


# state machine

def test_all_idle_bonding_oracle(idle_epoch, phy):
    for policy in (CO, NC):
        result = run_epoch(idle_epoch, 0, policy, phy, seed=1, fixed_backoff=0)
        assert result.n_frames == 93
        assert result.packets_sent == 5952
        assert result.throughput_bps == pytest.approx(714.24e6)
        assert (result.records[0].start, result.records[0].end) == (3, 107)
        assert result.records[0].channels == tuple(range(8))


def test_all_idle_single_channel_oracle(idle_epoch, phy):
    result = run_epoch(idle_epoch, 4, SC, phy, seed=1, fixed_backoff=0)
    assert result.n_frames == 20
    assert result.packets_sent == 900
    assert all(r.channels == (4,) for r in result.records)


def test_frames_never_overlap(busy_epochs, phy):
    result = run_epoch(busy_epochs[0], 2, NC, phy, seed=5)
    for before, after in zip(result.records, result.records[1:]):
        assert before.end <= after.start
    assert all(r.end <= EPOCH_SAMPLES for r in result.records)


def test_secondary_check_changes_first_frame(phy):
    bits = np.zeros((EPOCH_SAMPLES, 8), dtype=np.uint8)
    bits[2, 1] = 1
    epoch = make_epoch(bits)
    pifs = run_epoch(epoch, 0, CO, phy, seed=0, fixed_backoff=0)
    instant = run_epoch(
        epoch, 0, BondingPolicy(kind=PolicyKind.CONTIGUOUS, secondary_check=SecondaryCheck.INSTANT_AT_EXPIRY),
        phy, seed=0, fixed_backoff=0,
    )
    assert pifs.records[0].channels == (0,)
    assert instant.records[0].channels == tuple(range(8))
    nc = run_epoch(epoch, 0, NC, phy, seed=0, fixed_backoff=0)
    assert nc.records[0].channels == (0, 2, 3, 4, 5, 6, 7)


def test_runs_are_deterministic_per_seed(busy_epochs, phy):
    first = run_epoch(busy_epochs[1], 3, CO, phy, seed=11)
    second = run_epoch(busy_epochs[1], 3, CO, phy, seed=11)
    assert first.records == second.records
    assert first.throughput_bps == second.throughput_bps


def test_frames_start_on_idle_primary_with_available_secondaries(busy_epochs, phy):
    for epoch in busy_epochs[:3]:
        for kind in PolicyKind:
            for check in SecondaryCheck:
                for aligned in (False, True):
                    policy = BondingPolicy(kind=kind, secondary_check=check, aligned=aligned)
                    primary = epoch.epoch_id % epoch.n_channels
                    result = run_epoch(epoch, primary, policy, phy, seed=derive_seed(3, epoch.epoch_id))
                    for record in result.records:
                        assert primary in record.channels
                        assert not epoch.bits[record.start - phy.difs_samples: record.start + 1, primary].any()
                        available = available_mask(epoch, record.start, check, phy)
                        assert all(available[c] for c in record.channels if c != primary)


@pytest.mark.slow
def test_non_contiguous_matches_or_beats_contiguous_on_markov_corpus(phy):
    ratios = []
    wins = total = 0
    for k, occupancy in enumerate((0.05, 0.15, 0.3)):
        epochs = synthetic_corpus(ModelKind.MARKOV, 340, 8, EPOCH_SAMPLES, mean_occupancy=occupancy, seed=100 + k)
        for epoch in epochs:
            seed = derive_seed(21, epoch.epoch_id)
            for primary in range(epoch.n_channels):
                co = run_epoch(epoch, primary, CO, phy, seed=seed).throughput_bps
                nc = run_epoch(epoch, primary, NC, phy, seed=seed).throughput_bps
                total += 1
                wins += nc >= co
                if co > 0:
                    ratios.append(nc / co)
    assert total == 1020 * 8
    assert wins / total >= 0.95
    assert sum(ratios) / len(ratios) >= 1.0


def test_busy_primary_sends_nothing(phy):
    bits = np.zeros((EPOCH_SAMPLES, 8), dtype=np.uint8)
    bits[:, 6] = 1
    result = run_epoch(make_epoch(bits), 6, NC, phy, seed=0)
    assert result.n_frames == 0
    assert result.throughput_bps == 0.0


def test_difs_needs_three_idle_samples(phy):
    primary = np.tile([0, 0, 1], EPOCH_SAMPLES // 3 + 1)[:EPOCH_SAMPLES]
    bits = np.zeros((EPOCH_SAMPLES, 2), dtype=np.uint8)
    bits[:, 0] = primary
    assert run_epoch(make_epoch(bits), 0, SC, phy, seed=0).n_frames == 0


def test_backoff_freezes_while_primary_is_busy(phy):
    bits = np.zeros((EPOCH_SAMPLES, 1), dtype=np.uint8)
    bits[10:20, 0] = 1
    result = run_epoch(make_epoch(bits), 0, SC, phy, seed=0, fixed_backoff=10)
    # 7 slots counted before the busy period, 3 after the second DIFS
    assert result.records[0].start == 26


def test_frame_running_past_epoch_end_is_dropped(phy):
    epoch = make_epoch(np.zeros((100, 8)))
    assert run_epoch(epoch, 0, CO, phy, seed=0, fixed_backoff=0).n_frames == 0


def test_primary_outside_band_is_rejected(idle_epoch, phy):
    with pytest.raises(InvalidArgumentError):
        run_epoch(idle_epoch, 8, SC, phy, seed=0)


def test_slot_must_match_sample_period(phy):
    epoch = Epoch.from_bits(np.zeros((100, 2)), sample_period_ns=20_000)
    with pytest.raises(InvalidArgumentError):
        run_epoch(epoch, 0, SC, phy, seed=0)
