import numpy as np
import pytest

from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind
from chanbond.models.trace import Epoch

EPOCH_SAMPLES = 10_000


def make_epoch(bits, epoch_id: int = 0) -> Epoch:
    return Epoch.from_bits(np.asarray(bits, dtype=np.uint8), epoch_id=epoch_id)


def markov_bits(rng: np.random.Generator, n: int, mean_busy: float, mean_idle: float) -> np.ndarray:
    """Plain per-sample loop, independent of the package's generator"""
    out = np.empty(n, dtype=np.uint8)
    state = int(rng.random() < mean_busy / (mean_busy + mean_idle))
    for t in range(n):
        out[t] = state
        leave = 1.0 / (mean_busy if state else mean_idle)
        if rng.random() < leave:
            state = 1 - state
    return out


@pytest.fixture
def phy() -> PhyMacConfig:
    return PhyMacConfig()


@pytest.fixture
def idle_epoch() -> Epoch:
    return make_epoch(np.zeros((EPOCH_SAMPLES, 8)))


@pytest.fixture
def policies():
    return [BondingPolicy(kind=k) for k in PolicyKind]


@pytest.fixture
def busy_epochs():
    """A handful of 8-channel epochs with bursty activity on every channel"""
    rng = np.random.default_rng(7)
    epochs = []
    for k in range(6):
        columns = [
            markov_bits(rng, EPOCH_SAMPLES, rng.uniform(10, 40), rng.uniform(60, 300)) for _ in range(8)
        ]
        epochs.append(make_epoch(np.column_stack(columns), epoch_id=k))
    return epochs
