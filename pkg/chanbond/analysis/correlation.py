"""
Inter-Channel Correlation
Pearson correlation of occupancy series and the best-primary correlation xi
"""
from typing import Sequence, Union

import numpy as np

from chanbond.errors import InvalidArgumentError
from chanbond.models.analysis import CorrelationClass, CorrelationReport, SweepReport
from chanbond.models.simulation import PolicyKind
from chanbond.models.trace import Epoch

# class edges; values in the gaps between classes stay unclassified
XI_LOW_MAX = 0.1
XI_MEDIUM_MIN = 0.2
XI_MEDIUM_MAX = 0.4
XI_HIGH_MIN = 0.5


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Sample Pearson coefficient; 0.0 when either series is constant"""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidArgumentError("pearson expects two 1-D series")
    if len(x) != len(y):
        raise InvalidArgumentError(f"Series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise InvalidArgumentError("pearson needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(np.sum(dx * dy)) / float(np.sqrt(sxx * syy))
    return min(1.0, max(-1.0, r))


def classify_correlation(xi: float) -> CorrelationClass:
    if xi <= XI_LOW_MAX:
        return CorrelationClass.LOW
    if XI_MEDIUM_MIN <= xi < XI_MEDIUM_MAX:
        return CorrelationClass.MEDIUM
    if xi >= XI_HIGH_MIN:
        return CorrelationClass.HIGH
    return CorrelationClass.UNCLASSIFIED


def argmax_primary(throughputs: Sequence[float]) -> int:
    """Best primary, lowest index on ties"""
    if len(throughputs) == 0:
        raise InvalidArgumentError("No throughputs to pick a best primary from")
    return int(np.argmax(np.asarray(throughputs, dtype=np.float64)))


def best_primary_xi(
    epoch: Epoch,
    sweep: Union[SweepReport, Sequence[float]],
    reference: PolicyKind = PolicyKind.CONTIGUOUS,
) -> CorrelationReport:
    """Mean correlation between the best primary and every other channel of the band.

    `sweep` is either a SweepReport (the reference policy's throughputs are
    used) or the per-primary throughputs directly.
    """
    if isinstance(sweep, SweepReport):
        if reference not in sweep.throughput:
            raise InvalidArgumentError(f"Sweep has no '{reference.value}' runs to pick p* from")
        throughputs = sweep.throughput[reference]
    else:
        throughputs = list(sweep)
    if len(throughputs) != epoch.n_channels:
        raise InvalidArgumentError(
            f"Expected {epoch.n_channels} per-primary throughputs, got {len(throughputs)}"
        )
    best = argmax_primary(throughputs)
    constant = [
        c for c in range(epoch.n_channels) if epoch.bits[:, c].min() == epoch.bits[:, c].max()
    ]
    rho = [pearson(epoch.bits[:, best], epoch.bits[:, c]) for c in range(epoch.n_channels) if c != best]
    xi = float(np.mean(rho)) if rho else 0.0
    return CorrelationReport(
        best_primary=best,
        xi=xi,
        rho=rho,
        correlation_class=classify_correlation(xi),
        constant_channels=constant,
        reference_policy=reference,
    )
