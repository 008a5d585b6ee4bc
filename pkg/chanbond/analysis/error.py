"""
Model Error
Mean relative error between trace-driven and model-driven throughput
"""
from typing import Sequence

from chanbond.errors import InvalidArgumentError
from chanbond.models.analysis import RelativeErrorSummary


def mean_relative_error(reference: Sequence[float], model: Sequence[float]) -> RelativeErrorSummary:
    """Mean of |model_i - ref_i| / ref_i; pairs with a zero reference are excluded and tallied"""
    if len(reference) != len(model):
        raise InvalidArgumentError(f"Series lengths differ: {len(reference)} vs {len(model)}")
    errors = []
    excluded = 0
    for ref, mod in zip(reference, model):
        if ref == 0:
            excluded += 1
            continue
        errors.append(abs(mod - ref) / ref)
    mre = sum(errors) / len(errors) if errors else None
    return RelativeErrorSummary(mre=mre, n_pairs=len(errors), n_excluded=excluded)
