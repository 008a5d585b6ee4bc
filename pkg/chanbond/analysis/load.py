"""Occupancy regimes used to group every result."""
from chanbond.models.analysis import LoadClass

LOW_LOAD_MAX = 0.1
MEDIUM_LOAD_MAX = 0.2

LOAD_ORDER = (LoadClass.LOW, LoadClass.MEDIUM, LoadClass.HIGH)


def classify_load(mean_occupancy: float) -> LoadClass:
    if mean_occupancy <= LOW_LOAD_MAX:
        return LoadClass.LOW
    if mean_occupancy <= MEDIUM_LOAD_MAX:
        return LoadClass.MEDIUM
    return LoadClass.HIGH
