# Scenarios module
from .deprivation import bandwidth_deprivation, zero_sum_ratio
from .hidden import active_samples, apply_hidden_scenario, frame_lost, run_scenario
