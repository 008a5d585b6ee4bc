# DCF module
from .channels import available_mask, choose_channels, select_channels
from .state_machine import run_epoch, walk_epoch
from .timing import contention_window, derive_seed, draw_backoff, frame_duration
