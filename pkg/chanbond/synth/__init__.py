# Synthetic occupancy models
from .comparison import compare_epoch, epoch_model_error, model_comparison
from .fitting import fit_corpus, fit_epoch
from .generator import (
    epochs_from_trace,
    generate_channels,
    generate_iid,
    generate_markov,
    perfectly_correlated_epochs,
    synthesize_epoch,
    synthetic_corpus,
)
from .iid import fit_iid
from .markov import fit_markov, run_lengths
