import numpy as np
import pytest

from chanbond.analysis.correlation import classify_correlation
from chanbond.errors import DegenerateFitError, InvalidArgumentError
from chanbond.models.analysis import CorrelationClass
from chanbond.models.synth import IidChannelParams, MarkovChannelParams, ModelKind
from chanbond.synth import (
    compare_epoch,
    epoch_model_error,
    fit_corpus,
    fit_epoch,
    fit_iid,
    fit_markov,
    generate_channels,
    generate_iid,
    generate_markov,
    model_comparison,
    perfectly_correlated_epochs,
    run_lengths,
    synthesize_epoch,
    synthetic_corpus,
)
from chanbond.utils.json_serializer import read_channel_models, serialize_fitted_epoch, write_json

from .conftest import make_epoch


# fitting

def test_alternating_series_has_unit_holding_times():
    params = fit_markov([0, 1] * 50)
    assert params.mean_busy_duration == 1.0
    assert params.mean_idle_duration == 1.0


def test_markov_fit_counts_boundary_runs():
    params = fit_markov([0, 0, 1, 1, 1, 0, 0, 0, 1])
    assert params.mean_idle_duration == pytest.approx(2.5)
    assert params.mean_busy_duration == pytest.approx(2.0)


def test_run_lengths():
    busy, idle = run_lengths([1, 1, 0, 1])
    assert busy.tolist() == [2, 1]
    assert idle.tolist() == [1]


@pytest.mark.parametrize("value", [0, 1])
def test_constant_series_cannot_be_fitted(value):
    with pytest.raises(DegenerateFitError) as exc:
        fit_markov([value] * 20, channel=4)
    assert exc.value.value == value
    assert exc.value.channel == 4


def test_markov_fit_rejects_non_binary_series():
    with pytest.raises(InvalidArgumentError):
        fit_markov([0, 2, 1])


def test_iid_fit_is_the_busy_fraction():
    assert fit_iid([0, 1, 1, 0]).occupancy_probability == 0.5


def test_constant_channel_falls_back_to_iid():
    bits = np.tile([[0, 1], [1, 0], [1, 0], [0, 1]], (25, 1))
    bits = np.column_stack([bits, np.zeros(100)])
    fitted = fit_epoch(make_epoch(bits, epoch_id=6), ModelKind.MARKOV)
    assert fitted.epoch_id == 6
    assert fitted.fallback_channels == [2]
    assert isinstance(fitted.channels[2], IidChannelParams)
    assert fitted.channels[2].occupancy_probability == 0.0
    assert isinstance(fitted.channels[0], MarkovChannelParams)


def test_constant_channel_without_fallback_fails():
    bits = np.column_stack([np.tile([0, 1], 50), np.ones(100)])
    with pytest.raises(DegenerateFitError):
        fit_epoch(make_epoch(bits), ModelKind.MARKOV, fallback_iid=False)


def test_corpus_fit_pools_every_epoch():
    # each epoch alone is constant on channel 0, together they alternate
    first = make_epoch(np.column_stack([np.zeros(10), np.tile([0, 1], 5)]), epoch_id=0)
    second = make_epoch(np.column_stack([np.ones(10), np.tile([0, 1], 5)]), epoch_id=1)
    (fitted,) = fit_corpus([first, second], ModelKind.MARKOV, per_corpus=True, fallback_iid=False)
    assert fitted.epoch_id is None
    assert fitted.channels[0].mean_idle_duration == 10.0
    assert fitted.channels[0].mean_busy_duration == 10.0


def test_per_epoch_corpus_fit_keeps_epoch_ids(busy_epochs):
    fitted = fit_corpus(busy_epochs, ModelKind.IID)
    assert [f.epoch_id for f in fitted] == [e.epoch_id for e in busy_epochs]


# generation

@pytest.mark.slow
def test_markov_trace_reaches_stationary_occupancy():
    params = MarkovChannelParams(mean_busy_duration=10.0, mean_idle_duration=10.0)
    trace = generate_markov([params], 1_000_000, seed=0)
    assert float(trace.bits.mean()) == pytest.approx(0.5, abs=0.02)
    refit = fit_markov(trace.bits[:, 0])
    assert refit.mean_busy_duration == pytest.approx(10.0, rel=0.05)
    assert refit.mean_idle_duration == pytest.approx(10.0, rel=0.05)


def test_generation_is_deterministic_per_seed():
    params = [MarkovChannelParams(mean_busy_duration=5.0, mean_idle_duration=30.0)] * 3
    first = generate_markov(params, 5000, seed=12)
    assert np.array_equal(first.bits, generate_markov(params, 5000, seed=12).bits)
    assert not np.array_equal(first.bits, generate_markov(params, 5000, seed=13).bits)


def test_iid_extremes():
    trace = generate_iid([0.0, 1.0], 1000, seed=0)
    assert not trace.bits[:, 0].any()
    assert trace.bits[:, 1].all()


@pytest.mark.slow
def test_iid_mean_matches_probability():
    trace = generate_iid([0.3], 1_000_000, seed=1)
    assert float(trace.bits.mean()) == pytest.approx(0.3, abs=0.002)


def test_generation_needs_a_model():
    with pytest.raises(InvalidArgumentError):
        generate_channels([], 100, seed=0)


def test_synthesized_epoch_mirrors_source_shape(busy_epochs):
    source = busy_epochs[2]
    synthetic = synthesize_epoch(source, fit_epoch(source, ModelKind.MARKOV), seed=1)
    assert synthetic.bits.shape == source.bits.shape
    assert synthetic.epoch_id == source.epoch_id
    assert synthetic.channel_labels == source.channel_labels


def test_synthetic_corpus_centres_on_requested_occupancy():
    epochs = synthetic_corpus(ModelKind.IID, 20, 8, 2000, mean_occupancy=0.15, seed=3)
    assert len(epochs) == 20
    assert float(np.mean([e.mean_occupancy for e in epochs])) == pytest.approx(0.15, abs=0.03)
    again = synthetic_corpus(ModelKind.IID, 20, 8, 2000, mean_occupancy=0.15, seed=3)
    assert all(np.array_equal(a.bits, b.bits) for a, b in zip(epochs, again))


def test_synthetic_corpus_rejects_out_of_range_occupancy():
    with pytest.raises(InvalidArgumentError):
        synthetic_corpus(ModelKind.MARKOV, 1, 8, 100, mean_occupancy=1.0, seed=0)


def test_fitted_params_file_feeds_generation(tmp_path, busy_epochs):
    fitted = fit_epoch(busy_epochs[0], ModelKind.MARKOV)
    path = write_json(tmp_path / "params.json", [serialize_fitted_epoch(fitted)])
    models = read_channel_models(path)
    assert len(models) == 8
    assert models[0].mean_busy_duration == pytest.approx(fitted.channels[0].mean_busy_duration)


def test_params_file_with_config_header_feeds_generation(tmp_path, busy_epochs):
    fitted = fit_epoch(busy_epochs[0], ModelKind.IID)
    path = write_json(tmp_path / "params.json", {"config": {"seed": 1}, "fits": [serialize_fitted_epoch(fitted)]})
    models = read_channel_models(path)
    assert [m.occupancy_probability for m in models] == pytest.approx(
        [c.occupancy_probability for c in fitted.channels]
    )


# comparison

def test_epoch_compared_with_itself_has_no_error(busy_epochs, phy):
    summary, xi_source, xi_model = epoch_model_error(busy_epochs[0], busy_epochs[0], phy, seed=5)
    assert summary.mre == 0.0
    assert xi_source == xi_model


def test_compare_epoch_classifies_by_source_correlation(busy_epochs, phy):
    source = busy_epochs[1]
    fitted = {kind: fit_epoch(source, kind) for kind in ModelKind}
    errors = compare_epoch(source, fitted, phy, seed=4)
    assert [e.model for e in errors] == list(fitted)
    _, xi_source, _ = epoch_model_error(source, source, phy, seed=4)
    for error in errors:
        assert error.epoch_id == source.epoch_id
        assert error.xi_source == pytest.approx(xi_source)
        assert error.correlation_class is classify_correlation(error.xi_source)


@pytest.mark.slow
def test_models_lose_inter_channel_correlation(phy):
    params = MarkovChannelParams(mean_busy_duration=20.0, mean_idle_duration=180.0)
    epochs = perfectly_correlated_epochs(params, n_epochs=500, n_channels=8, epoch_samples=10_000, seed=0)
    report = model_comparison(epochs, phy, seed=0)
    assert len(report.epochs) == 1000
    for error in report.epochs:
        assert error.xi_source == pytest.approx(1.0)
        assert error.correlation_class is CorrelationClass.HIGH
    for kind in ModelKind:
        xis = [abs(e.xi_model) for e in report.epochs if e.model is kind]
        assert len(xis) == 500
        assert sum(xis) / len(xis) <= 0.05, kind
    errors = [e.mre for e in report.epochs if e.mre is not None]
    assert errors and sum(errors) / len(errors) > 0
    groups = {(row.model, row.grouping, row.group) for row in report.table}
    assert (ModelKind.MARKOV, "correlation", "high") in groups
    assert (ModelKind.IID, "correlation", "high") in groups


def test_model_comparison_needs_epochs(phy):
    with pytest.raises(InvalidArgumentError):
        model_comparison([], phy, seed=0)
