"""
Model Comparison
Replays each epoch against synthetic stand-ins and measures how far their throughput drifts
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import polars as pl
from tqdm import tqdm

from chanbond.analysis.correlation import best_primary_xi, classify_correlation
from chanbond.analysis.error import mean_relative_error
from chanbond.analysis.load import classify_load
from chanbond.analysis.sweep import sweep
from chanbond.dcf.timing import derive_seed
from chanbond.errors import InvalidArgumentError
from chanbond.models.analysis import CorrelationClass, LoadClass, RelativeErrorSummary
from chanbond.models.simulation import BondingPolicy, PhyMacConfig, PolicyKind
from chanbond.models.synth import (
    EpochModelError,
    FittedEpoch,
    ModelComparisonReport,
    ModelErrorRow,
    ModelKind,
)
from chanbond.models.trace import Epoch

from .fitting import fit_corpus
from .generator import synthesize_epoch

logger = logging.getLogger(__name__)

CONTIGUOUS = BondingPolicy(kind=PolicyKind.CONTIGUOUS)
# generator stream offsets so the two models never share draws
MODEL_STREAMS = {ModelKind.MARKOV: 1, ModelKind.IID: 2}


def contiguous_throughputs(epoch: Epoch, cfg: PhyMacConfig, seed: int) -> List[float]:
    report = sweep(epoch, [CONTIGUOUS], cfg, seed, keep_results=False)
    return report.throughput[PolicyKind.CONTIGUOUS]


def epoch_model_error(
    source: Epoch,
    synthetic: Epoch,
    cfg: PhyMacConfig,
    seed: int,
    reference: Optional[Sequence[float]] = None,
) -> Tuple[RelativeErrorSummary, float, float]:
    """MRE of the synthetic epoch's contiguous sweep against the source's, plus both xi values.

    `reference` holds the source's contiguous throughputs when already known.
    """
    if reference is None:
        reference = contiguous_throughputs(source, cfg, seed)
    model = contiguous_throughputs(synthetic, cfg, seed)
    summary = mean_relative_error(reference, model)
    return summary, best_primary_xi(source, reference).xi, best_primary_xi(synthetic, model).xi


def _aggregate(epochs: Sequence[EpochModelError]) -> List[ModelErrorRow]:
    frame = pl.DataFrame(
        [
            {
                "model": e.model.value,
                "load": e.load_class.value,
                "correlation": e.correlation_class.value,
                "mre": e.mre,
            }
            for e in epochs
        ],
        schema={"model": pl.Utf8, "load": pl.Utf8, "correlation": pl.Utf8, "mre": pl.Float64},
    )
    orders = {"load": [c.value for c in LoadClass], "correlation": [c.value for c in CorrelationClass]}
    rows: List[ModelErrorRow] = []
    for grouping, order in orders.items():
        stats = {
            (r["model"], r[grouping]): r
            for r in frame.group_by(["model", grouping])
            .agg(
                pl.len().alias("n_epochs"),
                pl.col("mre").mean().alias("mean_mre"),
                pl.col("mre").max().alias("max_mre"),
            )
            .iter_rows(named=True)
        }
        for kind in ModelKind:
            for group in order:
                cell = stats.get((kind.value, group))
                if cell is None:
                    continue
                rows.append(ModelErrorRow(
                    model=kind,
                    grouping=grouping,
                    group=group,
                    n_epochs=cell["n_epochs"],
                    mre=cell["mean_mre"],
                    max_mre=cell["max_mre"],
                ))
    return rows


def compare_epoch(
    source: Epoch,
    fitted: Dict[ModelKind, FittedEpoch],
    cfg: PhyMacConfig,
    seed: int,
) -> List[EpochModelError]:
    """Trace vs model outcome of one source epoch for every fitted model"""
    reference = contiguous_throughputs(source, cfg, seed)
    load_class = classify_load(source.mean_occupancy)
    errors = []
    for kind, fit in fitted.items():
        stream = derive_seed(derive_seed(seed, source.epoch_id), MODEL_STREAMS[kind])
        synthetic = synthesize_epoch(source, fit, stream)
        error, xi_source, xi_model = epoch_model_error(source, synthetic, cfg, seed, reference=reference)
        errors.append(EpochModelError(
            epoch_id=source.epoch_id,
            model=kind,
            load_class=load_class,
            correlation_class=classify_correlation(xi_source),
            xi_source=xi_source,
            xi_model=xi_model,
            mre=error.mre,
            n_excluded=error.n_excluded,
            fallback_channels=fit.fallback_channels,
        ))
    return errors


def model_comparison(
    epochs: Sequence[Epoch],
    cfg: PhyMacConfig,
    seed: int,
    fallback_iid: bool = True,
    per_corpus: bool = False,
    models: Sequence[ModelKind] = (ModelKind.MARKOV, ModelKind.IID),
    workers: int = 1,
    show_progress: bool = False,
) -> ModelComparisonReport:
    """Fit each model, generate a same-length epoch and compare contiguous-policy throughput.

    Per-epoch MREs are averaged with equal weight per epoch inside each
    (model, load class) and (model, correlation class) cell.
    """
    if not epochs:
        raise InvalidArgumentError("model_comparison needs at least one epoch")

    fits: Dict[ModelKind, List[FittedEpoch]] = {
        kind: fit_corpus(epochs, kind, per_corpus=per_corpus, fallback_iid=fallback_iid) for kind in models
    }
    tasks = [{kind: fits[kind][0 if per_corpus else i] for kind in models} for i in range(len(epochs))]
    work = partial(compare_epoch, cfg=cfg, seed=seed)
    progress = dict(total=len(epochs), desc="Comparing models", disable=not show_progress)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(tqdm(pool.map(work, epochs, tasks), **progress))
    else:
        chunks = [work(e, t) for e, t in tqdm(zip(epochs, tasks), **progress)]

    results = [error for chunk in chunks for error in chunk]
    fallback_epochs = {e.epoch_id for e in results if e.fallback_channels}
    table = _aggregate(results)
    logger.info(f"Compared {len(epochs)} epochs against {len(models)} model(s), {len(table)} table cells")
    return ModelComparisonReport(epochs=results, table=table, n_fallback_epochs=len(fallback_epochs))
