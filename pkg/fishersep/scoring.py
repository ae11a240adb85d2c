"""Benchmark scoring: run every estimator over a battery and compare with the truth."""

import logging
import math
from typing import Mapping, Optional

from tqdm import tqdm

from fishersep.baselines import correlation_dimension
from fishersep.errors import ContractViolationError, FisherSepError
from fishersep.models import Battery, BenchmarkReport, BenchmarkRow, SyntheticSpec
from fishersep.separability import analyze, select_estimate
from fishersep.synthdata import generate

logger = logging.getLogger(__name__)

ESTIMATORS = ("FisherS", "CD")

BENCHMARK_COLUMNS = ["dataset", "cardinality", "N", "n", "FisherS", "retained_k", "CD"]


def mean_percentage_error(estimates: Mapping[str, float], truths: Mapping[str, float]) -> float:
    """(100 / M) · Σ |n̂ − n| / n over the M datasets."""
    if set(estimates) != set(truths):
        missing = sorted(set(truths) ^ set(estimates))
        raise ContractViolationError(f"estimates and truths cover different datasets: {missing}")
    if not truths:
        raise ContractViolationError("no datasets to score")
    for name, truth in truths.items():
        if not truth > 0:
            raise ContractViolationError(f"true dimension of {name!r} must be positive, got {truth}")
    total = sum(abs(estimates[name] - truth) / truth for name, truth in truths.items())
    return 100.0 * total / len(truths)


def score_dataset(
    spec: SyntheticSpec,
    battery: Battery,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> BenchmarkRow:
    row = BenchmarkRow(
        dataset=spec.label, cardinality=spec.cardinality, embed_dim=spec.embed_dim, intrinsic_dim=spec.intrinsic_dim
    )
    errors = []
    try:
        x = generate(spec)
    except FisherSepError as exc:
        row.error = f"generate: {exc}"
        return row

    try:
        analysis = analyze(x, battery.preprocess, battery.alphas, block_size, threads)
        row.retained_k = analysis.cloud.k
        row.fishers = select_estimate(analysis.profiles).n_hat
    except FisherSepError as exc:
        errors.append(f"FisherS: {exc}")
    try:
        row.cd = correlation_dimension(x, seed=spec.seed, block_size=block_size, threads=threads).dimension
    except FisherSepError as exc:
        errors.append(f"CD: {exc}")

    if errors:
        row.error = "; ".join(errors)
        logger.warning("%s: %s", spec.label, row.error)
    return row


def _finite_errors(rows: list[BenchmarkRow], attribute: str) -> Optional[float]:
    scored = {
        row.dataset: getattr(row, attribute)
        for row in rows
        if getattr(row, attribute) is not None and math.isfinite(getattr(row, attribute))
    }
    if not scored:
        return None
    truths = {row.dataset: float(row.intrinsic_dim) for row in rows if row.dataset in scored}
    return mean_percentage_error(scored, truths)


def run_battery(
    battery: Battery,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> BenchmarkReport:
    """Score FisherS and the correlation dimension on every dataset of the battery.

    A failing dataset keeps its row (with the error message) and the battery goes on.
    """
    names = [spec.label for spec in battery.datasets]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise ContractViolationError(f"dataset names must be unique, repeated: {duplicates}")

    rows = []
    for spec in tqdm(battery.datasets, desc="benchmark", unit="dataset", disable=not progress):
        row = score_dataset(spec, battery, block_size, threads)
        logger.info("%s: n=%d FisherS=%s CD=%s", row.dataset, row.intrinsic_dim, row.fishers, row.cd)
        rows.append(row)

    mean_pct_error = {}
    for estimator, attribute in zip(ESTIMATORS, ("fishers", "cd")):
        value = _finite_errors(rows, attribute)
        if value is not None:
            mean_pct_error[estimator] = value
    return BenchmarkReport(rows=rows, mean_pct_error=mean_pct_error)


def benchmark_table(report: BenchmarkReport) -> list[dict]:
    """Rows of the benchmark CSV, one dict per dataset keyed by BENCHMARK_COLUMNS."""
    return [
        {
            "dataset": row.dataset,
            "cardinality": row.cardinality,
            "N": row.embed_dim,
            "n": row.intrinsic_dim,
            "FisherS": row.fishers,
            "retained_k": row.retained_k,
            "CD": row.cd,
        }
        for row in report.rows
    ]
