"""Correlation-dimension baseline.

C(r) is the fraction of point pairs closer than r (strictly). The dimension is
the slope of log C(r) against log r over a window of radii where that relation
is closest to linear.

Radii are log-spaced between two quantiles of the pairwise distance
distribution, by default the 1st and 75th percentiles. Passing
``neighbors=(k1, k2)`` uses the quantiles k1/(N-1) and k2/(N-1) instead: the
radius at which a typical point has k neighbours. The
quantiles are estimated on a seeded subsample of at most ``max_sample`` points;
the correlation sums themselves always use every point.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist, pdist
from scipy.stats import linregress

from fishersep.errors import DegenerateDataError, InvalidInputError
from fishersep.models import CorrelationCurve
from fishersep.preprocess import as_data_matrix
from fishersep.separability import DEFAULT_BLOCK_SIZE, row_blocks

logger = logging.getLogger(__name__)

MIN_POINTS = 10
LINEARITY_TOLERANCE = 0.01


def pair_counts_below(
    x: npt.ArrayLike,
    radii: Sequence[float],
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """#{i < j : ||x_i - x_j|| < r} for every r, as int64."""
    x = as_data_matrix(x)
    radii = np.asarray(radii, dtype=np.float64)
    n = x.shape[0]
    blocks = row_blocks(n, block_size or DEFAULT_BLOCK_SIZE)
    partial = np.zeros((len(blocks), radii.size), dtype=np.int64)

    def fill(b: int) -> None:
        start, stop = blocks[b]
        dist = cdist(x[start:stop], x[start:])
        upper = np.triu(np.ones(dist.shape, dtype=bool), k=1)
        partial[b] = np.searchsorted(np.sort(dist[upper]), radii, side="left")

    threads = threads or 1
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(len(blocks))))
    else:
        for b in range(len(blocks)):
            fill(b)
    return partial.sum(axis=0)


def correlation_sums(
    x: npt.ArrayLike,
    radii: Sequence[float],
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    x = as_data_matrix(x)
    n = x.shape[0]
    return 2.0 * pair_counts_below(x, radii, block_size, threads) / (n * (n - 1))


def correlation_sum(x: npt.ArrayLike, r: float) -> float:
    return float(correlation_sums(x, [r])[0])


def _fit_window(log_r: np.ndarray, log_c: np.ndarray, min_window: int) -> tuple[int, int]:
    n = log_r.size
    windows = []
    for start in range(n - min_window + 1):
        for stop in range(start + min_window, n + 1):
            fit = np.polyfit(log_r[start:stop], log_c[start:stop], 1)
            rms = float(np.sqrt(np.mean((np.polyval(fit, log_r[start:stop]) - log_c[start:stop]) ** 2)))
            windows.append((start, stop, rms))
    best = min(rms for _, _, rms in windows)
    admissible = [w for w in windows if w[2] <= max(LINEARITY_TOLERANCE, 1.05 * best)]
    start, stop, _ = max(admissible, key=lambda w: (w[1] - w[0], -w[2]))
    return start, stop


def correlation_dimension(
    x: npt.ArrayLike,
    quantiles: tuple[float, float] = (0.01, 0.75),
    neighbors: Optional[tuple[int, int]] = None,
    n_radii: int = 12,
    min_window: int = 4,
    max_sample: int = 2000,
    seed: int = 0,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> CorrelationCurve:
    x = as_data_matrix(x)
    n = x.shape[0]
    if n < MIN_POINTS:
        raise InvalidInputError(f"correlation dimension needs at least {MIN_POINTS} points, got {n}")

    if neighbors is not None:
        quantiles = (min(neighbors[0] / (n - 1), 0.25), min(neighbors[1] / (n - 1), 0.5))
    sample = x
    if n > max_sample:
        rng = np.random.default_rng(seed)
        sample = x[np.sort(rng.choice(n, size=max_sample, replace=False))]
    distances = pdist(sample)
    r_lo, r_hi = np.quantile(distances, quantiles)
    if r_hi <= 0:
        raise DegenerateDataError("all points coincide; correlation dimension is undefined")
    if r_lo <= 0:
        r_lo = float(distances[distances > 0].min())
    if r_lo >= r_hi:
        raise DegenerateDataError(f"radius range collapsed ({r_lo:.3g} >= {r_hi:.3g})")

    radii = np.geomspace(r_lo, r_hi, n_radii)
    sums = correlation_sums(x, radii, block_size, threads)
    usable = np.flatnonzero(sums > 0)
    if usable.size < min_window:
        raise DegenerateDataError("too few radii with a nonzero correlation sum")
    radii, sums = radii[usable], sums[usable]

    log_r, log_c = np.log(radii), np.log(sums)
    start, stop = _fit_window(log_r, log_c, min_window)
    fit = linregress(log_r[start:stop], log_c[start:stop])
    logger.info("correlation dimension %.3f over radii %.3g..%.3g", fit.slope, radii[start], radii[stop - 1])
    return CorrelationCurve(
        radii=radii, corr_sums=sums, fit_range=(start, stop), slope=float(fit.slope), intercept=float(fit.intercept)
    )
