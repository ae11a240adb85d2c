"""Fisher-separability statistics and the effective dimension they imply.

A point x of a normalized cloud is Fisher-separable from y with parameter α
when (x, y) <= α (x, x). For every point we count the other points it is *not*
separable from, turn the counts into empirical unseparability probabilities
p_α^j = v_j / N and compare their mean with the value expected for points drawn
uniformly from the unit sphere of R^n,

    p_α(n) = (1 - α²)^((n-1)/2) / (α √(2πn)),

whose inverse in n is expressed with the Lambert W function.

The pairwise kernel works on row blocks of the Gram matrix, so memory stays
O(block_size · N); blocks can be processed by several threads and every block
owns a disjoint slice of the integer result.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
import scipy.special

from fishersep.errors import (
    ContractViolationError,
    DegeneratePointError,
    DomainError,
    FullySeparableError,
)
from fishersep.models import (
    AlphaGrid,
    DimensionEstimate,
    PreprocessConfig,
    PreprocessedCloud,
    SeparabilityAnalysis,
    SeparabilityProfile,
)
from fishersep.preprocess import preprocess
from fishersep.specfun import lambert_w0

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 512
AD_HOC_FACTOR = 0.8
_GRID_TOLERANCE = 1e-9


def _check_alpha(alpha: npt.ArrayLike) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(~np.isfinite(a)) or np.any(a <= 0.0) or np.any(a >= 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return a


def row_blocks(n: int, block_size: int) -> list[tuple[int, int]]:
    if block_size < 1:
        raise ContractViolationError(f"block size must be positive, got {block_size}")
    return [(start, min(start + block_size, n)) for start in range(0, n, block_size)]


def exceedance_counts(
    points: npt.ArrayLike,
    alphas: Sequence[float],
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """v[j, a] = #{i != j : (x_j, x_i) / (x_j, x_j) > alphas[a]}.

    Returns an N×len(alphas) int64 matrix.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    thresholds = _check_alpha(alphas).ravel()
    n = points.shape[0]
    block_size = block_size or DEFAULT_BLOCK_SIZE
    threads = threads or 1

    sq_norms = np.einsum("ij,ij->i", points, points)
    short = np.flatnonzero(sq_norms < np.finfo(np.float64).tiny)
    if short.size:
        raise DegeneratePointError(int(short[0]), float(math.sqrt(sq_norms[short[0]])))

    counts = np.zeros((n, thresholds.size), dtype=np.int64)

    def fill(bounds: tuple[int, int]) -> None:
        start, stop = bounds
        gram = points[start:stop] @ points.T
        gram /= sq_norms[start:stop, None]
        local = np.arange(stop - start)
        gram[local, start + local] = -np.inf
        for a, alpha in enumerate(thresholds):
            counts[start:stop, a] = np.count_nonzero(gram > alpha, axis=1)

    blocks = row_blocks(n, block_size)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, blocks))
    else:
        for bounds in blocks:
            fill(bounds)
    logger.debug("counted %d alphas over %d blocks with %d thread(s)", thresholds.size, len(blocks), threads)
    return counts


def _require_sphere(cloud: PreprocessedCloud, allow_off_sphere: bool) -> None:
    if not cloud.on_sphere and not allow_off_sphere:
        raise ContractViolationError("separability counts need a cloud projected onto the unit sphere")


def unseparability_counts(
    cloud: PreprocessedCloud,
    alpha: float,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
    allow_off_sphere: bool = False,
) -> np.ndarray:
    _require_sphere(cloud, allow_off_sphere)
    return exceedance_counts(cloud.points, [alpha], block_size, threads)[:, 0]


def _profile(alpha: float, counts: np.ndarray, with_dimension: bool) -> SeparabilityProfile:
    probs = counts / counts.shape[0]
    mean_prob = float(np.mean(probs))
    dimension = dimension_from_p(mean_prob, alpha) if with_dimension and mean_prob > 0 else None
    return SeparabilityProfile(alpha=float(alpha), point_probs=probs, mean_prob=mean_prob, dimension=dimension)


def point_unseparability(
    cloud: PreprocessedCloud,
    alpha: float,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
    allow_off_sphere: bool = False,
) -> SeparabilityProfile:
    """p_α^j = v_j / N for every point, and their mean. No dimension is attached."""
    counts = unseparability_counts(cloud, alpha, block_size, threads, allow_off_sphere)
    return _profile(alpha, counts, with_dimension=False)


def theoretical_p_alpha(n: npt.ArrayLike, alpha: npt.ArrayLike):
    """Unseparability probability for the uniform distribution on the sphere of R^n."""
    a = _check_alpha(alpha)
    dims = np.asarray(n, dtype=np.float64)
    if np.any(dims < 1):
        raise DomainError(f"dimension must be >= 1, got {n!r}")
    p = np.power(1.0 - a * a, (dims - 1.0) / 2.0) / (a * np.sqrt(2.0 * np.pi * dims))
    return float(p) if np.ndim(p) == 0 else p


def sphere_p_alpha_exact(n: npt.ArrayLike, alpha: npt.ArrayLike):
    """P[(x, y) > α] for x, y independent and uniform on the sphere of R^n."""
    a = _check_alpha(alpha)
    dims = np.asarray(n, dtype=np.float64)
    if np.any(dims < 2):
        raise DomainError(f"dimension must be >= 2, got {n!r}")
    p = 0.5 * scipy.special.betainc((dims - 1.0) / 2.0, 0.5, 1.0 - a * a)
    return float(p) if np.ndim(p) == 0 else p


def dimension_from_p(p_bar: float, alpha: float) -> float:
    """Invert theoretical_p_alpha in n for a given mean unseparability probability."""
    _check_alpha(alpha)
    if p_bar > 1.0:
        raise ContractViolationError(f"mean unseparability probability {p_bar} exceeds 1")
    if not p_bar > 0.0:
        raise FullySeparableError(f"every point is separable at alpha={alpha}; dimension above measurable range")
    a2 = alpha * alpha
    log_term = -math.log1p(-a2)
    argument = log_term / (2.0 * math.pi * p_bar * p_bar * a2 * (1.0 - a2))
    return lambert_w0(argument).w / log_term


def alpha_sweep(
    cloud: PreprocessedCloud,
    grid: Optional[AlphaGrid] = None,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
    allow_off_sphere: bool = False,
) -> list[SeparabilityProfile]:
    """One profile per grid α, all computed from a single pass over the point pairs."""
    grid = grid or AlphaGrid()
    _require_sphere(cloud, allow_off_sphere)
    counts = exceedance_counts(cloud.points, grid.values, block_size, threads)
    return [_profile(alpha, counts[:, a], with_dimension=True) for a, alpha in enumerate(grid.values)]


def select_estimate(profiles: list[SeparabilityProfile]) -> DimensionEstimate:
    """Ad-hoc point estimate: n_α at the largest grid α <= 0.8·α_max.

    α_max is the largest α with a nonzero mean unseparability probability.
    """
    measurable = [p for p in profiles if p.mean_prob > 0]
    if not measurable:
        raise FullySeparableError("mean unseparability probability is zero for every alpha")
    alpha_max = max(p.alpha for p in measurable)
    target = AD_HOC_FACTOR * alpha_max
    candidates = [p for p in measurable if p.alpha <= target + _GRID_TOLERANCE]
    fallback = not candidates
    if fallback:
        chosen = min(measurable, key=lambda p: p.alpha)
        logger.warning(
            "no grid alpha <= %.4g has a nonzero mean probability; falling back to alpha=%.4g", target, chosen.alpha
        )
    else:
        chosen = max(candidates, key=lambda p: p.alpha)
    n_hat = chosen.dimension if chosen.dimension is not None else dimension_from_p(chosen.mean_prob, chosen.alpha)
    logger.info("alpha_max=%.4g alpha_used=%.4g n_hat=%.4f", alpha_max, chosen.alpha, n_hat)
    return DimensionEstimate(
        n_hat=n_hat, alpha_used=chosen.alpha, alpha_max=alpha_max, profiles=list(profiles), fallback=fallback
    )


def analyze(
    x: npt.ArrayLike,
    cfg: Optional[PreprocessConfig] = None,
    grid: Optional[AlphaGrid] = None,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> SeparabilityAnalysis:
    cfg = cfg or PreprocessConfig()
    cloud = preprocess(x, cfg)
    profiles = alpha_sweep(cloud, grid, block_size, threads, allow_off_sphere=not cfg.project_to_sphere)
    return SeparabilityAnalysis(cloud=cloud, profiles=profiles)


def estimate_dimension(
    x: npt.ArrayLike,
    cfg: Optional[PreprocessConfig] = None,
    grid: Optional[AlphaGrid] = None,
    block_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> DimensionEstimate:
    return select_estimate(analyze(x, cfg, grid, block_size, threads).profiles)
