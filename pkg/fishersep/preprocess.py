"""Centering, PCA, component selection, whitening and sphere projection.

The pipeline turns a raw point cloud into the normalized form the separability
statistics are defined on: centered, rotated onto its principal axes, cut to the
components whose variance is within a factor C of the largest one, whitened and
finally projected onto the unit sphere.
"""

import logging
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg

from fishersep.errors import (
    ContractViolationError,
    DegenerateDataError,
    DegeneratePointError,
    InvalidInputError,
    NumericalError,
)
from fishersep.models import DataMatrix, PcaResult, PreprocessConfig, PreprocessedCloud

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-12  # relative to the largest eigenvalue
MIN_ROW_NORM = 1e-12


def as_data_matrix(x: npt.ArrayLike, min_points: int = 2) -> DataMatrix:
    """Validate and convert to an N×D float64 matrix."""
    try:
        values = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"data is not numeric: {exc}") from exc
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got {values.ndim} dimensions")
    n, d = values.shape
    if n < min_points:
        raise InvalidInputError(f"need at least {min_points} points, got {n}")
    if d < 1:
        raise InvalidInputError("matrix has no features")
    if not np.all(np.isfinite(values)):
        row = int(np.flatnonzero(~np.isfinite(values).all(axis=1))[0])
        raise InvalidInputError(f"non-finite value in row {row}")
    return values


def center(x: npt.ArrayLike) -> DataMatrix:
    x = as_data_matrix(x)
    return x - x.mean(axis=0)


def _orient(components: np.ndarray) -> np.ndarray:
    # the largest-magnitude loading of every component is made positive
    rows = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[rows, np.arange(components.shape[1])])
    signs[signs == 0] = 1.0
    return components * signs


def pca(x: npt.ArrayLike) -> PcaResult:
    """Principal components of already-centered data (covariance divisor N-1).

    Uses a symmetric eigen-decomposition of the D×D covariance when D <= N and a
    thin SVD of the data otherwise, in which case only N components are returned.
    """
    x = as_data_matrix(x)
    n, d = x.shape
    try:
        if d <= n:
            cov = (x.T @ x) / (n - 1)
            eigenvalues, components = scipy.linalg.eigh(cov)
            eigenvalues, components = eigenvalues[::-1], components[:, ::-1]
        else:
            _, singular, vt = scipy.linalg.svd(x, full_matrices=False)
            eigenvalues, components = singular**2 / (n - 1), vt.T
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError("eigen-solver failed", {"n_points": n, "n_features": d, "cause": exc}) from exc

    eigenvalues = np.array(eigenvalues, dtype=np.float64)
    top = max(float(eigenvalues[0]), 0.0)
    eigenvalues[eigenvalues < EIGENVALUE_FLOOR * top] = 0.0
    components = _orient(np.ascontiguousarray(components))
    return PcaResult(components=components, eigenvalues=eigenvalues, projections=x @ components)


def select_k(eigenvalues: npt.ArrayLike, c: float, min_components: int = 2) -> int:
    """Largest k with λ_1/λ_k < c, clamped to [min_components, #positive eigenvalues]."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    positive = lam[lam > 0]
    if positive.size == 0 or lam[0] <= 0:
        raise DegenerateDataError("all eigenvalues are zero; the data has no spread")
    if positive.size < min_components:
        raise DegenerateDataError(
            f"only {positive.size} positive eigenvalue(s), at least {min_components} components are required"
        )
    k = int(np.count_nonzero(lam[0] / positive < c))
    return max(k, min_components)


def whiten(p: PcaResult, k: int) -> np.ndarray:
    """Scale the first k projection columns to unit sample variance."""
    if not 1 <= k <= p.eigenvalues.size:
        raise ContractViolationError(f"k={k} outside 1..{p.eigenvalues.size}")
    columns = p.projections[:, :k]
    std = columns.std(axis=0, ddof=1)
    flat = np.flatnonzero(std <= np.finfo(np.float64).tiny)
    if flat.size:
        raise DegenerateDataError(f"principal component {int(flat[0]) + 1} has zero variance")
    return columns / std


def project_sphere(u: npt.ArrayLike) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    norms = np.linalg.norm(u, axis=1)
    short = np.flatnonzero(norms < MIN_ROW_NORM)
    if short.size:
        index = int(short[0])
        raise DegeneratePointError(index, float(norms[index]))
    return u / norms[:, None]


def preprocess(x: npt.ArrayLike, cfg: Optional[PreprocessConfig] = None) -> PreprocessedCloud:
    cfg = cfg or PreprocessConfig()
    result = pca(center(x))
    k = select_k(result.eigenvalues, cfg.condition_threshold, cfg.min_components)
    points = whiten(result, k)
    if cfg.project_to_sphere:
        points = project_sphere(points)
    logger.info(
        "retained %d of %d components (C=%g, lambda_1/lambda_k=%.3g)",
        k,
        result.eigenvalues.size,
        cfg.condition_threshold,
        result.eigenvalues[0] / result.eigenvalues[k - 1],
    )
    return PreprocessedCloud(
        points=points,
        k=k,
        retained_eigenvalues=result.eigenvalues[:k].copy(),
        on_sphere=cfg.project_to_sphere,
        spectrum=result.eigenvalues,
        condition_threshold=cfg.condition_threshold,
    )
