"""Seeded generators for the benchmark datasets.

Randomness comes from numpy's PCG64 generator. Every generator call derives its
own stream from ``SeedSequence([seed, tag])`` where ``tag`` is the CRC32 of a
call-site name, so e.g. the noise added to a dataset never reuses the bits that
placed its points.

Curve
    For t ~ U[0, 1] and j = 0 .. m-1 with m = min(D, 13)::

        x_j(t) = cos(π (j + 1) t) / (j + 1)²

    zero-padded to D. The curve is open, smooth, and its coordinate variances
    fall off as (j + 1)^-4.
"""

import logging
import math
import zlib

import numpy as np
import numpy.typing as npt
from scipy.stats import ortho_group

from fishersep.errors import SpecError
from fishersep.models import Battery, DataMatrix, ManifoldKind, SyntheticSpec, minimal_embedding

logger = logging.getLogger(__name__)

CURVE_COORDINATES = 13


def stream(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(tag.encode())]))


def _check(spec: SyntheticSpec, kind: ManifoldKind) -> None:
    if spec.kind is not kind:
        raise SpecError(f"expected a {kind.value} spec, got {spec.kind.value}")
    needed = minimal_embedding(kind, spec.intrinsic_dim)
    if spec.embed_dim < needed:
        raise SpecError(f"{kind.value} needs embedding dimension >= {needed}, got {spec.embed_dim}")


def _embed(points: np.ndarray, spec: SyntheticSpec, tag: str) -> DataMatrix:
    padded = np.zeros((points.shape[0], spec.embed_dim))
    padded[:, : points.shape[1]] = points
    if spec.rotation and spec.embed_dim > 1:
        padded = padded @ random_rotation(spec.embed_dim, stream(spec.seed, tag + "/rotation")).T
    return padded


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    if dim == 1:
        return np.ones((1, 1))
    return ortho_group.rvs(dim, random_state=rng)


def _unit_directions(rng: np.random.Generator, n_points: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n_points, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_sphere(spec: SyntheticSpec) -> DataMatrix:
    """Uniform points on S^n ⊂ R^(n+1) (normalized Gaussian draws)."""
    _check(spec, ManifoldKind.sphere)
    rng = stream(spec.seed, "sphere")
    return _embed(_unit_directions(rng, spec.cardinality, spec.intrinsic_dim + 1), spec, "sphere")


def sample_cube(spec: SyntheticSpec) -> DataMatrix:
    _check(spec, ManifoldKind.cube)
    rng = stream(spec.seed, "cube")
    return _embed(rng.uniform(0.0, 1.0, size=(spec.cardinality, spec.intrinsic_dim)), spec, "cube")


def curve_points(t: npt.ArrayLike, n_coordinates: int) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    freq = np.arange(1, n_coordinates + 1, dtype=np.float64)
    return np.cos(np.pi * np.outer(t, freq)) / freq**2


def sample_curve(spec: SyntheticSpec) -> DataMatrix:
    _check(spec, ManifoldKind.curve)
    rng = stream(spec.seed, "curve")
    t = rng.uniform(0.0, 1.0, size=spec.cardinality)
    return _embed(curve_points(t, min(spec.embed_dim, CURVE_COORDINATES)), spec, "curve")


def sample_ball(rng: np.random.Generator, n_points: int, dim: int, radius: float) -> np.ndarray:
    """Uniform in the volume of a ball centered at the origin."""
    directions = _unit_directions(rng, n_points, dim)
    radii = radius * rng.uniform(0.0, 1.0, size=n_points) ** (1.0 / dim)
    return directions * radii[:, None]


def sample_clustered(spec: SyntheticSpec) -> DataMatrix:
    """Uniform n-cube background mixed with uniform n-balls around random centers."""
    _check(spec, ManifoldKind.clustered)
    n, total = spec.intrinsic_dim, spec.cardinality
    rng = stream(spec.seed, "clustered")
    n_background = math.ceil((1.0 - spec.cluster_fraction) * total)
    background = rng.uniform(0.0, 1.0, size=(n_background, n))
    centers = rng.uniform(0.0, 1.0, size=(spec.cluster_count, n))
    sizes = np.full(spec.cluster_count, (total - n_background) // spec.cluster_count)
    sizes[: (total - n_background) % spec.cluster_count] += 1
    clusters = [center + sample_ball(rng, int(size), n, spec.cluster_radius) for center, size in zip(centers, sizes)]
    return _embed(np.vstack([background, *clusters]), spec, "clustered")


def add_noise(x: npt.ArrayLike, sigma: float, seed: int) -> DataMatrix:
    """Add i.i.d. N(0, sigma²) to every entry."""
    x = np.asarray(x, dtype=np.float64)
    if sigma < 0:
        raise SpecError(f"noise standard deviation must be >= 0, got {sigma}")
    if sigma == 0:
        return x.copy()
    return x + stream(seed, "noise").normal(0.0, sigma, size=x.shape)


_SAMPLERS = {
    ManifoldKind.sphere: sample_sphere,
    ManifoldKind.cube: sample_cube,
    ManifoldKind.curve: sample_curve,
    ManifoldKind.clustered: sample_clustered,
}


def generate(spec: SyntheticSpec) -> DataMatrix:
    """Sample the clean dataset of a spec, then add its noise."""
    clean = _SAMPLERS[spec.kind](spec)
    logger.debug("generated %s: %d x %d", spec.label, *clean.shape)
    return add_noise(clean, spec.noise_sigma, spec.seed)


def default_battery(cardinality: int = 2500, noise_sigma: float = 0.05) -> Battery:
    """Spheres, hypercubes and a curve in the regimes of the classic benchmark library."""
    common = {"cardinality": cardinality, "noise_sigma": noise_sigma}
    datasets = [
        SyntheticSpec(kind=ManifoldKind.sphere, intrinsic_dim=n, embed_dim=n + 1, seed=100 + n, **common)
        for n in (2, 5, 10, 20)
    ]
    for n in (10, 17, 20, 24, 70):
        embed = n if n == 20 else n + 1
        datasets.append(
            SyntheticSpec(kind=ManifoldKind.cube, intrinsic_dim=n, embed_dim=embed, seed=200 + n, **common)
        )
    datasets.append(SyntheticSpec(kind=ManifoldKind.curve, intrinsic_dim=1, embed_dim=13, seed=301, **common))
    return Battery(datasets=datasets)
