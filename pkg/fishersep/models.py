"""Domain types for the separability analysis."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, computed_field, field_validator, model_validator

# A validated N×D float64 array, rows are points (see preprocess.as_data_matrix).
DataMatrix = npt.NDArray[np.float64]


class ManifoldKind(str, Enum):
    sphere = "sphere"
    cube = "cube"
    curve = "curve"
    clustered = "clustered"


class PointsIn(str, Enum):
    rows = "rows"
    columns = "columns"


class Delimiter(str, Enum):
    comma = "comma"
    tab = "tab"

    @property
    def char(self) -> str:
        return "," if self is Delimiter.comma else "\t"


# ── Configuration ────────────────────────────────────────────


class PreprocessConfig(BaseModel):
    """Knobs of the centering / PCA / whitening / sphere pipeline."""

    condition_threshold: float = Field(default=10.0, gt=1.0)
    project_to_sphere: bool = True
    min_components: int = Field(default=2, ge=1)


def alpha_range(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive decimal grid lo, lo+step, ..., hi (rounded to 10 places)."""
    if step <= 0:
        raise ValueError("alpha step must be positive")
    count = int(round((hi - lo) / step)) + 1
    values = [round(lo + i * step, 10) for i in range(count)]
    return [v for v in values if v <= hi + 1e-12]


class AlphaGrid(BaseModel):
    """Strictly increasing separability thresholds in (0, 1)."""

    values: list[float] = Field(default_factory=lambda: alpha_range(0.6, 0.98, 0.02))

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("alpha grid is empty")
        if any(not 0.0 < a < 1.0 for a in values):
            raise ValueError("every alpha must lie in (0, 1)")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("alpha grid must be strictly increasing")
        return values

    @classmethod
    def from_range(cls, lo: float, hi: float, step: float) -> "AlphaGrid":
        return cls(values=alpha_range(lo, hi, step))

    @classmethod
    def parse(cls, text: str) -> "AlphaGrid":
        """Parse the CLI form ``lo:hi:step``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        return cls.from_range(lo, hi, step)


def minimal_embedding(kind: ManifoldKind, intrinsic_dim: int) -> int:
    if kind is ManifoldKind.sphere:
        return intrinsic_dim + 1
    if kind is ManifoldKind.curve:
        return 3
    return intrinsic_dim


class SyntheticSpec(BaseModel):
    """Declarative recipe for a benchmark dataset."""

    name: Optional[str] = None
    kind: ManifoldKind
    intrinsic_dim: int = Field(ge=1)
    embed_dim: int = Field(ge=1)
    cardinality: int = Field(default=2500, ge=2)
    noise_sigma: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    # clustered only
    cluster_count: int = Field(default=10, ge=1)
    cluster_radius: float = Field(default=0.1, gt=0.0)
    cluster_fraction: float = Field(default=0.5, ge=0.0, le=1.0)

    rotation: bool = False

    @model_validator(mode="after")
    def _check_embedding(self) -> "SyntheticSpec":
        if self.kind is ManifoldKind.curve and self.intrinsic_dim != 1:
            raise ValueError("a curve has intrinsic dimension 1")
        needed = minimal_embedding(self.kind, self.intrinsic_dim)
        if self.embed_dim < needed:
            raise ValueError(
                f"{self.kind.value} of dimension {self.intrinsic_dim} needs an embedding dimension >= {needed}, "
                f"got {self.embed_dim}"
            )
        return self

    @property
    def label(self) -> str:
        return self.name or f"{self.kind.value}-{self.intrinsic_dim}"


def _benchmark_alphas() -> AlphaGrid:
    return AlphaGrid.from_range(0.2, 0.98, 0.02)


class Battery(BaseModel):
    """A list of synthetic datasets scored by every estimator."""

    datasets: list[SyntheticSpec]
    alphas: AlphaGrid = Field(default_factory=_benchmark_alphas)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)

    @field_validator("datasets")
    @classmethod
    def _non_empty(cls, datasets: list[SyntheticSpec]) -> list[SyntheticSpec]:
        if not datasets:
            raise ValueError("benchmark battery is empty")
        return datasets


class MatrixFile(BaseModel):
    path: str
    delimiter: Delimiter = Delimiter.comma
    points_in: PointsIn = PointsIn.rows
    header: bool = False


# ── Numerical results ────────────────────────────────────────


@dataclass(frozen=True)
class PcaResult:
    components: np.ndarray  # D×r, orthonormal columns
    eigenvalues: np.ndarray  # length r, nonincreasing, >= 0
    projections: np.ndarray  # N×r

    @property
    def n_positive(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > 0))


@dataclass(frozen=True)
class PreprocessedCloud:
    points: np.ndarray
    k: int
    retained_eigenvalues: np.ndarray
    on_sphere: bool
    spectrum: np.ndarray = field(default_factory=lambda: np.empty(0))
    condition_threshold: Optional[float] = None

    @classmethod
    def on_unit_sphere(cls, points: npt.ArrayLike) -> "PreprocessedCloud":
        """Wrap points that are already unit vectors."""
        points = np.asarray(points, dtype=np.float64)
        return cls(points=points, k=points.shape[1], retained_eigenvalues=np.ones(points.shape[1]), on_sphere=True)


@dataclass(frozen=True)
class SeparabilityProfile:
    alpha: float
    point_probs: np.ndarray
    mean_prob: float
    dimension: Optional[float] = None


@dataclass(frozen=True)
class DimensionEstimate:
    n_hat: float
    alpha_used: float
    alpha_max: float
    profiles: list[SeparabilityProfile]
    fallback: bool = False

    @property
    def profile_used(self) -> SeparabilityProfile:
        return next(p for p in self.profiles if p.alpha == self.alpha_used)


@dataclass(frozen=True)
class SeparabilityAnalysis:
    cloud: PreprocessedCloud
    profiles: list[SeparabilityProfile]


@dataclass(frozen=True)
class LambertResult:
    w: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class CorrelationCurve:
    radii: np.ndarray
    corr_sums: np.ndarray
    fit_range: tuple[int, int]  # [start, stop) into radii
    slope: float
    intercept: float = 0.0

    @property
    def dimension(self) -> float:
        return self.slope


# ── Reports ──────────────────────────────────────────────────


class InputSummary(BaseModel):
    path: str
    delimiter: Delimiter
    points_in: PointsIn
    header: bool
    n_points: int
    n_features: int


class MutationSummary(BaseModel):
    min_count: int
    genes_before: int
    genes_after: int
    tumors_before: int
    tumors_after: int

    @computed_field
    @property
    def dropped_genes(self) -> int:
        return self.genes_before - self.genes_after


class PreprocessSummary(BaseModel):
    k: int
    condition_threshold: float
    on_sphere: bool
    retained_eigenvalues: list[float]
    eigenvalue_ratios: list[float]  # λ_i / λ_1 for the retained components


class SweepRow(BaseModel):
    alpha: float
    mean_prob: float
    dimension: Optional[float] = None


class RunReport(BaseModel):
    """Everything a single estimate/sweep run produced, minus the per-point table."""

    tool: str = "fishersep"
    version: str
    input: InputSummary
    mutation: Optional[MutationSummary] = None
    preprocessing: PreprocessSummary
    alphas: list[float]
    sweep: list[SweepRow]
    alpha_max: Optional[float] = None
    alpha_used: Optional[float] = None
    n_hat: Optional[float] = None
    fallback: bool = False
    block_size: int
    threads: int
    seed: Optional[int] = None
    timing: dict[str, float] = Field(default_factory=dict)


class BenchmarkRow(BaseModel):
    dataset: str
    cardinality: int
    embed_dim: int
    intrinsic_dim: int
    fishers: Optional[float] = None
    retained_k: Optional[int] = None
    cd: Optional[float] = None
    error: Optional[str] = None


class BenchmarkReport(BaseModel):
    rows: list[BenchmarkRow]
    mean_pct_error: dict[str, float]
