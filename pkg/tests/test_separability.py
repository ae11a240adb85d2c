import math
from decimal import Decimal, localcontext

import numpy as np
import pytest

from fishersep.errors import ContractViolationError, DegeneratePointError, DomainError, FullySeparableError
from fishersep.models import AlphaGrid, ManifoldKind, PreprocessConfig, PreprocessedCloud, SeparabilityProfile, SyntheticSpec
from fishersep.preprocess import preprocess
from fishersep.separability import (
    alpha_sweep,
    dimension_from_p,
    estimate_dimension,
    exceedance_counts,
    point_unseparability,
    select_estimate,
    sphere_p_alpha_exact,
    theoretical_p_alpha,
    unseparability_counts,
)
from fishersep.synthdata import generate, random_rotation

GRID = AlphaGrid().values
PI_50 = Decimal("3.14159265358979323846264338327950288419716939937510")


def naive_counts(points, alpha):
    n = points.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for j in range(n):
        own = points[j] @ points[j]
        for i in range(n):
            if i != j and points[j] @ points[i] / own > alpha:
                counts[j] += 1
    return counts


def _unit_rows(rng, n, d):
    g = rng.normal(size=(n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@pytest.mark.parametrize("seed", range(20))
def test_blocked_counts_match_naive_loop(seed):
    rng = np.random.default_rng(seed)
    points = _unit_rows(rng, int(rng.integers(20, 120)), int(rng.integers(2, 8)))
    alphas = [0.3, 0.6, 0.9]
    blocked = exceedance_counts(points, alphas, block_size=int(rng.integers(1, 40)), threads=1 + seed % 3)
    for a, alpha in enumerate(alphas):
        assert np.array_equal(blocked[:, a], naive_counts(points, alpha))


def test_thread_count_does_not_change_counts(rng):
    points = _unit_rows(rng, 500, 6)
    single = exceedance_counts(points, GRID, block_size=64, threads=1)
    multi = exceedance_counts(points, GRID, block_size=64, threads=4)
    assert np.array_equal(single, multi)


def test_counts_exclude_self(rng):
    points = _unit_rows(rng, 50, 3)
    counts = exceedance_counts(points, [0.999999])
    assert counts.max() == 0


def test_zero_norm_point_is_rejected():
    with pytest.raises(DegeneratePointError):
        exceedance_counts(np.array([[1.0, 0.0], [0.0, 0.0]]), [0.5])


def test_duplicate_point_is_unseparable_from_its_copy(rng):
    points = _unit_rows(rng, 200, 8)
    before = unseparability_counts(PreprocessedCloud.on_unit_sphere(points), 0.98)
    doubled = PreprocessedCloud.on_unit_sphere(np.vstack([points, points[:1]]))
    after = unseparability_counts(doubled, 0.98)
    assert after[0] == before[0] + 1
    assert after[-1] == after[0]


def test_off_sphere_cloud_needs_opt_in(rng):
    cloud = preprocess(rng.normal(size=(100, 3)), PreprocessConfig(project_to_sphere=False))
    with pytest.raises(ContractViolationError):
        unseparability_counts(cloud, 0.8)
    assert unseparability_counts(cloud, 0.8, allow_off_sphere=True).shape == (100,)


def test_point_unseparability_has_no_dimension(sphere_points):
    profile = point_unseparability(PreprocessedCloud.on_unit_sphere(sphere_points), 0.7)
    assert profile.dimension is None
    assert profile.mean_prob == pytest.approx(profile.point_probs.mean())
    assert np.all((profile.point_probs >= 0) & (profile.point_probs <= 1))


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_alpha_outside_unit_interval(alpha):
    with pytest.raises(DomainError):
        theoretical_p_alpha(10, alpha)


@pytest.mark.parametrize("n, alpha", [(1, 0.6), (7, 0.8), (30, 0.9), (100, 0.9), (2.5, 0.71)])
def test_theoretical_p_alpha_against_decimal(n, alpha):
    with localcontext() as ctx:
        ctx.prec = 50
        a, dim = Decimal(alpha), Decimal(n)
        expected = (1 - a * a) ** ((dim - 1) / 2) / (a * (2 * PI_50 * dim).sqrt())
    assert theoretical_p_alpha(n, alpha) == pytest.approx(float(expected), rel=1e-13)


def test_theoretical_p_alpha_is_vectorized():
    values = theoretical_p_alpha(np.array([2.0, 5.0, 10.0]), 0.8)
    assert values.shape == (3,)
    assert np.all(np.diff(values) < 0)


def test_dimension_inverts_theoretical_probability():
    for n in range(1, 101):
        for alpha in GRID:
            p = theoretical_p_alpha(n, alpha)
            assert dimension_from_p(p, alpha) == pytest.approx(n, rel=1e-9)


def test_dimension_from_p_edge_cases():
    with pytest.raises(FullySeparableError):
        dimension_from_p(0.0, 0.8)
    with pytest.raises(ContractViolationError):
        dimension_from_p(1.5, 0.8)
    with pytest.raises(DomainError):
        dimension_from_p(0.1, 1.0)


def test_exact_cap_probability_low_dimensions():
    for alpha in (0.3, 0.6, 0.9):
        assert sphere_p_alpha_exact(2, alpha) == pytest.approx(math.acos(alpha) / math.pi, rel=1e-12)
        assert sphere_p_alpha_exact(3, alpha) == pytest.approx((1 - alpha) / 2, rel=1e-12)


def _profile(alpha, p):
    return SeparabilityProfile(
        alpha=alpha,
        point_probs=np.array([p]),
        mean_prob=p,
        dimension=dimension_from_p(p, alpha) if p > 0 else None,
    )


def test_select_estimate_uses_eighty_percent_of_alpha_max():
    profiles = [_profile(a, 0.01 if a <= 0.9 else 0.0) for a in GRID]
    estimate = select_estimate(profiles)
    assert estimate.alpha_max == pytest.approx(0.9)
    assert estimate.alpha_used == pytest.approx(0.72)
    assert estimate.n_hat == pytest.approx(dimension_from_p(0.01, 0.72))
    assert not estimate.fallback
    assert estimate.profile_used.alpha == estimate.alpha_used


def test_select_estimate_keeps_grid_point_lost_to_rounding():
    profiles = [_profile(a, 0.01 if a <= 0.75 else 0.0) for a in AlphaGrid.from_range(0.6, 0.98, 0.01).values]
    assert select_estimate(profiles).alpha_used == pytest.approx(0.6)


def test_select_estimate_falls_back_to_smallest_measurable_alpha(caplog):
    profiles = [_profile(a, 1e-4 if a >= 0.96 else 0.0) for a in GRID]
    estimate = select_estimate(profiles)
    assert estimate.fallback
    assert estimate.alpha_used == pytest.approx(0.96)
    assert "falling back" in caplog.text


def test_select_estimate_fully_separable():
    with pytest.raises(FullySeparableError):
        select_estimate([_profile(a, 0.0) for a in GRID])


def test_sweep_returns_one_profile_per_alpha(sphere_points):
    profiles = alpha_sweep(PreprocessedCloud.on_unit_sphere(sphere_points))
    assert [p.alpha for p in profiles] == GRID
    means = [p.mean_prob for p in profiles]
    assert all(b <= a for a, b in zip(means, means[1:]))


def test_sphere_estimate_is_close_to_ambient_dimension():
    spec = SyntheticSpec(kind=ManifoldKind.sphere, intrinsic_dim=4, embed_dim=5, cardinality=1000, seed=5)
    estimate = estimate_dimension(generate(spec))
    assert 4.25 <= estimate.n_hat <= 5.75


class TestInvariance:
    @pytest.fixture
    def cloud(self):
        spec = SyntheticSpec(kind=ManifoldKind.cube, intrinsic_dim=5, embed_dim=5, cardinality=400, seed=21)
        return generate(spec)

    def test_rotation(self, cloud):
        q = random_rotation(5, np.random.default_rng(3))
        assert estimate_dimension(cloud @ q.T).n_hat == pytest.approx(estimate_dimension(cloud).n_hat, abs=1e-6)

    def test_translation(self, cloud):
        assert estimate_dimension(cloud + 3.5).n_hat == pytest.approx(estimate_dimension(cloud).n_hat, abs=1e-6)

    def test_permutation(self, cloud):
        order = np.random.default_rng(4).permutation(cloud.shape[0])
        assert estimate_dimension(cloud[order]).n_hat == pytest.approx(estimate_dimension(cloud).n_hat, abs=1e-6)
