import numpy as np
import pytest

from fishersep.baselines import correlation_dimension, correlation_sum, correlation_sums
from fishersep.errors import DegenerateDataError, InvalidInputError
from fishersep.synthdata import random_rotation


def naive_pairs_below(x, r):
    n = x.shape[0]
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if np.sqrt(np.sum((x[i] - x[j]) ** 2)) < r:
                count += 1
    return count


def test_large_and_small_radius(rng):
    x = rng.uniform(size=(60, 3))
    assert correlation_sum(x, 10.0) == 1.0
    assert correlation_sum(x, 1e-9) == 0.0


def test_unit_interval_matches_double_loop(rng):
    x = rng.uniform(size=(100, 1))
    n = 100
    assert correlation_sum(x, 0.1) == pytest.approx(2.0 * naive_pairs_below(x, 0.1) / (n * (n - 1)), abs=0)


@pytest.mark.parametrize("seed", range(20))
def test_blocked_sums_match_double_loop(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(10, 90))
    x = rng.normal(size=(n, int(rng.integers(1, 6))))
    radii = np.sort(rng.uniform(0.2, 3.0, size=4))
    sums = correlation_sums(x, radii, block_size=int(rng.integers(1, 30)), threads=1 + seed % 2)
    expected = [2.0 * naive_pairs_below(x, r) / (n * (n - 1)) for r in radii]
    assert list(sums) == expected


def test_sums_are_monotone_in_radius(rng):
    x = rng.normal(size=(300, 4))
    sums = correlation_sums(x, np.geomspace(0.01, 10, 40))
    assert np.all(np.diff(sums) >= 0)
    assert sums[0] >= 0 and sums[-1] <= 1


def test_unit_interval_has_dimension_one(rng):
    x = np.zeros((2500, 5))
    x[:, 0] = rng.uniform(size=2500)
    curve = correlation_dimension(x)
    assert curve.dimension == pytest.approx(1.0, abs=0.15)
    start, stop = curve.fit_range
    assert 0 <= start < stop <= curve.radii.size
    assert stop - start >= 4


def test_scale_and_translation_do_not_change_slope(rng):
    x = rng.uniform(size=(600, 3))
    base = correlation_dimension(x).slope
    assert correlation_dimension(3.7 * x).slope == pytest.approx(base, abs=1e-6)
    assert correlation_dimension(x + 11.0).slope == pytest.approx(base, abs=1e-6)


def test_rotation_changes_slope_only_within_fit_tolerance(rng):
    x = rng.uniform(size=(600, 3))
    q = random_rotation(3, np.random.default_rng(9))
    assert correlation_dimension(x @ q.T).slope == pytest.approx(correlation_dimension(x).slope, abs=0.05)


def _pair_distances(x):
    return np.linalg.norm(x[:, None] - x[None], axis=-1)[np.triu_indices(len(x), 1)]


def test_default_radii_span_percentiles(rng):
    x = rng.uniform(size=(400, 2))
    curve = correlation_dimension(x)
    distances = _pair_distances(x)
    assert curve.radii[0] == pytest.approx(np.quantile(distances, 0.01))
    assert curve.radii[-1] == pytest.approx(np.quantile(distances, 0.75))


def test_neighbour_scale_radii(rng):
    x = rng.uniform(size=(400, 2))
    curve = correlation_dimension(x, neighbors=(10, 20))
    distances = _pair_distances(x)
    assert curve.radii[0] == pytest.approx(np.quantile(distances, 10 / 399))
    assert curve.radii[-1] == pytest.approx(np.quantile(distances, 20 / 399))


def test_identical_points_are_degenerate():
    with pytest.raises(DegenerateDataError):
        correlation_dimension(np.ones((50, 3)))


def test_too_few_points():
    with pytest.raises(InvalidInputError):
        correlation_dimension(np.random.default_rng(0).normal(size=(9, 2)))
