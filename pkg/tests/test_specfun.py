"""Tests for the principal branch of Lambert W."""

import math

import numpy as np
import pytest
import scipy.optimize
import scipy.special

from fishersep.errors import DomainError
from fishersep.specfun import BRANCH_POINT, MAX_ITERATIONS, lambert_w0


def test_zero_and_branch_point():
    assert lambert_w0(0.0).w == 0.0
    assert lambert_w0(BRANCH_POINT).w == -1.0


def test_w_of_e_is_one():
    assert lambert_w0(math.e).w == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("x", [-0.3, -0.1, 1e-8, 0.5, 1.0, 10.0, 1e3, 1e8, 1e100, 1e300])
def test_matches_scipy(x):
    assert lambert_w0(x).w == pytest.approx(scipy.special.lambertw(x).real, rel=1e-13, abs=1e-15)


def test_matches_bisection():
    root = scipy.optimize.bisect(lambda w: w * math.exp(w) - 5.0, -1.0, 5.0, xtol=1e-15)
    assert lambert_w0(5.0).w == pytest.approx(root, abs=1e-13)


def test_identity_on_log_grid():
    xs = BRANCH_POINT + np.geomspace(1e-6, 1e8 - BRANCH_POINT, 10_000)
    for x in xs:
        result = lambert_w0(x)
        assert abs(result.w * math.exp(result.w) - x) <= 1e-12 * max(1.0, abs(x))
        assert result.iterations <= MAX_ITERATIONS


def test_huge_argument_does_not_overflow():
    result = lambert_w0(1e300)
    assert math.isfinite(result.w)
    assert result.w + math.log(result.w) == pytest.approx(math.log(1e300), rel=1e-14)


@pytest.mark.parametrize("x", [-0.5, BRANCH_POINT - 1e-12, float("nan"), float("inf")])
def test_outside_domain(x):
    with pytest.raises(DomainError):
        lambert_w0(x)
