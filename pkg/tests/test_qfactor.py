import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from onehot_nb.errors import BadK, OutOfUnitInterval, ZeroTheta
from onehot_nb.models import q_factor
from onehot_nb.qfactor import (
    BoundPair,
    centre_configuration,
    corner_configuration,
    extremeness_guaranteed,
    f_j,
    f_j_rows,
    lower_bound,
    q_factor_rows,
    q_optimum,
    ratio_bounds,
    upper_bound,
)
from onehot_nb.simplex import RngSeed, dirichlet_draws


EPS = np.finfo(float).eps


def roundoff(theta_j, k):
    """Absolute error allowed in f_j: a stored theta sums to 1 only to within a few ulps,
    which shifts Q by up to about K ulps of 1."""
    return theta_j * k * EPS


def completions(theta_j, k, size, rng):
    """Random simplex points of length K with entry 0 fixed at theta_j."""
    rest = dirichlet_draws(1.0, k - 1, size, rng) * (1.0 - theta_j)
    return np.hstack([np.full((size, 1), theta_j), rest])


class TestFj:
    def test_corner(self):
        assert f_j([1.0, 0.0, 0.0], 0) == 1.0

    def test_centre(self):
        assert f_j([1 / 3] * 3, 0) == pytest.approx(4 / 27, abs=1e-15)

    def test_hand_value(self):
        assert f_j([0.5, 0.25, 0.25], 0) == pytest.approx(0.28125, abs=1e-15)


class TestBounds:
    @pytest.mark.parametrize("t, expected", [(0.0, 0.0), (1.0, 1.0), (0.5, 0.25)])
    def test_lower(self, t, expected):
        assert lower_bound(t) == expected

    @pytest.mark.parametrize("k", [2, 3, 6, 10, 50])
    def test_upper_at_one(self, k):
        assert upper_bound(1.0, k) == 1.0

    def test_upper_k2_collapses(self):
        assert upper_bound(0.5, 2) == 0.25

    def test_upper_hand_value(self):
        assert upper_bound(0.5, 6) == pytest.approx(0.5 * 0.9**5, abs=1e-15)
        assert upper_bound(0.5, 6) == pytest.approx(0.295245, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(OutOfUnitInterval):
            lower_bound(1.5)
        with pytest.raises(OutOfUnitInterval):
            upper_bound(-0.1, 3)
        with pytest.raises(BadK):
            upper_bound(0.5, 1)

    def test_vectorized(self):
        t = np.linspace(0, 1, 11)
        np.testing.assert_array_equal(lower_bound(t), t**2)
        assert upper_bound(t, 4).shape == t.shape

    @pytest.mark.parametrize("k", [2, 3, 6, 10])
    def test_origin_and_convexity(self, k):
        t = np.linspace(0, 1, 1001)
        for fn in (lower_bound, lambda x: upper_bound(x, k)):
            y = np.asarray(fn(t))
            assert y[0] == 0.0
            assert np.all(np.diff(y, 2) >= -1e-15)

    def test_gap_grows_with_k(self):
        gap = lambda k: upper_bound(0.5, k) - lower_bound(0.5)  # noqa: E731
        assert gap(6) > gap(3) > gap(2) == 0.0


class TestQOptimum:
    def test_at_zero(self):
        assert q_optimum(0.0, 3) == 0.25

    @pytest.mark.parametrize("k", [2, 3, 7, 10])
    def test_at_one(self, k):
        assert q_optimum(1.0, k) == 1.0

    def test_hand_value(self):
        assert q_optimum(0.2, 4) == pytest.approx((2.2 / 3) ** 3, abs=1e-15)
        assert q_optimum(0.2, 4) == pytest.approx(0.394370, abs=1e-6)

    @pytest.mark.parametrize("k", [3, 4])
    @pytest.mark.parametrize("t", [0.0, 0.2, 0.5, 0.9])
    def test_barycentric_grid_search(self, k, t):
        # Exhaustive grid over the off-j simplex at step 0.01.
        n = 100
        best = 0.0
        for parts in itertools.product(range(n + 1), repeat=k - 2):
            last = n - sum(parts)
            if last < 0:
                continue
            rest = np.array([*parts, last]) / n * (1 - t)
            best = max(best, q_factor(np.concatenate([[t], rest]), 0))
        assert best <= q_optimum(t, k) + 1e-15
        # the grid's best point is within one grid step of the optimum
        assert q_optimum(t, k) - best < 1e-3

    @pytest.mark.parametrize("k", [5, 7, 10])
    def test_random_search(self, k):
        rng = RngSeed(11, k).generator()
        for t in (0.0, 0.3, 0.8):
            q = q_factor_rows(completions(t, k, 100_000, rng), 0)
            assert q.max() <= q_optimum(t, k)

    @pytest.mark.parametrize("k", range(2, 11))
    def test_attained_at_centre(self, k):
        for t in np.linspace(0, 1, 11):
            assert q_factor(centre_configuration(t, k), 0) == pytest.approx(q_optimum(t, k), abs=1e-9)

    @pytest.mark.parametrize("k", range(3, 11))
    def test_dominates_theta(self, k):
        t = np.linspace(0, 1, 1000, endpoint=False)
        assert np.all(q_optimum(t, k) > t)
        assert q_optimum(1.0, k) == 1.0

    def test_k2_equals_theta(self):
        t = np.linspace(0, 1, 1001)
        np.testing.assert_array_equal(q_optimum(t, 2), t)

    @pytest.mark.parametrize("k", range(3, 11))
    def test_increasing_by_finite_differences(self, k):
        h = 1e-6
        t = np.linspace(0, 1 - h, 1000)
        deriv = (q_optimum(t + h, k) - q_optimum(t, k)) / h
        assert np.all(deriv > 0)

    @pytest.mark.parametrize("k", range(3, 11))
    def test_corner_value_is_theta(self, k):
        for t in np.linspace(0, 1, 11):
            for corner in range(1, k):
                assert q_factor(corner_configuration(t, k, 0, corner), 0) == pytest.approx(t, abs=1e-15)


class TestSandwich:
    @pytest.mark.parametrize("k", range(2, 11))
    def test_sampled(self, k):
        theta = dirichlet_draws(1.0, k, 20_000, RngSeed(3, k).generator())
        for j in range(k):
            f = f_j_rows(theta, j)
            t = theta[:, j]
            assert np.all(lower_bound(t) <= f + roundoff(t, k))
            assert np.all(f <= upper_bound(t, k) + roundoff(t, k))

    @given(st.floats(0, 1), st.integers(2, 12))
    def test_corner_and_centre_attain(self, t, k):
        assert f_j(corner_configuration(t, k), 0) == pytest.approx(lower_bound(t), abs=1e-12)
        assert f_j(centre_configuration(t, k), 0) == pytest.approx(upper_bound(t, k), abs=1e-12)


class TestRatioSuperlinearity:
    @pytest.mark.parametrize("k", range(2, 11))
    def test_both_bounds(self, k):
        rng = np.random.default_rng(k)
        a, b = np.sort(rng.uniform(0, 1, size=(2, 10_000)), axis=0)
        keep = (a > 0) & (b > a)
        a, b = a[keep], b[keep]
        assert np.all(lower_bound(b) / lower_bound(a) > b / a)
        assert np.all(upper_bound(b, k) / upper_bound(a, k) > b / a)


class TestRatioBounds:
    def test_hand_value(self):
        bp = ratio_bounds(0.6, 0.2, 3)
        assert bp.lower == pytest.approx(5.0, rel=1e-14)
        assert bp.upper == pytest.approx(9.6, rel=1e-14)

    @pytest.mark.parametrize("k", [2, 3, 6])
    def test_symmetric(self, k):
        bp = ratio_bounds(0.4, 0.4, k)
        assert bp.lower <= 1 <= bp.upper

    def test_k2_collapse(self):
        bp = ratio_bounds(0.7, 0.2, 2)
        assert bp.lower == pytest.approx((0.7 / 0.2) ** 2, rel=1e-14)
        assert bp.upper == pytest.approx((0.7 / 0.2) ** 2, rel=1e-14)

    def test_errors(self):
        with pytest.raises(ZeroTheta):
            ratio_bounds(0.0, 0.5, 3)
        with pytest.raises(ZeroTheta):
            ratio_bounds(0.5, 0.0, 3)
        with pytest.raises(OutOfUnitInterval):
            ratio_bounds(1.2, 0.5, 3)
        with pytest.raises(BadK):
            ratio_bounds(0.5, 0.5, 1)

    def test_boundpair_ordering(self):
        with pytest.raises(ValueError):
            BoundPair(2.0, 1.0)

    @pytest.mark.parametrize("k", range(2, 11))
    def test_soundness(self, k):
        rng = RngSeed(21, k).generator()
        c = dirichlet_draws(1.0, k, 10_000, rng)
        d = dirichlet_draws(1.0, k, 10_000, rng)
        for j in (0, k - 1):
            fc, fd = f_j_rows(c, j), f_j_rows(d, j)
            for a, b, tc, td in zip(fc, fd, c[:, j], d[:, j]):
                bp = ratio_bounds(tc, td, k)
                # widen the ratio by the roundoff of numerator and denominator
                lo = (a - roundoff(tc, k)) / (b + roundoff(td, k))
                hi = (a + roundoff(tc, k)) / (b - roundoff(td, k))
                assert bp.lower <= hi and lo <= bp.upper


class TestExtremeness:
    def test_theta_d_one(self):
        for k in (2, 3, 6):
            assert not extremeness_guaranteed(0.9, 1.0, k)
            assert not extremeness_guaranteed(1.0, 1.0, k)

    def test_hand_cases(self):
        assert extremeness_guaranteed(0.5, 0.2, 3)
        assert not extremeness_guaranteed(0.3, 0.2, 3)

    @pytest.mark.parametrize("k", [3, 4, 6, 10])
    def test_soundness(self, k):
        rng = RngSeed(5, k).generator()
        checked = 0
        for tc, td in rng.uniform(0, 1, size=(200, 2)):
            if not extremeness_guaranteed(tc, td, k):
                continue
            c = completions(tc, k, 10_000, rng)
            d = completions(td, k, 10_000, rng)
            assert np.all(f_j_rows(c, 0) / f_j_rows(d, 0) > tc / td)
            checked += 1
        assert checked > 0
