"""Statistics layer: window moments, the universal curve, unfolding, and
the Brody / KS diagnostics against synthetic ensembles."""

import math

import numpy as np
import pytest

from dentropy import stats
from dentropy.stats import (
    EULER_GAMMA,
    EquilibrationReport,
    brody_fit,
    ks_distance,
    spacing_stats,
    unfold_spectrum,
    universal_curve,
    window_stats,
)

LN2 = math.log(2.0)


class TestWindowStats:
    def test_constant_trace(self):
        mean, var = window_stats(np.full(64, 0.37))
        assert mean == pytest.approx(0.37, abs=1e-15)
        assert var == 0.0

    def test_two_point(self):
        mean, var = window_stats(np.array([0.0, LN2]))
        assert mean == pytest.approx(LN2 / 2, abs=1e-15)
        assert var == pytest.approx(LN2 * LN2 / 4, abs=1e-15)

    def test_against_two_pass(self):
        rng = np.random.default_rng(31)
        samples = rng.uniform(0.0, 3.0, 1000)
        mean, var = window_stats(samples)
        mean2 = samples.sum() / samples.size
        var2 = float(np.sum((samples - mean2) ** 2) / samples.size)
        assert mean == pytest.approx(mean2, rel=1e-14)
        assert var == pytest.approx(var2, rel=1e-10)

    def test_translation_invariant_variance(self):
        rng = np.random.default_rng(32)
        samples = rng.uniform(0.0, 1.0, 500)
        _, var = window_stats(samples)
        _, var_shifted = window_stats(samples + 7.25)
        assert abs(var - var_shifted) <= 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            window_stats(np.array([]))


class TestUniversalCurve:
    def test_anchors(self):
        assert universal_curve(1.0) == 0.0
        assert universal_curve(3.0) == pytest.approx((1 - EULER_GAMMA) / 2, abs=1e-15)
        assert universal_curve(1e9) == pytest.approx(1 - EULER_GAMMA, abs=1e-6)
        assert abs(universal_curve(1e9) - 0.42278) < 1e-4

    def test_monotone_and_bounded(self):
        grid = np.linspace(1.0, 5000.0, 400)
        vals = np.array([universal_curve(x) for x in grid])
        assert np.all(np.diff(vals) > 0)
        assert np.all(vals <= 1 - EULER_GAMMA)

    def test_rejects_below_one(self):
        with pytest.raises(ValueError, match="xi"):
            universal_curve(0.999)


class TestEquilibrationReport:
    def test_fluct_zero_mean(self):
        rep = EquilibrationReport(
            model="m", lambda0=0.1, delta_lambda=0.0, n0=1, dim=10,
            xi=1.0, s_dec=0.0, s_mean=0.0, s_var=0.0,
        )
        assert rep.gap == 0.0
        assert rep.fluct == 0.0

    def test_rejects_concavity_violation(self):
        with pytest.raises(ValueError, match="concavity"):
            EquilibrationReport(
                model="m", lambda0=0.1, delta_lambda=0.1, n0=1, dim=10,
                xi=2.0, s_dec=0.1, s_mean=0.2, s_var=0.0,
            )

    def test_rejects_xi_below_one(self):
        with pytest.raises(ValueError, match="xi"):
            EquilibrationReport(
                model="m", lambda0=0.1, delta_lambda=0.1, n0=1, dim=10,
                xi=0.5, s_dec=0.2, s_mean=0.1, s_var=0.0,
            )


def poisson_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.exponential(1.0, n))


def wigner_spacings(n, seed):
    # inverse CDF of the Wigner surmise
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, n)
    return np.sqrt(-4.0 * np.log1p(-u) / math.pi)


class TestUnfolding:
    def test_picket_fence_unit_spacings(self):
        levels = 0.25 * np.arange(500) - 3.0
        s = unfold_spectrum(levels)
        assert float(np.abs(s - 1.0).max()) <= 1e-8

    def test_unit_mean(self):
        s = unfold_spectrum(poisson_spectrum(1200, 41))
        assert float(s.mean()) == pytest.approx(1.0, abs=1e-6)

    def test_scale_invariance(self):
        levels = poisson_spectrum(800, 42)
        s1 = unfold_spectrum(levels)
        s2 = unfold_spectrum(levels * 137.035999)
        assert float(np.abs(s1 - s2).max()) <= 1e-8

    def test_too_few_levels(self):
        with pytest.raises(ValueError, match="levels"):
            unfold_spectrum(np.arange(90.0))

    def test_poisson_is_closer_to_poisson(self):
        st = spacing_stats(poisson_spectrum(3000, 43))
        assert st.ks_poisson < st.ks_wigner

    def test_wigner_is_closer_to_wigner(self):
        levels = np.cumsum(wigner_spacings(3000, 44))
        st = spacing_stats(levels)
        assert st.ks_wigner < st.ks_poisson


class TestBrody:
    def test_poisson_samples(self):
        rng = np.random.default_rng(45)
        q = brody_fit(rng.exponential(1.0, 5000))
        assert q < 0.15

    def test_wigner_samples(self):
        q = brody_fit(wigner_spacings(5000, 46))
        assert q > 0.85

    def test_picket_fence_rejected(self):
        levels = np.arange(400.0)
        s = unfold_spectrum(levels)
        with pytest.raises(ValueError, match="degenerate"):
            brody_fit(s)

    def test_needs_enough_spacings(self):
        with pytest.raises(ValueError, match="at least"):
            brody_fit(np.ones(50))


class TestKsDistance:
    def test_exact_cdf_small_distance(self):
        # KS distance of n exact quantiles is 1/(2n) + O(1/n^2)
        n = 1000
        u = (np.arange(n) + 0.5) / n
        s = -np.log1p(-u)
        d = ks_distance(s, stats.poisson_cdf)
        assert d == pytest.approx(0.5 / n, abs=1e-3)
