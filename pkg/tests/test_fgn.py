import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from condorlab.errors import SizeExceeded
from condorlab.fgn import autocovariance, sample_fgn, sample_fgn_cholesky


class TestAutocovariance:
    def test_lag_zero_is_unit_variance(self):
        for h in (0.1, 0.3, 0.5, 0.9):
            assert autocovariance(h, 0) == pytest.approx(1.0)

    def test_h_half_is_white_noise(self):
        assert autocovariance(0.5, np.arange(1, 10)) == pytest.approx(0.0)

    def test_lag_one_closed_form(self):
        # rho(1) = 2^(2h-1) - 1
        for h in (0.1, 0.25, 0.7):
            assert autocovariance(h, 1) == pytest.approx(2 ** (2 * h - 1) - 1)

    def test_antipersistent_below_half(self):
        assert autocovariance(0.1, 1) < 0
        assert autocovariance(0.8, 1) > 0

    def test_symmetric_in_lag(self):
        lags = np.arange(-5, 6)
        out = autocovariance(0.2, lags)
        assert np.allclose(out, out[::-1])

    @given(st.floats(0.01, 0.99), st.integers(0, 100))
    def test_scalar_matches_vector(self, h, k):
        assert autocovariance(h, k) == pytest.approx(autocovariance(h, np.array([k]))[0])

    def test_rejects_hurst_outside_unit_interval(self):
        for h in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                autocovariance(h, 1)


class TestCirculantSampler:
    def test_deterministic(self):
        a = sample_fgn(0.1, 256, seed=42)
        b = sample_fgn(0.1, 256, seed=42)
        assert np.array_equal(a.increments, b.increments)

    def test_seed_sensitivity(self):
        a = sample_fgn(0.1, 64, seed=1)
        b = sample_fgn(0.1, 64, seed=2)
        assert not np.array_equal(a.increments, b.increments)

    def test_shape_and_metadata(self):
        block = sample_fgn(0.3, 100, seed=0)
        assert block.increments.shape == (100,)
        assert block.length == 100 and block.seed == 0

    def test_single_sample(self):
        block = sample_fgn(0.3, 1, seed=5)
        assert block.increments.shape == (1,)

    @settings(deadline=None, max_examples=25)
    @given(st.floats(0.05, 0.95), st.integers(2, 256), st.integers(0, 2 ** 32))
    def test_any_hurst_yields_finite_samples(self, h, n, seed):
        block = sample_fgn(h, n, seed)
        assert len(block.increments) == n
        assert np.all(np.isfinite(block.increments))

    def test_ensemble_covariance_matches_target(self):
        # Small-n ensemble: sample covariance over many seeds should match
        # the Toeplitz target entrywise.
        h, n, reps = 0.1, 4, 4000
        draws = np.stack([sample_fgn(h, n, seed).increments for seed in range(reps)])
        sample_cov = draws.T @ draws / reps
        target = scipy.linalg.toeplitz(autocovariance(h, np.arange(n)))
        assert np.allclose(sample_cov, target, atol=0.08)

    def test_sample_autocorrelation_within_three_se(self):
        h, n = 0.1, 50_000
        x = sample_fgn(h, n, seed=7).increments
        se = 3.0 / np.sqrt(n)
        for lag in range(1, 6):
            sample = np.mean(x[lag:] * x[:-lag]) / np.var(x)
            assert abs(sample - autocovariance(h, lag)) < 3 * se


class TestCholeskyOracle:
    def test_exact_covariance_factor(self):
        # With z ~ N(0, I) fixed, L z has covariance L L^T = target exactly;
        # check the factor itself reproduces the Toeplitz matrix.
        h, n = 0.2, 64
        cov = scipy.linalg.toeplitz(autocovariance(h, np.arange(n)))
        lower = scipy.linalg.cholesky(cov, lower=True)
        assert np.allclose(lower @ lower.T, cov)

    def test_deterministic(self):
        a = sample_fgn_cholesky(0.1, 32, seed=3)
        b = sample_fgn_cholesky(0.1, 32, seed=3)
        assert np.array_equal(a.increments, b.increments)

    def test_size_cap(self):
        with pytest.raises(SizeExceeded):
            sample_fgn_cholesky(0.1, 2049, seed=0)

    def test_agrees_with_circulant_distributionally(self):
        from scipy.stats import ks_2samp

        h, n = 0.1, 2000
        a = sample_fgn(h, n, seed=11).increments
        b = sample_fgn_cholesky(h, n, seed=12).increments
        assert ks_2samp(a, b).pvalue > 0.01
