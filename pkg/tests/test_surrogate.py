import numpy as np
import pytest
from scipy.integrate import quad

from conewise import InvalidSpecError, SpectralModel
from conewise.errors import DegenerateProcessError
from conewise.estimators import fit_persistence_curve
from conewise.surrogate import (
    MAX_DENSE_HORIZON,
    build_covariance,
    estimate_persistence_gp,
    joint_persistence,
    sample_gp_paths,
)

SEMI = SpectralModel.semicircle(0, 2)
BETA3 = SpectralModel.symmetric_beta(3)


class TestBuildCovariance:
    def test_horizon_zero(self):
        cov = build_covariance(BETA3, 0)
        assert cov.shape == (1, 1) and cov[0, 0] == 1.0

    def test_unit_diagonal(self):
        cov = build_covariance(BETA3, 32)
        assert np.allclose(np.diag(cov), 1.0, atol=1e-9)

    def test_checkerboard_zeros(self):
        cov = build_covariance(SEMI, 9)
        t, s = np.meshgrid(np.arange(10), np.arange(10), indexing="ij")
        odd = (t + s) % 2 == 1
        assert np.all(cov[odd] == 0.0)
        assert np.all(cov[~odd] != 0.0)

    def test_matches_direct_quadrature_oracle(self):
        # independent oracle: raw quadrature of the density for each entry
        T = 10
        cov = build_covariance(BETA3, T)

        def f_quad(t):
            val, _ = quad(
                lambda x: float(BETA3.density(x)) * x**t, 0, 1, limit=200,
                points=[0.0, 1.0],
            )
            return val

        fs = [f_quad(t) for t in range(2 * T + 1)]
        for t in range(T + 1):
            for s in range(T + 1):
                ref = fs[t + s] / np.sqrt(fs[2 * t] * fs[2 * s])
                assert cov[t, s] == pytest.approx(ref, abs=1e-8)

    def test_psd_at_large_horizon(self):
        cov = build_covariance(SEMI, 512)
        w = np.linalg.eigvalsh(cov)
        assert w[0] > -1e-8

    def test_horizon_cap(self):
        with pytest.raises(InvalidSpecError):
            build_covariance(BETA3, MAX_DENSE_HORIZON + 1)


class TestSampleGpPaths:
    def test_identity_covariance_moments(self):
        batch = sample_gp_paths(np.eye(4), 100_000, seed=1)
        means = batch.paths.mean(axis=0)
        assert np.max(np.abs(means)) < 0.01
        assert np.allclose(batch.paths.var(axis=0), 1.0, atol=0.02)

    def test_pair_correlation_recovered(self):
        c = 0.73
        cov = np.array([[1.0, c], [c, 1.0]])
        batch = sample_gp_paths(cov, 100_000, seed=2)
        r = np.corrcoef(batch.paths[:, 0], batch.paths[:, 1])[0, 1]
        assert r == pytest.approx(c, abs=0.01)

    def test_rank_one_covariance_constant_paths(self):
        # exactly singular: goes through the 1e-10 diagonal jitter, so the
        # entries agree to the jitter scale sqrt(1e-10)
        cov = np.ones((6, 6))
        batch = sample_gp_paths(cov, 50, seed=3)
        assert np.allclose(batch.paths, batch.paths[:, :1], atol=1e-4)

    def test_reproducible(self):
        cov = build_covariance(BETA3, 16)
        a = sample_gp_paths(cov, 64, seed=9).paths
        b = sample_gp_paths(cov, 64, seed=9).paths
        assert np.array_equal(a, b)

    def test_sample_variance_near_one_on_real_covariance(self):
        n = 20_000
        batch = sample_gp_paths(build_covariance(SEMI, 64), n, seed=4)
        v = batch.paths.var(axis=0, ddof=1)
        # variance of the sample variance of a Gaussian: 2/(n-1)
        assert np.max(np.abs(v - 1.0)) < 5 * np.sqrt(2.0 / (n - 1))


class TestPersistence:
    def test_atomic_never_changes_sign(self):
        curve = estimate_persistence_gp(SpectralModel.atomic(0.9), T=100, n_paths=10, seed=0)
        assert np.all(curve.q0 == 1.0)

    def test_atomic_zero_degenerate(self):
        with pytest.raises(DegenerateProcessError):
            estimate_persistence_gp(SpectralModel.atomic(0.0), T=10, n_paths=10, seed=0)

    def test_monotone_and_normalized(self):
        curve = estimate_persistence_gp(BETA3, T=256, n_paths=20_000, seed=7)
        assert curve.tau[0] == 0 and curve.q0[0] == 1.0
        assert np.all(np.diff(curve.q0) <= 0)

    def test_beta3_slope_matches_diffusion_exponent(self):
        curve = estimate_persistence_gp(BETA3, T=1000, n_paths=50_000, seed=42)
        fit = fit_persistence_curve(curve, window=(30, 1000))
        assert fit.exponent == pytest.approx(-0.2382, abs=0.03)

    def test_semicircle_doubling_and_subprocess_product(self):
        curve, even, odd = estimate_persistence_gp(
            SEMI, T=1000, n_paths=50_000, seed=43, subprocesses=True
        )
        fit = fit_persistence_curve(curve, window=(30, 1000))
        assert fit.exponent == pytest.approx(-2 * 0.2382, abs=0.04)
        # even/odd sign survival multiplies to the full survival
        sel = curve.tau >= 1
        prod = even.q0[sel] * odd.q0[sel]
        err = np.sqrt(
            (even.stderr[sel] * odd.q0[sel]) ** 2
            + (odd.stderr[sel] * even.q0[sel]) ** 2
            + curve.stderr[sel] ** 2
        )
        assert np.all(np.abs(curve.q0[sel] - prod) <= 3 * np.maximum(err, 1e-4))

    def test_slope_stable_under_doubling_paths(self):
        fits = []
        for n in (20_000, 40_000):
            curve = estimate_persistence_gp(BETA3, T=512, n_paths=n, seed=11)
            fits.append(fit_persistence_curve(curve, window=(17, 512)))
        combined = np.hypot(fits[0].stderr_exponent, fits[1].stderr_exponent)
        assert abs(fits[0].exponent - fits[1].exponent) < max(1e-3, 1.0 * combined) + 3e-3


class TestJointPersistence:
    def test_p_one_reduces_exactly(self):
        a = estimate_persistence_gp(BETA3, T=128, n_paths=5000, seed=5)
        b = joint_persistence(BETA3, 1, T=128, n_paths=5000, seed=5)
        assert np.array_equal(a.q0, b.q0)

    def test_p_two_squares_pointwise(self):
        uni = SpectralModel.symmetric_beta(2)
        single = estimate_persistence_gp(uni, T=512, n_paths=60_000, seed=6)
        double = joint_persistence(uni, 2, T=512, n_paths=60_000, seed=16)
        sel = (single.tau >= 1) & (single.q0 > 0)
        q2, q1 = double.q0[sel], single.q0[sel]
        err = np.sqrt(double.stderr[sel] ** 2 + (2 * q1 * single.stderr[sel]) ** 2)
        assert np.all(np.abs(q2 - q1**2) <= 3 * np.maximum(err, 1e-4))

    def test_p_two_doubles_slope(self):
        uni = SpectralModel.symmetric_beta(2)
        single = estimate_persistence_gp(uni, T=512, n_paths=60_000, seed=6)
        double = joint_persistence(uni, 2, T=512, n_paths=60_000, seed=16)
        f1 = fit_persistence_curve(single, window=(17, 512))
        f2 = fit_persistence_curve(double, window=(17, 512))
        assert f2.exponent == pytest.approx(2 * f1.exponent, abs=0.05)

    def test_invalid_component_count(self):
        with pytest.raises(InvalidSpecError):
            joint_persistence(BETA3, 0, T=16, n_paths=10, seed=0)
