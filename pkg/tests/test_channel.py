import numpy as np
import pytest
from scipy import stats

from thzser.channel import (SPEED_OF_LIGHT, AlphaMuParams, LinkBudget,
                            NoiseConfig, alpha_mu_cdf, alpha_mu_moment,
                            alpha_mu_pdf, alpha_mu_quantile, alpha_mu_sample,
                            avg_snr_db, nu_for_avg_snr, pathloss_hp,
                            rayleigh_cdf, rayleigh_pdf, rayleigh_quantile)
from thzser.quadrature import integrate_1d

ROW1 = AlphaMuParams(alpha=3.45388, mu=0.51571, z_hat=6.94184)
ROW2 = AlphaMuParams(alpha=3.37619, mu=2.77203, z_hat=15.14883)
RAYLEIGH_LIKE = AlphaMuParams(alpha=2.0, mu=1.0, z_hat=1.0)


def lb(**kw):
    base = dict(p_t=1.0, g_t_dbi=0.0, g_r_dbi=0.0, f_hz=0.142e12, d_m=1.0,
                k_abs=0.0, varrho=2.0)
    base.update(kw)
    return LinkBudget(**base)


class TestPathloss:
    def test_one_meter_reference(self):
        expected = SPEED_OF_LIGHT / (4.0 * np.pi * 0.142e12)
        got = pathloss_hp(lb())
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(1.6806e-4, rel=1e-3)

    def test_inverse_distance_law(self):
        assert pathloss_hp(lb(d_m=2.0)) == pytest.approx(
            0.5 * pathloss_hp(lb(d_m=1.0)), rel=1e-12)

    def test_absorption_factor(self):
        d = 3.7
        ratio = pathloss_hp(lb(d_m=d, k_abs=2.0 / d)) / pathloss_hp(lb(d_m=d))
        assert ratio == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_strictly_decreasing(self):
        assert pathloss_hp(lb(d_m=5.0)) < pathloss_hp(lb(d_m=4.0))
        assert pathloss_hp(lb(f_hz=0.3e12)) < pathloss_hp(lb(f_hz=0.142e12))
        assert pathloss_hp(lb(k_abs=0.5)) < pathloss_hp(lb(k_abs=0.0))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lb(f_hz=0.0)
        with pytest.raises(ValueError):
            lb(d_m=-1.0)
        with pytest.raises(ValueError):
            lb(k_abs=-0.1)
        with pytest.raises(ValueError):
            lb(p_t=0.0)

    def test_nu_positive(self):
        assert lb(g_r_dbi=19.0).nu > 0.0


class TestAlphaMuPdf:
    def test_rayleigh_reduction(self):
        y = np.linspace(0.01, 3.0, 40)
        got = alpha_mu_pdf(y, RAYLEIGH_LIKE, nu=1.0)
        assert got == pytest.approx(2.0 * y * np.exp(-y * y), rel=1e-12)

    def test_normalizes_row1(self):
        val, _ = integrate_1d(lambda y: alpha_mu_pdf(y, ROW1, nu=1.0),
                              0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_origin_behaviour(self):
        assert alpha_mu_pdf(0.0, ROW1, nu=1.0) == 0.0  # alpha*mu > 1
        spiky = AlphaMuParams(alpha=1.5, mu=0.5, z_hat=1.0)  # alpha*mu < 1
        assert alpha_mu_pdf(0.0, spiky, nu=1.0) == np.inf

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            alpha_mu_pdf(-0.1, ROW1)


class TestAlphaMuCdf:
    def test_zero_at_origin(self):
        assert alpha_mu_cdf(0.0, ROW1, nu=1.0) == 0.0

    def test_rayleigh_reduction(self):
        assert alpha_mu_cdf(1.0, RAYLEIGH_LIKE, nu=1.0) == pytest.approx(
            -np.expm1(-1.0), rel=1e-12)

    @pytest.mark.parametrize("frac", [0.5, 1.0, 2.0])
    def test_derivative_matches_pdf(self, frac):
        nu = 0.37
        y = frac * nu * ROW1.z_hat
        h = 1e-6 * y
        num = (alpha_mu_cdf(y + h, ROW1, nu) - alpha_mu_cdf(y - h, ROW1, nu)) / (2 * h)
        assert num == pytest.approx(alpha_mu_pdf(y, ROW1, nu), rel=1e-5)


class TestAlphaMuQuantile:
    def test_zero(self):
        assert alpha_mu_quantile(0.0, ROW1, nu=1.0) == 0.0

    def test_round_trip(self):
        us = np.arange(0.1, 0.95, 0.1)
        ys = alpha_mu_quantile(us, ROW1, nu=2.5)
        assert alpha_mu_cdf(ys, ROW1, nu=2.5) == pytest.approx(us, abs=1e-9)

    def test_rayleigh_reduction(self):
        u = -np.expm1(-1.0)
        assert alpha_mu_quantile(u, RAYLEIGH_LIKE, nu=1.0) == pytest.approx(
            1.0, rel=1e-10)

    def test_monotone(self):
        us = np.linspace(0.01, 0.99, 50)
        ys = alpha_mu_quantile(us, ROW2, nu=1.0)
        assert np.all(np.diff(ys) > 0.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            alpha_mu_quantile(1.0, ROW1)
        with pytest.raises(ValueError):
            alpha_mu_quantile(-0.1, ROW1)


class TestAlphaMuSampler:
    def test_ks_against_cdf(self):
        rng = np.random.default_rng(1234)
        draws = alpha_mu_sample(rng, ROW1, nu=1.0, size=100_000)
        res = stats.kstest(draws, lambda y: alpha_mu_cdf(y, ROW1, nu=1.0))
        assert res.pvalue > 0.01

    def test_alpha_moment_matches_definition(self):
        rng = np.random.default_rng(99)
        n = 200_000
        draws = alpha_mu_sample(rng, ROW1, nu=1.0, size=n)
        powered = draws ** ROW1.alpha
        se = powered.std(ddof=1) / np.sqrt(n)
        assert abs(powered.mean() - ROW1.z_hat ** ROW1.alpha) < 3.0 * se

    def test_rayleigh_case_matches_inverse_transform(self):
        rng = np.random.default_rng(7)
        draws = alpha_mu_sample(rng, RAYLEIGH_LIKE, nu=1.0, size=100_000)
        u = np.random.default_rng(8).uniform(size=100_000)
        reference = np.sqrt(-np.log(u))  # z_hat * sqrt(-ln U)
        res = stats.ks_2samp(draws, reference)
        assert res.pvalue > 0.01


class TestMoments:
    def test_alpha_moment_is_zhat_power(self):
        assert alpha_mu_moment(ROW1.alpha, ROW1) == pytest.approx(
            ROW1.z_hat ** ROW1.alpha, rel=1e-12)

    def test_rayleigh_second_moment(self):
        p = AlphaMuParams(alpha=2.0, mu=1.0, z_hat=3.3)
        assert alpha_mu_moment(2.0, p) == pytest.approx(3.3 ** 2, rel=1e-12)

    def test_row2_second_moment_against_simulation(self):
        rng = np.random.default_rng(2024)
        n = 200_000
        draws = alpha_mu_sample(rng, ROW2, nu=1.0, size=n)
        sq = draws ** 2
        se = sq.std(ddof=1) / np.sqrt(n)
        assert abs(sq.mean() - alpha_mu_moment(2.0, ROW2)) < 3.0 * se

    def test_domain(self):
        with pytest.raises(ValueError):
            alpha_mu_moment(-10.0, ROW1)


class TestRayleigh:
    def test_mode(self):
        assert rayleigh_pdf(1.0, 1.0) == pytest.approx(np.exp(-0.5), rel=1e-12)

    def test_normalization(self):
        val, _ = integrate_1d(lambda x: rayleigh_pdf(x, 0.7), 0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_cdf_matches_quadrature(self):
        for x in (0.4, 1.1, 2.3):
            val, _ = integrate_1d(lambda t: rayleigh_pdf(t, 0.8), 0.0, x)
            assert rayleigh_cdf(x, 0.8) == pytest.approx(val, abs=1e-8)

    def test_quantile_round_trip(self):
        us = np.linspace(0.05, 0.95, 19)
        xs = rayleigh_quantile(us, 1.3)
        assert rayleigh_cdf(xs, 1.3) == pytest.approx(us, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            rayleigh_pdf(-1.0, 1.0)
        with pytest.raises(ValueError):
            rayleigh_pdf(1.0, 0.0)


class TestSnrConvention:
    def test_round_trip(self):
        sigma2 = NoiseConfig.from_thermal(300.0, 4e9).sigma2
        nu = nu_for_avg_snr(17.0, ROW1, sigma2)
        assert avg_snr_db(nu, ROW1, sigma2) == pytest.approx(17.0, abs=1e-10)

    def test_thermal_noise_level(self):
        cfg = NoiseConfig.from_thermal(300.0, 4e9)
        assert cfg.sigma2 == pytest.approx(1.380649e-23 * 300.0 * 4e9, rel=1e-12)

    def test_params_validated(self):
        with pytest.raises(ValueError):
            AlphaMuParams(alpha=0.0, mu=1.0, z_hat=1.0)
        with pytest.raises(ValueError):
            AlphaMuParams(alpha=1.0, mu=-1.0, z_hat=1.0)
        with pytest.raises(ValueError):
            NoiseConfig(sigma2=0.0)
