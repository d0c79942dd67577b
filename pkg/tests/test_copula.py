import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from thzser.copula import (CopulaFamily, CopulaSpec, conditional_cdf,
                           conditional_sample, copula_density)
from thzser.quadrature import integrate_2d_rect

FGM_STRONG = CopulaSpec.fgm(0.9)
FRANK_STRONG = CopulaSpec.frank(7.0)

unit_open = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


def test_spec_validation():
    with pytest.raises(ValueError):
        CopulaSpec.fgm(1.5)
    with pytest.raises(ValueError):
        CopulaSpec.fgm(-1.0001)
    with pytest.raises(ValueError):
        CopulaSpec.frank(0.0)
    # boundary FGM parameters are legal
    CopulaSpec.fgm(1.0)
    CopulaSpec.fgm(-1.0)


def test_density_independent_is_one():
    u = np.linspace(0.0, 1.0, 7)
    assert copula_density(u, u[::-1], CopulaSpec.independent()) == pytest.approx(1.0)


def test_density_fgm_zero_theta_is_one():
    u, v = np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 9))
    assert copula_density(u, v, CopulaSpec.fgm(0.0)) == pytest.approx(1.0)


def test_density_fgm_corners():
    assert copula_density(1.0, 1.0, FGM_STRONG) == pytest.approx(1.9, abs=1e-15)
    assert copula_density(1.0, 0.0, FGM_STRONG) == pytest.approx(0.1, abs=1e-15)


def test_density_frank_normalizes():
    val, _ = integrate_2d_rect(
        lambda u, v: copula_density(u, v, FRANK_STRONG) * np.ones_like(u * v),
        (0.0, 1.0), (0.0, 1.0))
    assert val == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("spec", [FGM_STRONG, FRANK_STRONG,
                                  CopulaSpec.fgm(-1.0), CopulaSpec.frank(-4.0)])
def test_density_nonnegative_on_grid(spec):
    g = np.linspace(0.0, 1.0, 100)
    u, v = np.meshgrid(g, g)
    assert np.all(copula_density(u, v, spec) >= 0.0)


@settings(max_examples=60, deadline=None)
@given(unit_open, unit_open)
def test_density_symmetry(u, v):
    for spec in (FGM_STRONG, FRANK_STRONG):
        assert copula_density(u, v, spec) == pytest.approx(
            copula_density(v, u, spec), abs=1e-12)


def test_density_domain_error():
    with pytest.raises(ValueError):
        copula_density(-0.1, 0.5, FGM_STRONG)
    with pytest.raises(ValueError):
        copula_density(0.5, 1.1, FRANK_STRONG)


def test_conditional_sample_independent_returns_w():
    u = np.array([0.2, 0.8])
    w = np.array([0.33, 0.77])
    assert conditional_sample(u, w, CopulaSpec.independent()) == pytest.approx(w)


def test_conditional_sample_fgm_zero_theta_returns_w():
    rng = np.random.default_rng(5)
    u = rng.uniform(1e-3, 1 - 1e-3, 1000)
    w = rng.uniform(1e-3, 1 - 1e-3, 1000)
    assert conditional_sample(u, w, CopulaSpec.fgm(0.0)) == pytest.approx(w)


def test_conditional_sample_stays_inside_unit_interval():
    rng = np.random.default_rng(6)
    u = rng.uniform(1e-12, 1 - 1e-12, 20_000)
    w = rng.uniform(1e-12, 1 - 1e-12, 20_000)
    for spec in (FGM_STRONG, FRANK_STRONG, CopulaSpec.frank(-9.0)):
        v = conditional_sample(u, w, spec)
        assert np.all((v > 0.0) & (v < 1.0))


def _numeric_conditional_cdf(u, v, spec, n_nodes=64):
    """Conditional CDF by Gauss-Legendre integration of the density; the
    sampling oracle, independent of the closed-form inverses."""
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    t = 0.5 * v[:, None] * (nodes[None, :] + 1.0)
    w = 0.5 * v[:, None] * weights[None, :]
    dens = copula_density(np.broadcast_to(u[:, None], t.shape), t, spec)
    return np.sum(dens * w, axis=1)


@pytest.mark.parametrize("spec", [FGM_STRONG, FRANK_STRONG])
def test_rosenblatt_uniformity(spec):
    rng = np.random.default_rng(80301)
    n = 100_000
    u = rng.uniform(1e-9, 1 - 1e-9, n)
    w = rng.uniform(1e-9, 1 - 1e-9, n)
    v = conditional_sample(u, w, spec)
    z = _numeric_conditional_cdf(u, v, spec)
    assert stats.kstest(u, "uniform").pvalue > 0.01
    assert stats.kstest(z, "uniform").pvalue > 0.01


@pytest.mark.parametrize("spec", [FGM_STRONG, FRANK_STRONG,
                                  CopulaSpec.frank(-7.0)])
def test_marginal_preservation(spec):
    rng = np.random.default_rng(515)
    n = 100_000
    u = rng.uniform(1e-9, 1 - 1e-9, n)
    w = rng.uniform(1e-9, 1 - 1e-9, n)
    v = conditional_sample(u, w, spec)
    assert stats.kstest(v, "uniform").pvalue > 0.01


def test_dependence_sign():
    rng = np.random.default_rng(99)
    n = 100_000
    u = rng.uniform(1e-9, 1 - 1e-9, n)
    w = rng.uniform(1e-9, 1 - 1e-9, n)
    for spec, sign, floor in ((FGM_STRONG, 1.0, 0.05),
                              (FRANK_STRONG, 1.0, 0.05),
                              (CopulaSpec.frank(-7.0), -1.0, 0.05)):
        v = conditional_sample(u, w, spec)
        rho = stats.spearmanr(u, v).statistic
        assert sign * rho > floor


def test_conditional_cdf_closed_form_matches_numeric():
    rng = np.random.default_rng(4)
    u = rng.uniform(0.05, 0.95, 50)
    v = rng.uniform(0.05, 0.95, 50)
    for spec in (FGM_STRONG, FRANK_STRONG):
        closed = conditional_cdf(u, v, spec)
        numeric = _numeric_conditional_cdf(u, v, spec)
        assert closed == pytest.approx(numeric, abs=1e-10)


def test_conditional_sample_domain():
    with pytest.raises(ValueError):
        conditional_sample(0.0, 0.5, FGM_STRONG)
    with pytest.raises(ValueError):
        conditional_sample(0.5, 1.0, FRANK_STRONG)
