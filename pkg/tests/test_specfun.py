import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thzser.quadrature import integrate_1d
from thzser.specfun import gamma_lower_reg, ln_gamma, qfunc

# Frozen against a 30-digit complementary-error-function evaluation
# (series/continued-fraction, independent of the scipy route used here).
Q_AT_TENTH_QUANTILE = 0.10000000000782731
ERF_SQRT_HALF = 0.6826894921370859


def test_qfunc_at_zero_is_half():
    assert qfunc(0.0) == pytest.approx(0.5, abs=1e-15)


def test_qfunc_deep_tail_underflows_to_zero():
    assert qfunc(40.0) < 1e-300


def test_qfunc_tenth_quantile():
    assert qfunc(1.2815515655) == pytest.approx(Q_AT_TENTH_QUANTILE, abs=1e-7)


def test_qfunc_monotone_decreasing():
    xs = np.linspace(-8.0, 8.0, 200)
    vals = qfunc(xs)
    assert np.all(np.diff(vals) < 0.0)


def test_qfunc_rejects_nonfinite():
    with pytest.raises(ValueError):
        qfunc(np.inf)
    with pytest.raises(ValueError):
        qfunc(np.nan)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
def test_qfunc_symmetry(x):
    assert qfunc(x) + qfunc(-x) == pytest.approx(1.0, abs=1e-12)


def test_gamma_lower_exponential_special_case():
    xs = np.array([0.0, 0.3, 1.0, 4.0, 20.0])
    assert gamma_lower_reg(1.0, xs) == pytest.approx(-np.expm1(-xs), abs=1e-14)


def test_gamma_lower_zero_at_origin():
    for a in (0.3, 1.0, 2.77):
        assert gamma_lower_reg(a, 0.0) == 0.0


def test_gamma_lower_half_half_matches_erf():
    assert gamma_lower_reg(0.5, 0.5) == pytest.approx(ERF_SQRT_HALF, abs=1e-6)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.77])
@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_gamma_lower_matches_defining_integral(a, x):
    def integrand(t):
        with np.errstate(divide="ignore", under="ignore"):
            return np.exp((a - 1.0) * np.log(t) - t)

    quad, _ = integrate_1d(integrand, 0.0, x)
    expected = quad * np.exp(-ln_gamma(a))
    assert gamma_lower_reg(a, x) == pytest.approx(expected, abs=1e-8)


def test_gamma_lower_nondecreasing_and_limits():
    xs = np.linspace(0.0, 60.0, 400)
    vals = gamma_lower_reg(0.51571, xs)
    assert np.all(np.diff(vals) >= 0.0)
    assert vals[0] == 0.0
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)


def test_gamma_lower_domain_errors():
    with pytest.raises(ValueError):
        gamma_lower_reg(0.0, 1.0)
    with pytest.raises(ValueError):
        gamma_lower_reg(-1.0, 1.0)
    with pytest.raises(ValueError):
        gamma_lower_reg(1.0, -0.5)


def test_ln_gamma_reference_points():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert ln_gamma(0.5) == pytest.approx(0.57236494292470009, abs=1e-12)
    assert ln_gamma(5.0) == pytest.approx(np.log(24.0), rel=1e-13)


def test_ln_gamma_domain_error():
    with pytest.raises(ValueError):
        ln_gamma(0.0)
    with pytest.raises(ValueError):
        ln_gamma(-2.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_ln_gamma_recurrence(a):
    lhs = np.exp(ln_gamma(a + 1.0))
    rhs = a * np.exp(ln_gamma(a))
    assert lhs == pytest.approx(rhs, rel=1e-10)
