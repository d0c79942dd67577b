"""Special functions shared by every analytic error-rate expression.

All functions are vectorized over numpy arrays, accept Python scalars,
and return a float when given scalar input.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp

__all__ = ["qfunc", "gamma_lower_reg", "ln_gamma"]

_SQRT2 = float(np.sqrt(2.0))


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Evaluated through the scaled complementary error function, which keeps
    full relative accuracy deep into the tail (no 1 - erf cancellation).
    Underflows cleanly to 0.0 once the tail drops below the double range.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("qfunc: x must be finite")
    z = np.abs(x) / _SQRT2
    with np.errstate(under="ignore"):
        tail = 0.5 * sp.erfcx(z) * np.exp(-z * z)
    out = np.where(x >= 0.0, tail, 1.0 - tail)
    if out.ndim == 0:
        return float(out)
    return out


def gamma_lower_reg(a, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Backed by the Cephes routine (power series for small x, continued
    fraction for the complementary tail), which keeps uniform accuracy over
    the full shape range the fading models use.  Nondecreasing in x, 0 at
    x = 0, and clipped to [0, 1] against last-bit rounding.
    """
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(a_arr <= 0.0) or not np.all(np.isfinite(a_arr)):
        raise ValueError("gamma_lower_reg: a must be positive and finite")
    if np.any(x_arr < 0.0) or np.any(np.isnan(x_arr)):
        raise ValueError("gamma_lower_reg: x must be nonnegative")
    out = np.clip(sp.gammainc(a_arr, x_arr), 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def ln_gamma(a):
    """Natural log of the gamma function, positive real arguments only."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0.0) or not np.all(np.isfinite(a)):
        raise ValueError("ln_gamma: a must be positive and finite")
    out = sp.gammaln(a)
    if out.ndim == 0:
        return float(out)
    return out
