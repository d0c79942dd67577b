"""Link budget and small-scale channel statistics.

The deterministic part of a link is free-space spreading plus molecular
absorption and the antenna gains; the stochastic part is an alpha-mu
distributed fading magnitude for the channel and a Rayleigh magnitude for
the additive noise.  Samplers draw from explicitly passed generators; no
module-level random state exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .specfun import gamma_lower_reg, ln_gamma

__all__ = [
    "SPEED_OF_LIGHT",
    "BOLTZMANN",
    "AlphaMuParams",
    "LinkBudget",
    "NoiseConfig",
    "pathloss_hp",
    "alpha_mu_pdf",
    "alpha_mu_cdf",
    "alpha_mu_quantile",
    "alpha_mu_sample",
    "alpha_mu_moment",
    "rayleigh_pdf",
    "rayleigh_cdf",
    "rayleigh_quantile",
    "nu_for_avg_snr",
    "avg_snr_db",
]

SPEED_OF_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23


@dataclass(frozen=True)
class AlphaMuParams:
    """Shape of the small-scale fading magnitude law.

    alpha : nonlinearity of the propagation medium (> 0)
    mu    : normalized-variance / clustering parameter (> 0)
    z_hat : alpha-root mean value (E[|h_f|^alpha])^(1/alpha) (> 0)
    """

    alpha: float
    mu: float
    z_hat: float

    def __post_init__(self):
        for name in ("alpha", "mu", "z_hat"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"AlphaMuParams: {name} must be positive, got {v}")


@dataclass(frozen=True)
class LinkBudget:
    """Deterministic link parameters; gains are stored in dBi and converted
    once, so call sites never mix linear and dB units."""

    p_t: float          # average transmit power [W]
    g_t_dbi: float      # transmit antenna gain [dBi]
    g_r_dbi: float      # receive antenna gain [dBi]
    f_hz: float         # carrier frequency [Hz]
    d_m: float          # link distance [m]
    k_abs: float = 0.0  # molecular absorption coefficient [1/m]
    varrho: float = 2.0  # path-loss exponent

    def __post_init__(self):
        if not (np.isfinite(self.p_t) and self.p_t > 0.0):
            raise ValueError(f"LinkBudget: p_t must be positive, got {self.p_t}")
        if not (np.isfinite(self.f_hz) and self.f_hz > 0.0):
            raise ValueError(f"LinkBudget: f_hz must be positive, got {self.f_hz}")
        if not (np.isfinite(self.d_m) and self.d_m > 0.0):
            raise ValueError(f"LinkBudget: d_m must be positive, got {self.d_m}")
        if self.k_abs < 0.0:
            raise ValueError(f"LinkBudget: k_abs must be nonnegative, got {self.k_abs}")

    @property
    def g_t(self) -> float:
        return 10.0 ** (self.g_t_dbi / 10.0)

    @property
    def g_r(self) -> float:
        return 10.0 ** (self.g_r_dbi / 10.0)

    @property
    def nu(self) -> float:
        """Deterministic channel gain sqrt(p_t * G_t * G_r) * h_p."""
        return float(np.sqrt(self.p_t * self.g_t * self.g_r) * pathloss_hp(self))


@dataclass(frozen=True)
class NoiseConfig:
    """Per-dimension Gaussian noise variance sigma^2 [W]."""

    sigma2: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise ValueError(f"NoiseConfig: sigma2 must be positive, got {self.sigma2}")

    @classmethod
    def from_thermal(cls, temperature_k: float, bandwidth_hz: float) -> "NoiseConfig":
        """Thermal noise power k_B * T * B."""
        if temperature_k <= 0.0 or bandwidth_hz <= 0.0:
            raise ValueError("NoiseConfig.from_thermal: T and B must be positive")
        return cls(sigma2=BOLTZMANN * temperature_k * bandwidth_hz)


def pathloss_hp(lb: LinkBudget) -> float:
    """Free-space path loss with molecular absorption.

    h_p = (c / (4 pi f d))^(varrho/2) * exp(-k_abs * d / 2); strictly
    decreasing in distance, frequency and absorption coefficient.
    """
    spread = SPEED_OF_LIGHT / (4.0 * np.pi * lb.f_hz * lb.d_m)
    return float(spread ** (lb.varrho / 2.0) * np.exp(-0.5 * lb.k_abs * lb.d_m))


def _scale(p: AlphaMuParams, nu: float) -> float:
    if not nu > 0.0:
        raise ValueError(f"nu must be positive, got {nu}")
    return nu * p.z_hat


def alpha_mu_pdf(y, p: AlphaMuParams, nu: float = 1.0):
    """Density of the scaled fading magnitude |h| = nu * |h_f|.

    f(y) = alpha mu^mu y^(alpha mu - 1) / ((nu zhat)^(alpha mu) Gamma(mu))
           * exp(-mu (y / (nu zhat))^alpha)

    At y = 0 the density is 0 for alpha*mu > 1 and +inf for alpha*mu < 1;
    both are reported as such rather than special-cased away.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise ValueError("alpha_mu_pdf: y must be nonnegative")
    s = _scale(p, nu)
    am = p.alpha * p.mu
    log_norm = np.log(p.alpha) + p.mu * np.log(p.mu) - am * np.log(s) - ln_gamma(p.mu)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        logy = np.log(y)
        expo = log_norm + (am - 1.0) * logy - p.mu * (y / s) ** p.alpha
        out = np.exp(expo)
    if am == 1.0:
        out = np.where(y == 0.0, np.exp(log_norm), out)
    if out.ndim == 0:
        return float(out)
    return out


def alpha_mu_cdf(y, p: AlphaMuParams, nu: float = 1.0):
    """Distribution function of |h|: regularized lower incomplete gamma of
    mu at mu * (y / (nu zhat))^alpha."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise ValueError("alpha_mu_cdf: y must be nonnegative")
    s = _scale(p, nu)
    with np.errstate(over="ignore", under="ignore"):
        arg = p.mu * (y / s) ** p.alpha
    arg = np.where(np.isinf(arg), np.inf, arg)
    return gamma_lower_reg(p.mu, arg)


def alpha_mu_quantile(u, p: AlphaMuParams, nu: float = 1.0):
    """Inverse of alpha_mu_cdf on [0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)):
        raise ValueError("alpha_mu_quantile: u must lie in [0, 1)")
    s = _scale(p, nu)
    g = sp.gammaincinv(p.mu, u)
    out = s * (g / p.mu) ** (1.0 / p.alpha)
    if out.ndim == 0:
        return float(out)
    return out


def alpha_mu_sample(rng: np.random.Generator, p: AlphaMuParams, nu: float = 1.0,
                    size=None):
    """Draw |h| via the exact gamma-power transform.

    G ~ Gamma(mu, 1) makes nu * zhat * (G / mu)^(1/alpha) follow the target
    law exactly, with no accept-reject loop.
    """
    s = _scale(p, nu)
    g = rng.gamma(shape=p.mu, scale=1.0, size=size)
    return s * (g / p.mu) ** (1.0 / p.alpha)


def alpha_mu_moment(k: float, p: AlphaMuParams) -> float:
    """E[|h_f|^k] = zhat^k Gamma(mu + k/alpha) / (mu^(k/alpha) Gamma(mu))."""
    shifted = p.mu + k / p.alpha
    if shifted <= 0.0:
        raise ValueError(
            f"alpha_mu_moment: need mu + k/alpha > 0, got {shifted}"
        )
    log_m = (k * np.log(p.z_hat) + ln_gamma(shifted) - ln_gamma(p.mu)
             - (k / p.alpha) * np.log(p.mu))
    return float(np.exp(log_m))


def rayleigh_pdf(x, sigma2: float):
    """Rayleigh magnitude density (x / sigma^2) exp(-x^2 / (2 sigma^2))."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("rayleigh_pdf: x must be nonnegative")
    if sigma2 <= 0.0:
        raise ValueError("rayleigh_pdf: sigma2 must be positive")
    with np.errstate(under="ignore"):
        out = (x / sigma2) * np.exp(-0.5 * x * x / sigma2)
    if out.ndim == 0:
        return float(out)
    return out


def rayleigh_cdf(x, sigma2: float):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("rayleigh_cdf: x must be nonnegative")
    with np.errstate(under="ignore"):
        out = -np.expm1(-0.5 * x * x / sigma2)
    if out.ndim == 0:
        return float(out)
    return out


def rayleigh_quantile(u, sigma2: float):
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)):
        raise ValueError("rayleigh_quantile: u must lie in [0, 1)")
    out = np.sqrt(-2.0 * sigma2 * np.log1p(-u))
    if out.ndim == 0:
        return float(out)
    return out


def nu_for_avg_snr(snr_db: float, p: AlphaMuParams, sigma2: float) -> float:
    """Deterministic gain giving the requested average received SNR.

    Convention: SNR = nu^2 E[|h_f|^2] / (2 sigma^2) with unit-energy symbols,
    so nu = sqrt(2 sigma^2 * 10^(snr_db/10) / E[|h_f|^2]).
    """
    m2 = alpha_mu_moment(2.0, p)
    return float(np.sqrt(2.0 * sigma2 * 10.0 ** (snr_db / 10.0) / m2))


def avg_snr_db(nu: float, p: AlphaMuParams, sigma2: float) -> float:
    """Inverse of nu_for_avg_snr."""
    m2 = alpha_mu_moment(2.0, p)
    return float(10.0 * np.log10(nu * nu * m2 / (2.0 * sigma2)))
