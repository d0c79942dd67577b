"""Densities of the post-equalization effective noise.

After zero-forcing, the disturbance on the detected symbol is a complex
random variable z whose law depends on the scenario:

* independent channel/noise: z is Gaussian noise divided by the fading
  magnitude (a radially symmetric heavy-tailed density),
* copula-coupled magnitudes: the same ratio with the joint density carrying
  the copula correction between the two magnitudes,
* hardware distortion: the ratio convolved with the aggregate Gaussian
  distortion, which collapses to a single channel average.

All three densities are computed from their one-dimensional integral
representations with the adaptive engine; a whole batch of (z_r, z_i)
evaluation points shares one jointly refined panel set, which is what keeps
the nested error-rate integrals fast.  Every density is radially symmetric
in (z_r, z_i) by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import AlphaMuParams
from .copula import CopulaFamily, CopulaSpec, _density_unchecked
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate_1d_batched
from scipy import special as sp

from .specfun import ln_gamma

__all__ = [
    "HardwareImpairments",
    "EffNoiseScenario",
    "pdf_ratio_independent",
    "pdf_ratio_copula",
    "pdf_hardware",
]


@dataclass(frozen=True)
class HardwareImpairments:
    """Transmit/receive distortion levels.

    The aggregate per-dimension distortion variance after equalization is
    sigma_t2 = (kappa_t^2 + kappa_r^2) / 2, zero iff both levels vanish.
    """

    kappa_t: float
    kappa_r: float

    def __post_init__(self):
        if self.kappa_t < 0.0 or self.kappa_r < 0.0:
            raise ValueError("HardwareImpairments: kappa levels must be nonnegative")

    @property
    def sigma_t2(self) -> float:
        return 0.5 * (self.kappa_t ** 2 + self.kappa_r ** 2)


@dataclass(frozen=True)
class EffNoiseScenario:
    """Everything the effective-noise law depends on.

    nu is the deterministic link gain, sigma2 the per-dimension Gaussian
    noise variance.  A copula other than Independent and hardware
    impairments are mutually exclusive (distortion noise is correlated with
    the channel structurally, not through a copula).
    """

    alpha_mu: AlphaMuParams
    nu: float
    sigma2: float
    copula: CopulaSpec = field(default_factory=CopulaSpec.independent)
    hardware: HardwareImpairments | None = None

    def __post_init__(self):
        if not (np.isfinite(self.nu) and self.nu > 0.0):
            raise ValueError(f"EffNoiseScenario: nu must be positive, got {self.nu}")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise ValueError(
                f"EffNoiseScenario: sigma2 must be positive, got {self.sigma2}"
            )
        if self.hardware is not None and self.copula.is_dependent:
            raise ValueError(
                "EffNoiseScenario: hardware impairments and a dependent copula "
                "cannot be combined"
            )

    @property
    def gain_scale(self) -> float:
        """Scale nu * zhat of the compound channel magnitude."""
        return self.nu * self.alpha_mu.z_hat

    @property
    def half_snr_scale(self) -> float:
        """(nu * zhat)^2 / (2 sigma^2), the natural radial curvature scale."""
        s = self.gain_scale
        return s * s / (2.0 * self.sigma2)


def _channel_log_weight(p: AlphaMuParams):
    """log of alpha mu^mu / Gamma(mu), the normalized channel-weight front."""
    return np.log(p.alpha) + p.mu * np.log(p.mu) - ln_gamma(p.mu)


def _ratio_integrand(s: EffNoiseScenario, rho2_col):
    """Integrand of the ratio density, rescaled per evaluation point.

    With sv = y / (nu zhat) and A = (nu zhat)^2 / (2 sigma^2):

        f(rho) = (alpha mu^mu / Gamma(mu)) (A / pi)
                 * int_0^inf sv^(alpha mu + 1)
                   exp(-A rho^2 sv^2 - mu sv^alpha) [copula term] dsv

    The bulk of the sv-integrand sits at sv ~ 1 / sqrt(1 + A rho^2), so each
    row integrates in its own stretched variable x = sv * sqrt(b) with
    b = 1 + A rho^2; every row then has the same O(1) scale and the whole
    batch shares one small panel set.  For alpha*mu < 2 the additional
    change t = sv^alpha regularizes the small-argument behaviour; the
    combined substitution is x = t * b^(alpha/2).  rho2_col has shape (B, 1)
    and the returned callable maps nodes (n,) to (B, n).
    """
    p = s.alpha_mu
    A = s.half_snr_scale
    am = p.alpha * p.mu
    use_power = am < 2.0
    dependent = s.copula.is_dependent
    cop = s.copula
    b = 1.0 + A * rho2_col
    log_b = np.log(b)
    gauss = A * rho2_col / b  # in [0, 1)

    def g(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", under="ignore",
                         invalid="ignore"):
            logx = np.log(x)[None, :]
            if use_power:
                # t = sv^alpha scaled by c = b^(alpha/2):  t = x / c
                log_c = 0.5 * p.alpha * log_b
                log_t = logx - log_c
                chan = p.mu * np.exp(log_t)
                garg = gauss * x[None, :] ** (2.0 / p.alpha)  # A rho^2 sv^2
                garg = np.where(np.isnan(garg), np.inf, garg)
                expo = ((p.mu + 2.0 / p.alpha - 1.0) * log_t - np.log(p.alpha)
                        - log_c - chan - garg)
            else:
                # sv = x / sqrt(b)
                log_sv = logx - 0.5 * log_b
                chan = p.mu * np.exp(p.alpha * log_sv)
                garg = gauss * x[None, :] ** 2
                garg = np.where(np.isnan(garg), np.inf, garg)
                expo = ((am + 1.0) * logx - 0.5 * (am + 2.0) * log_b
                        - chan - garg)
            vals = np.exp(expo)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        if dependent:
            with np.errstate(under="ignore", over="ignore"):
                u_n = -np.expm1(-garg)
            v_h = sp.gammainc(p.mu, np.where(np.isnan(chan), np.inf, chan))
            vals = vals * _density_unchecked(u_n, v_h, cop)
        return vals

    return g


def _ratio_profile(rho2, s: EffNoiseScenario, spec: QuadSpec):
    """Ratio density evaluated jointly at a batch of squared radii."""
    rho2 = np.asarray(rho2, dtype=float).ravel()
    p = s.alpha_mu
    A = s.half_snr_scale
    log_front = _channel_log_weight(p) + np.log(A / np.pi)
    g = _ratio_integrand(s, rho2[:, None])
    vals, errs = integrate_1d_batched(g, 0.0, np.inf, spec)
    front = np.exp(log_front)
    return front * vals, front * errs


def _hardware_integrand(s: EffNoiseScenario, rho2_col):
    """Integrand of the distortion-convolved density.

    The Gaussian convolution collapses to a channel average of a Gaussian
    with per-dimension variance V(sv) = sigma_t^2 + 1 / (2 A sv^2):

        f(rho) = (alpha mu^mu / Gamma(mu))
                 * int_0^inf sv^(alpha mu - 1) / (2 pi V(sv))
                   exp(-rho^2 / (2 V(sv)) - mu sv^alpha) dsv

    The integrand carries two scales (the distortion crossover and the
    channel bulk), so it is evaluated in the log variable sv = e^g, which
    turns both into O(1)-wide features the adaptive rule resolves cheaply.
    """
    p = s.alpha_mu
    A = s.half_snr_scale
    st2 = s.hardware.sigma_t2 if s.hardware is not None else 0.0
    am = p.alpha * p.mu

    def g(gamma):
        gamma = np.asarray(gamma, dtype=float)
        with np.errstate(divide="ignore", over="ignore", under="ignore",
                         invalid="ignore"):
            v_eff = st2 + np.exp(-2.0 * gamma) / (2.0 * A)
            chan = p.mu * np.exp(p.alpha * gamma)
            expo = (am * gamma[None, :] - chan[None, :]
                    - rho2_col / (2.0 * v_eff[None, :])
                    - np.log(2.0 * np.pi * v_eff)[None, :])
            vals = np.exp(expo)
        return np.where(np.isfinite(vals), vals, 0.0)

    return g


def _hardware_profile(rho2, s: EffNoiseScenario, spec: QuadSpec):
    rho2 = np.asarray(rho2, dtype=float).ravel()
    if s.hardware is None or s.hardware.sigma_t2 == 0.0:
        # Zero distortion collapses the convolution onto the plain ratio law.
        plain = EffNoiseScenario(alpha_mu=s.alpha_mu, nu=s.nu, sigma2=s.sigma2)
        return _ratio_profile(rho2, plain, spec)
    g = _hardware_integrand(s, rho2[:, None])
    vals, errs = integrate_1d_batched(g, -np.inf, np.inf, spec)
    front = np.exp(_channel_log_weight(s.alpha_mu))
    return front * vals, front * errs


def _eval_radial(z_r, z_i, profile, s, spec):
    z_r = np.asarray(z_r, dtype=float)
    z_i = np.asarray(z_i, dtype=float)
    rho2 = np.broadcast_arrays(z_r * z_r + z_i * z_i)[0]
    scalar = rho2.ndim == 0
    flat = np.atleast_1d(rho2).ravel()
    vals, _ = profile(flat, s, spec)
    if scalar:
        return float(vals[0])
    return vals.reshape(rho2.shape)


def pdf_ratio_independent(z_r, z_i, s: EffNoiseScenario, spec: QuadSpec = DEFAULT_SPEC):
    """Density of the noise-over-channel ratio with independent magnitudes.

    Radially symmetric in (z_r, z_i); accepts scalars or broadcastable
    arrays of coordinates.
    """
    if s.copula.is_dependent:
        raise ValueError("pdf_ratio_independent: scenario must use the "
                         "Independent copula")
    return _eval_radial(z_r, z_i, _ratio_profile, s, spec)


def pdf_ratio_copula(z_r, z_i, s: EffNoiseScenario, spec: QuadSpec = DEFAULT_SPEC):
    """Density of the ratio with copula-coupled magnitudes.

    Carries the copula density evaluated at the two marginal CDFs inside the
    channel integral; reduces to the independent density whenever the copula
    density is identically one.
    """
    if s.copula.family is CopulaFamily.INDEPENDENT:
        raise ValueError("pdf_ratio_copula: scenario must configure an FGM or "
                         "Frank copula")
    return _eval_radial(z_r, z_i, _ratio_profile, s, spec)


def pdf_hardware(z_r, z_i, s: EffNoiseScenario, spec: QuadSpec = DEFAULT_SPEC):
    """Density of distortion noise plus the noise-over-channel ratio.

    The Gaussian convolution is carried out analytically, leaving one
    channel average (see _hardware_integrand).  With both kappa levels zero
    this degenerates to the independent ratio density.
    """
    if s.hardware is None:
        raise ValueError("pdf_hardware: scenario must configure hardware "
                         "impairments")
    return _eval_radial(z_r, z_i, _hardware_profile, s, spec)
