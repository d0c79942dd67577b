"""Symbol-error rates for zero-forcing detection over alpha-mu fading.

Analytic error probabilities for independent, copula-coupled and
hardware-distorted channel/noise scenarios, a deterministic Monte Carlo
link simulator to validate them, and a CLI that reproduces the bundled
figure presets.
"""

from .channel import (AlphaMuParams, LinkBudget, NoiseConfig, alpha_mu_cdf,
                      alpha_mu_moment, alpha_mu_pdf, alpha_mu_quantile,
                      alpha_mu_sample, avg_snr_db, nu_for_avg_snr,
                      pathloss_hp, rayleigh_cdf, rayleigh_pdf,
                      rayleigh_quantile)
from .copula import CopulaFamily, CopulaSpec, conditional_sample, copula_density
from .effective_noise import (EffNoiseScenario, HardwareImpairments,
                              pdf_hardware, pdf_ratio_copula,
                              pdf_ratio_independent)
from .montecarlo import (SimResult, TrialConfig, binomial_ci, run_trials,
                         sample_channel_noise_pair, sample_effective_noise)
from .quadrature import (DEFAULT_SPEC, NonConvergenceError, QuadSpec,
                         integrate_1d, integrate_2d_rect)
from .ser_analytic import (ConstellationGeometry, SerMethod, SerPoint,
                           ser_copula, ser_hardware, ser_hardware_asymptotic,
                           ser_hardware_floor, ser_independent, sweep)
from .specfun import gamma_lower_reg, ln_gamma, qfunc

__version__ = "0.1.0"

__all__ = [
    "AlphaMuParams", "LinkBudget", "NoiseConfig", "alpha_mu_cdf",
    "alpha_mu_moment", "alpha_mu_pdf", "alpha_mu_quantile", "alpha_mu_sample",
    "avg_snr_db", "nu_for_avg_snr", "pathloss_hp", "rayleigh_cdf",
    "rayleigh_pdf", "rayleigh_quantile",
    "CopulaFamily", "CopulaSpec", "conditional_sample", "copula_density",
    "EffNoiseScenario", "HardwareImpairments", "pdf_hardware",
    "pdf_ratio_copula", "pdf_ratio_independent",
    "SimResult", "TrialConfig", "binomial_ci", "run_trials",
    "sample_channel_noise_pair", "sample_effective_noise",
    "DEFAULT_SPEC", "NonConvergenceError", "QuadSpec", "integrate_1d",
    "integrate_2d_rect",
    "ConstellationGeometry", "SerMethod", "SerPoint", "ser_copula",
    "ser_hardware", "ser_hardware_asymptotic", "ser_hardware_floor",
    "ser_independent", "sweep",
    "gamma_lower_reg", "ln_gamma", "qfunc",
    "__version__",
]
