"""Link-level Monte Carlo trials with deterministic parallel streams.

Each trial draws a uniformly random QPSK symbol, a channel/noise
realization for the configured scenario, applies zero-forcing detection
(quadrant decision on the equalized sample) and counts symbol errors.
Trials are partitioned over independent random streams whose seeds derive
from the master seed through a fixed 64-bit mix, so results are
bit-identical for a given (master_seed, n_streams) regardless of how many
worker threads execute the streams or in which order they finish.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (alpha_mu_quantile, alpha_mu_sample, rayleigh_quantile)
from .copula import conditional_sample
from .ser_analytic import ConstellationGeometry
from .effective_noise import EffNoiseScenario

__all__ = [
    "TrialConfig",
    "SimResult",
    "stream_seed",
    "sample_channel_noise_pair",
    "sample_effective_noise",
    "run_trials",
    "binomial_ci",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_CHUNK = 1 << 18


def _splitmix64(z: int) -> int:
    """One splitmix64 finalization step; the fixed seed mix for streams."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, stream: int) -> int:
    """64-bit seed of a given stream index."""
    return _splitmix64((master_seed & _MASK64) ^ _splitmix64(stream & _MASK64))


def _stream_rng(master_seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, stream)))


def _worker_cap() -> int:
    env = os.environ.get("THZ_SER_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"THZ_SER_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ValueError("THZ_SER_THREADS must be >= 1")
        return cap
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialConfig:
    """How many trials to run, under which scenario, and how to seed them."""

    scenario: EffNoiseScenario
    geometry: ConstellationGeometry
    n_trials: int
    master_seed: int
    n_streams: int = 8

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("TrialConfig: n_trials must be >= 1")
        if self.n_streams < 1:
            raise ValueError("TrialConfig: n_streams must be >= 1")

    def stream_trials(self, stream: int) -> int:
        base, extra = divmod(self.n_trials, self.n_streams)
        return base + (1 if stream < extra else 0)


@dataclass(frozen=True)
class SimResult:
    """Error count with point estimate and 95% Wilson interval."""

    errors: int
    trials: int
    ser_hat: float
    ci_low: float
    ci_high: float


def sample_channel_noise_pair(rng: np.random.Generator, s: EffNoiseScenario,
                              size: int = 1):
    """Draw complex (h, n) pairs for the generic model.

    Phases are independent uniforms on [0, 2 pi) regardless of the copula;
    only the magnitudes are coupled, through conditional inversion of the
    configured copula.  The independent family uses the direct gamma-power
    channel draw.
    """
    theta_h = rng.uniform(0.0, 2.0 * np.pi, size)
    theta_n = rng.uniform(0.0, 2.0 * np.pi, size)
    if s.copula.is_dependent:
        u = rng.uniform(size=size)
        w = rng.uniform(size=size)
        # Guard against exact 0/1, which conditional inversion excludes.
        u = np.clip(u, 1e-16, 1.0 - 1e-16)
        w = np.clip(w, 1e-16, 1.0 - 1e-16)
        v = conditional_sample(u, w, s.copula)
        mag_n = rayleigh_quantile(u, s.sigma2)
        mag_h = alpha_mu_quantile(v, s.alpha_mu, s.nu)
    else:
        mag_h = alpha_mu_sample(rng, s.alpha_mu, s.nu, size=size)
        mag_n = rng.rayleigh(scale=math.sqrt(s.sigma2), size=size)
    h = mag_h * np.exp(1j * theta_h)
    n = mag_n * np.exp(1j * theta_n)
    return h, n


def _resample_zero_channels(rng, s, h):
    """|h| = 0 cannot be equalized; redraw such entries (underflow guard)."""
    for _ in range(100):
        zero = h == 0.0
        if not zero.any():
            return h
        k = int(zero.sum())
        mag = alpha_mu_sample(rng, s.alpha_mu, s.nu, size=k)
        h = h.copy()
        h[zero] = mag * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, k))
    raise RuntimeError("channel sampler keeps returning zero magnitudes")


def _complex_normal(rng, std_per_dim, size):
    re = rng.normal(0.0, 1.0, size)
    im = rng.normal(0.0, 1.0, size)
    return std_per_dim * (re + 1j * im)


def sample_effective_noise(rng: np.random.Generator, s: EffNoiseScenario,
                           size: int = 1):
    """Draw the post-equalization disturbance z for the configured scenario.

    Generic model: z = n / h.  Hardware model: z = n_t + n_r / h + n / h with
    n_r realized conditionally on h as kappa_r |h| times a standard complex
    Gaussian, which makes n_r / h circular Gaussian with variance kappa_r^2.
    """
    h, n = sample_channel_noise_pair(rng, s, size)
    h = _resample_zero_channels(rng, s, h)
    z = n / h
    if s.hardware is not None:
        hw = s.hardware
        n_t = _complex_normal(rng, hw.kappa_t / math.sqrt(2.0), size)
        n_r = np.abs(h) * _complex_normal(rng, hw.kappa_r / math.sqrt(2.0), size)
        z = z + n_t + n_r / h
    return z


def _stream_errors(cfg: TrialConfig, stream: int) -> int:
    rng = _stream_rng(cfg.master_seed, stream)
    s = cfg.scenario
    g = cfg.geometry
    remaining = cfg.stream_trials(stream)
    errors = 0
    while remaining > 0:
        m = min(remaining, _CHUNK)
        remaining -= m
        sym = rng.integers(0, 4, size=m)
        tx = np.where(sym & 1, -g.delta, g.delta) \
            + 1j * np.where(sym & 2, -g.beta, g.beta)
        h, n = sample_channel_noise_pair(rng, s, m)
        h = _resample_zero_channels(rng, s, h)
        if s.hardware is not None:
            hw = s.hardware
            n_t = _complex_normal(rng, hw.kappa_t / math.sqrt(2.0), m)
            n_r = np.abs(h) * _complex_normal(rng, hw.kappa_r / math.sqrt(2.0), m)
            r = h * (tx + n_t) + n_r + n
        else:
            r = h * tx + n
        eq = r / h
        wrong = (np.signbit(eq.real) != np.signbit(tx.real)) \
            | (np.signbit(eq.imag) != np.signbit(tx.imag))
        errors += int(np.count_nonzero(wrong))
    return errors


def run_trials(cfg: TrialConfig, max_workers: int | None = None) -> SimResult:
    """Run the configured trials and report the error rate with its CI.

    Streams execute independently (optionally in parallel up to
    THZ_SER_THREADS workers) and their integer error counts are summed, so
    the result does not depend on scheduling.
    """
    workers = max_workers if max_workers is not None else _worker_cap()
    workers = max(1, min(workers, cfg.n_streams))
    streams = [i for i in range(cfg.n_streams) if cfg.stream_trials(i) > 0]
    if workers == 1:
        counts = [_stream_errors(cfg, i) for i in streams]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda i: _stream_errors(cfg, i), streams))
    errors = int(sum(counts))
    low, high = binomial_ci(errors, cfg.n_trials)
    return SimResult(errors=errors, trials=cfg.n_trials,
                     ser_hat=errors / cfg.n_trials, ci_low=low, ci_high=high)


_Z95 = 1.959963984540054


def binomial_ci(errors: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if errors < 0 or trials < 1:
        raise ValueError("binomial_ci: need errors >= 0 and trials >= 1")
    if errors > trials:
        raise ValueError("binomial_ci: errors cannot exceed trials")
    p_hat = errors / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2.0 * trials)) / denom
    half = _Z95 * math.sqrt(p_hat * (1.0 - p_hat) / trials
                            + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)
