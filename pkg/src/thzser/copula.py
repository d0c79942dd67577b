"""Bivariate dependence between the noise and fading magnitudes.

The two uniform ranks are coupled either by the Farlie-Gumbel-Morgenstern
family (weak dependence, parameter theta in [-1, 1]) or by the Frank family
(stronger symmetric dependence, parameter lam != 0).  Both are handled
strictly as copula densities c(u, v) multiplying the product of marginal
densities, and both admit closed-form conditional inverses for sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "CopulaFamily",
    "CopulaSpec",
    "copula_density",
    "conditional_cdf",
    "conditional_sample",
]

_TINY = float(np.finfo(float).tiny)
_ONE_MINUS = float(np.nextafter(1.0, 0.0))


class CopulaFamily(str, Enum):
    INDEPENDENT = "independent"
    FGM = "fgm"
    FRANK = "frank"


@dataclass(frozen=True)
class CopulaSpec:
    """Dependence family plus its parameter.

    theta is the FGM parameter (must lie in [-1, 1]); lam is the Frank
    parameter (any finite nonzero real).  The Independent family ignores
    both.
    """

    family: CopulaFamily = CopulaFamily.INDEPENDENT
    theta: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", CopulaFamily(self.family))
        if self.family is CopulaFamily.FGM:
            if not (np.isfinite(self.theta) and -1.0 <= self.theta <= 1.0):
                raise ValueError(
                    f"CopulaSpec: FGM theta must lie in [-1, 1], got {self.theta}"
                )
        elif self.family is CopulaFamily.FRANK:
            if not (np.isfinite(self.lam) and self.lam != 0.0):
                raise ValueError(
                    "CopulaSpec: Frank lam must be finite and nonzero "
                    "(use the Independent family for lam = 0)"
                )

    @classmethod
    def independent(cls) -> "CopulaSpec":
        return cls(CopulaFamily.INDEPENDENT)

    @classmethod
    def fgm(cls, theta: float) -> "CopulaSpec":
        return cls(CopulaFamily.FGM, theta=theta)

    @classmethod
    def frank(cls, lam: float) -> "CopulaSpec":
        return cls(CopulaFamily.FRANK, lam=lam)

    @property
    def is_dependent(self) -> bool:
        return self.family is not CopulaFamily.INDEPENDENT


def _check_unit(name, *arrays, open_interval=False):
    for arr in arrays:
        if open_interval:
            bad = (arr <= 0.0) | (arr >= 1.0)
        else:
            bad = (arr < 0.0) | (arr > 1.0)
        if np.any(bad | np.isnan(arr)):
            rng = "(0, 1)" if open_interval else "[0, 1]"
            raise ValueError(f"{name}: arguments must lie in {rng}")


def _density_unchecked(u, v, spec: CopulaSpec):
    """copula_density without domain validation, for trusted inner loops."""
    if spec.family is CopulaFamily.INDEPENDENT:
        return np.ones(np.broadcast(u, v).shape)
    if spec.family is CopulaFamily.FGM:
        return 1.0 + spec.theta * (2.0 * u - 1.0) * (2.0 * v - 1.0)
    lam = spec.lam
    em = np.expm1(-lam)
    with np.errstate(under="ignore"):
        num = -lam * em * np.exp(-lam * (u + v))
        den = np.expm1(-lam * u) * np.expm1(-lam * v) + em
    return num / (den * den)


def copula_density(u, v, spec: CopulaSpec):
    """Copula density c(u, v) on the unit square.

    Independent: 1.  FGM: 1 + theta (2u - 1)(2v - 1).  Frank:
    -lam (e^-lam - 1) e^(-lam (u+v)) /
        ((e^(-lam u) - 1)(e^(-lam v) - 1) + (e^-lam - 1))^2,
    evaluated through expm1 so the near-independence limit keeps precision.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_unit("copula_density", u, v)
    out = _density_unchecked(u, v, spec)
    if out.ndim == 0:
        return float(out)
    return out


def conditional_cdf(u, v, spec: CopulaSpec):
    """Conditional distribution C_{V|U=u}(v) = d C(u, v) / du."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_unit("conditional_cdf", u, v)
    if spec.family is CopulaFamily.INDEPENDENT:
        out = v * np.ones(np.broadcast(u, v).shape)
    elif spec.family is CopulaFamily.FGM:
        out = v + spec.theta * (1.0 - 2.0 * u) * (v - v * v)
    else:
        lam = spec.lam
        with np.errstate(under="ignore"):
            num = np.exp(-lam * u) * np.expm1(-lam * v)
            den = np.expm1(-lam) + np.expm1(-lam * u) * np.expm1(-lam * v)
        out = num / den
    out = np.clip(out, 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def _bisect_conditional(u, w, spec, n_iter=90):
    """Monotone bisection of C_{V|U=u}(v) = w; the slow-but-sure fallback."""
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = conditional_cdf(u, mid, spec) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def conditional_sample(u, w, spec: CopulaSpec):
    """Draw V | U = u by inverting the conditional CDF at the uniform w.

    The FGM inverse is the stable root of its quadratic (degenerating to
    v = w as the coefficient vanishes); the Frank inverse is logarithmic.
    Any entry where the closed form goes ill-conditioned falls back to
    bisection.  The result always lies strictly inside (0, 1).
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_unit("conditional_sample", u, w, open_interval=True)
    scalar = u.ndim == 0 and w.ndim == 0
    u, w = np.broadcast_arrays(u, w)
    u = u.astype(float)
    w = w.astype(float)

    if spec.family is CopulaFamily.INDEPENDENT:
        v = w.copy()
    elif spec.family is CopulaFamily.FGM:
        a = spec.theta * (1.0 - 2.0 * u)
        disc = (1.0 + a) ** 2 - 4.0 * a * w
        with np.errstate(invalid="ignore", divide="ignore"):
            v = 2.0 * w / (1.0 + a + np.sqrt(np.maximum(disc, 0.0)))
        v = np.where(np.abs(a) < 1e-9, w, v)
    else:
        lam = spec.lam
        with np.errstate(under="ignore", over="ignore", divide="ignore",
                         invalid="ignore"):
            den = w + (1.0 - w) * np.exp(-lam * u)
            v = -np.log1p(w * np.expm1(-lam) / den) / lam
    bad = ~np.isfinite(v) | (v <= 0.0) | (v >= 1.0)
    if bad.any():
        v = np.asarray(v, dtype=float).copy()
        v[bad] = _bisect_conditional(u[bad], w[bad], spec)
    v = np.clip(v, _TINY, _ONE_MINUS)
    if scalar:
        return float(v)
    return v
