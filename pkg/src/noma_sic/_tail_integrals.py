"""Exact half-line integrals of Gaussian/erf products.

These are the building blocks of every closed-form pairwise error
probability: with the two-exponential tail approximation, each PEP reduces
to sums of

    A1 = int_0^inf exp(-p u^2) exp(-(u-mu)^2/tau^2) du
    A2 = int_0^inf exp(-p u^2) (u-mu) exp(-(u-mu)^2/J) du
    A3 = int_0^inf exp(-p u^2) (u-mu) exp(-(u-mu)^2/J) erf(c (u-mu)) du

A1 and A2 are elementary; A3 needs the bivariate normal CDF (Owen's T) for
its lower-limit term, which is exactly why these integrals are evaluated
here once and shared.  All three were validated against high-precision
quadrature to machine accuracy.
"""

from __future__ import annotations

import math

from scipy.special import erf, erfc, ndtr, owens_t

__all__ = ["bvn_cdf", "gauss_tail", "lin_gauss_tail", "lin_gauss_erf_tail"]


def bvn_cdf(h: float, k: float, rho: float) -> float:
    """P(X <= h, Y <= k) for standard bivariate normal with correlation rho."""
    if rho == 0.0:
        return float(ndtr(h) * ndtr(k))
    if rho >= 1.0:
        return float(ndtr(min(h, k)))
    if rho <= -1.0:
        return max(0.0, float(ndtr(h) + ndtr(k)) - 1.0)
    s = math.sqrt(1.0 - rho * rho)
    if h == 0.0 and k == 0.0:
        return 0.25 + math.asin(rho) / (2.0 * math.pi)
    if h == 0.0:
        return float(0.5 * ndtr(k) - owens_t(k, -rho / s))
    if k == 0.0:
        return float(0.5 * ndtr(h) - owens_t(h, -rho / s))
    res = 0.5 * (ndtr(h) + ndtr(k))
    res -= owens_t(h, (k - rho * h) / (h * s))
    res -= owens_t(k, (h - rho * k) / (k * s))
    if h * k < 0.0:
        res -= 0.5
    return float(res)


def gauss_tail(p: float, mu: float, tau: float) -> float:
    """A1: Gaussian-times-Gaussian over [0, inf)."""
    a = p + 1.0 / tau**2
    u1 = mu / (p * tau**2 + 1.0)
    pref = math.exp(-p * mu**2 / (p * tau**2 + 1.0))
    return pref * 0.5 * math.sqrt(math.pi / a) * float(erfc(-u1 * math.sqrt(a)))


def lin_gauss_tail(p: float, mu: float, J: float) -> float:
    """A2: Gaussian times linear-times-Gaussian over [0, inf)."""
    a = p + 1.0 / J
    u2 = mu / (p * J + 1.0)
    shift = u2 - mu
    pref = math.exp(-p * mu**2 / (p * J + 1.0))
    return pref * (math.exp(-a * u2**2) / (2.0 * a)
                   + shift * 0.5 * math.sqrt(math.pi / a) * float(erfc(-u2 * math.sqrt(a))))


def lin_gauss_erf_tail(p: float, mu: float, J: float, c: float) -> float:
    """A3: like A2 with an extra erf(c (u-mu)) factor.

    The (u - u2) part integrates by parts into elementary terms; the
    residual constant-times-Gaussian-times-erf piece is the half-line
    normal-times-normal-CDF integral, expressed through the bivariate
    normal CDF.
    """
    a = p + 1.0 / J
    u2 = mu / (p * J + 1.0)
    shift = u2 - mu
    pref = math.exp(-p * mu**2 / (p * J + 1.0))
    u3 = (a * u2 + c**2 * mu) / (a + c**2)
    big_r = a * c**2 * shift**2 / (a + c**2)
    k1 = (math.exp(-a * u2**2) * float(erf(-c * mu))
          + c / math.sqrt(a + c**2) * math.exp(-big_r)
          * float(erfc(-u3 * math.sqrt(a + c**2)))) / (2.0 * a)
    lo = -u2 * math.sqrt(2.0 * a)
    alpha = c * shift
    beta = c / math.sqrt(2.0 * a)
    denom = math.sqrt(1.0 + 2.0 * beta**2)
    k2 = math.sqrt(math.pi / a) * (
        2.0 * bvn_cdf(-lo, math.sqrt(2.0) * alpha / denom, math.sqrt(2.0) * beta / denom)
        - float(ndtr(-lo)))
    return pref * (k1 + shift * k2)
