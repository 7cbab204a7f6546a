"""Least-squares fitting of Gaussian sums to empirical densities.

A mixture here is an unconstrained weighted sum
``sum_i a_i exp(-(x - b_i)^2 / c_i^2)``; amplitudes may be negative (the
difference-of-Gaussians shape of strong-order real parts needs that), widths
are stored positive.  Fits are deterministic functions of the histogram and
the documented moment initialization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, FitError
from .numerics import EmpiricalPdf

__all__ = ["GaussianMixture", "eval_mixture", "fit_mixture"]

_MAX_ITER = 500


@dataclass(frozen=True)
class GaussianMixture:
    """Coefficients (a_i, b_i, c_i) of a Gaussian sum."""

    terms: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        terms = tuple((float(a), float(b), float(c)) for (a, b, c) in self.terms)
        object.__setattr__(self, "terms", terms)
        if len(terms) == 0:
            raise DomainError("mixture needs at least one term")
        if any(c == 0.0 for (_, _, c) in terms):
            raise DomainError("all widths c_i must be nonzero")

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def __call__(self, x):
        return eval_mixture(self, x)

    def mass(self) -> float:
        """Integral over the real line, sum_i a_i c_i sqrt(pi)."""
        return float(sum(a * abs(c) * np.sqrt(np.pi) for (a, _, c) in self.terms))

    def to_text(self) -> str:
        """Plain-text block: `ng` count line, then one `a b c` line per term."""
        lines = [f"ng {self.n_terms}"]
        lines += [f"{a!r} {b!r} {c!r}" for (a, b, c) in self.terms]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GaussianMixture":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("ng "):
            raise DomainError("mixture text must start with an `ng <count>` line")
        ng = int(lines[0].split()[1])
        if len(lines) - 1 != ng:
            raise DomainError(f"expected {ng} coefficient lines, got {len(lines) - 1}")
        terms = []
        for ln in lines[1:]:
            a, b, c = (float(v) for v in ln.split())
            terms.append((a, b, c))
        return cls(terms=tuple(terms))


def eval_mixture(mix: GaussianMixture, x):
    """sum_i a_i exp(-(x - b_i)^2 / c_i^2)."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    for (a, b, c) in mix.terms:
        out = out + a * np.exp(-((arr - b) ** 2) / c**2)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _moments(pdf: EmpiricalPdf) -> tuple[float, float, float]:
    x = pdf.centers
    w = pdf.densities * pdf.widths
    mean = float(np.sum(x * w))
    var = max(float(np.sum((x - mean) ** 2 * w)), 1e-30)
    peak = float(np.max(pdf.densities))
    return peak, mean, np.sqrt(var)


def _pack(terms):
    return np.array([v for t in terms for v in t], dtype=float)


def _unpack(vec) -> tuple[tuple[float, float, float], ...]:
    it = iter(vec)
    return tuple((a, b, abs(c)) for a, b, c in zip(it, it, it))


def _rms(terms, x, y) -> float:
    model = np.zeros_like(x)
    for (a, b, c) in terms:
        model += a * np.exp(-((x - b) ** 2) / c**2)
    return float(np.sqrt(np.mean((model - y) ** 2)))


def fit_mixture(pdf: EmpiricalPdf, n_terms: int) -> tuple[GaussianMixture, float]:
    """Fit ``n_terms`` Gaussians to histogram bin-center densities.

    ``n_terms`` must be 1 or 3.  Initialization is moment-based: the single
    term starts at (peak, mean, sqrt(2) std); the 3-term start adds flanking
    terms at b +- std with a quarter of the amplitude.  For n_terms = 3 a
    second Levenberg-Marquardt run seeded from the converged 1-term solution
    (flanks at zero amplitude) is also tried and the lower-residual result
    returned, so the richer model never fits worse than the single Gaussian.

    Returns (mixture, root-mean-square residual).
    """
    if n_terms not in (1, 3):
        raise DomainError("n_terms must be 1 or 3")
    if pdf.densities.size < 30:
        raise DomainError("fit requires at least 30 bins")
    peak = float(np.max(pdf.densities))
    if pdf.densities[0] >= 1e-4 * peak or pdf.densities[-1] >= 1e-4 * peak:
        raise DomainError("histogram must cover the support (tails below 1e-4 of peak)")

    x = pdf.centers
    y = pdf.densities
    a0, b0, s0 = _moments(pdf)

    def resid(vec):
        model = np.zeros_like(x)
        it = iter(vec)
        for a, b, c in zip(it, it, it):
            model = model + a * np.exp(-((x - b) ** 2) / max(c**2, 1e-30))
        return model - y

    def run(start):
        try:
            sol = least_squares(resid, _pack(start), method="lm",
                                gtol=1e-10, xtol=1e-12, ftol=1e-12,
                                max_nfev=_MAX_ITER * (3 * len(start) + 1))
        except Exception as exc:  # pragma: no cover - lm rarely raises
            raise FitError(f"least-squares solver failed: {exc}", best=start) from exc
        return _unpack(sol.x)

    init1 = [(a0, b0, np.sqrt(2.0) * s0)]
    fit1 = run(init1)
    if n_terms == 1:
        if not all(np.isfinite(v) for t in fit1 for v in t):
            raise FitError("fit diverged to non-finite coefficients", best=fit1)
        return GaussianMixture(terms=fit1), _rms(fit1, x, y)

    a1, b1, c1 = fit1[0]
    candidates = [
        run([(a0, b0, np.sqrt(2.0) * s0), (a0 / 4, b0 - s0, np.sqrt(2.0) * s0),
             (a0 / 4, b0 + s0, np.sqrt(2.0) * s0)]),
        run([(a1, b1, c1), (a1 / 4, b1 - s0, c1), (a1 / 4, b1 + s0, c1)]),
        # degenerate fallback: exactly the 1-term solution, so the 3-term
        # residual can never exceed the 1-term residual
        ((a1, b1, c1), (0.0, b1 - s0, c1), (0.0, b1 + s0, c1)),
    ]
    finite = [c for c in candidates if all(np.isfinite(v) for t in c for v in t)]
    if not finite:
        raise FitError("fit diverged to non-finite coefficients", best=candidates[0])
    best = min(finite, key=lambda t: _rms(t, x, y))
    return GaussianMixture(terms=best), _rms(best, x, y)
