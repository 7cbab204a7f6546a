"""Special functions, semi-infinite quadrature, and empirical densities.

The quadrature here is deliberately conservative: it is used as the trusted
oracle against every closed-form expression in :mod:`noma_sic.analytic`, so
defaults are tight enough that disagreement points at the closed form, not at
the integrator.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfc

from .errors import ConvergenceError, DomainError

__all__ = [
    "Quadrature",
    "EmpiricalPdf",
    "q_exact",
    "q_chiani",
    "integrate_semi_infinite",
    "histogram_pdf",
    "rice_bin_count",
]


def q_exact(x):
    """Gaussian tail probability P(Z > x) for standard normal Z.

    Accepts scalars or arrays; input must be finite.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("q_exact requires finite input")
    out = 0.5 * erfc(arr / math.sqrt(2.0))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def q_chiani(x):
    """Two-exponential approximation of the Gaussian tail on x >= 0.

    Q(x) ~ exp(-x^2/2)/12 + exp(-2 x^2/3)/4.  This is the approximation used
    by every closed-form pairwise error probability in this library, so the
    quadrature oracles integrate this function, never `q_exact`.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("q_chiani is defined for finite x >= 0")
    out = np.exp(-0.5 * arr**2) / 12.0 + np.exp(-(2.0 / 3.0) * arr**2) / 4.0
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class Quadrature:
    """Adaptive quadrature settings."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError("rel_tol must lie in (0, 1)")
        if self.abs_tol <= 0.0:
            raise DomainError("abs_tol must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


# 7-point Gauss / 15-point Kronrod pair on [-1, 1].
_KRONROD_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_KRONROD_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GAUSS_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


def _panel(g: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    """G7/K15 estimate and error for one panel of the transformed integrand."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid + half * _KRONROD_NODES
    y = g(x)
    k15 = half * float(np.dot(_KRONROD_WEIGHTS, y))
    g7 = half * float(np.dot(_GAUSS_WEIGHTS, y[1::2]))
    return k15, abs(k15 - g7)


def integrate_semi_infinite(f: Callable, quad: Quadrature | None = None) -> float:
    """Integrate ``f`` over [0, inf).

    The substitution x = t/(1-t) maps the half line onto (0, 1); the unit
    interval is then bisected adaptively with a 15-point Kronrod rule per
    panel until the global error estimate satisfies
    ``max(abs_tol, rel_tol * |result|)``.

    Raises :class:`ConvergenceError` (carrying the best estimate) if the
    subdivision budget is exhausted first.
    """
    quad = quad or Quadrature()
    fv = np.vectorize(f, otypes=[float])

    def g(t: np.ndarray) -> np.ndarray:
        om = 1.0 - t
        vals = fv(t / om) / om**2
        return np.where(np.isfinite(vals), vals, 0.0)

    # max-heap on panel error; entries (-err, a, b, value)
    heap: list[tuple[float, float, float, float]] = []
    v, e = _panel(g, 0.0, 1.0)
    heapq.heappush(heap, (-e, 0.0, 1.0, v))
    for _ in range(quad.max_subdivisions):
        total = sum(item[3] for item in heap)
        err = sum(-item[0] for item in heap)
        if err <= max(quad.abs_tol, quad.rel_tol * abs(total)):
            return total
        _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            v, e = _panel(g, lo, hi)
            heapq.heappush(heap, (-e, lo, hi, v))
    total = sum(item[3] for item in heap)
    err = sum(-item[0] for item in heap)
    if err <= max(quad.abs_tol, quad.rel_tol * abs(total)):
        return total
    raise ConvergenceError(
        f"quadrature did not converge within {quad.max_subdivisions} subdivisions "
        f"(estimate {total!r}, error {err:.3e})",
        best=total,
        error_estimate=err,
    )


@dataclass(frozen=True)
class EmpiricalPdf:
    """Histogram density estimate with unit total mass."""

    edges: np.ndarray
    densities: np.ndarray
    sample_count: int

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "densities", dens)
        if edges.ndim != 1 or np.any(np.diff(edges) <= 0):
            raise DomainError("bin edges must be strictly increasing")
        if dens.shape != (edges.size - 1,):
            raise DomainError("density length must equal edges length - 1")
        if np.any(dens < 0):
            raise DomainError("densities must be nonnegative")
        mass = float(np.sum(dens * np.diff(edges)))
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(f"densities must integrate to 1 (got {mass!r})")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


def rice_bin_count(n_samples: int) -> int:
    """Rice rule, ceil(2 n^(1/3))."""
    return max(1, math.ceil(2.0 * n_samples ** (1.0 / 3.0)))


def histogram_pdf(samples: Sequence[float], bin_count: int | None = None,
                  padding: float = 0.0) -> EmpiricalPdf:
    """Normalized histogram density of ``samples``.

    ``bin_count`` defaults to the Rice rule.  Requires at least
    ``10 * bin_count`` samples so each bin is meaningfully populated.
    ``padding`` widens the range by that fraction on each side (so the edge
    bins can be genuinely empty, which fitting preconditions rely on).
    """
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError("histogram_pdf requires a non-empty sample set")
    if bin_count is None:
        bin_count = rice_bin_count(arr.size)
    if bin_count < 1:
        raise DomainError("bin_count must be >= 1")
    if padding < 0:
        raise DomainError("padding must be nonnegative")
    if arr.size < 10 * bin_count:
        raise DomainError(
            f"need at least {10 * bin_count} samples for {bin_count} bins, got {arr.size}"
        )
    lo, hi = float(np.min(arr)), float(np.max(arr))
    if lo == hi:
        # degenerate sample: one occupied bin around the constant value
        span = max(abs(lo), 1.0) * 1e-9
        lo, hi = lo - span, hi + span
    span = (hi - lo) * padding
    dens, edges = np.histogram(arr, bins=bin_count, range=(lo - span, hi + span),
                               density=True)
    return EmpiricalPdf(edges=edges, densities=dens, sample_count=int(arr.size))
