"""Closed-form error machinery: decision-statistic densities, PEPs, BER.

Conventions
-----------
The decision statistic of a user decoded at position k is

    z = (|xi| + 2 Re{zeta}) / sqrt(2 N0),

with xi the scaled desired-signal residual and zeta the interference seen at
that stage.  Conditioned error probability is Q(z); the unconditional one
integrates the two-exponential tail approximation ``q_chiani`` against the
density of z over [0, inf) (mass at z < 0, where interference overwhelms the
signal, is outside the model and is dropped, which is why the closed forms
turn optimistic at small power separation).

All densities factor the desired gain as a weighted sum of Rayleigh kernels
(one kernel for weak order or a frozen order, a signed pair for strong
order) convolved with a Gaussian sum for the interferer's in-phase part, so
one kernel engine serves every case.  Closed-form PEPs are assembled from
the exact half-line integrals in ``_tail_integrals`` and agree with
quadrature of the same densities to machine precision.

Scale choice: evaluating the strong pair at (sigma_n, sigma_c) and the weak
kernel at sigma_c, with sigma_c the conditional effective scale of
:func:`noma_sic.channel.conditional_weak_scale`, makes the densities the
exact conditional laws given the decoding order; the scenario layer below
does exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import erf

from ._tail_integrals import gauss_tail, lin_gauss_erf_tail, lin_gauss_tail
from .channel import ChannelParams, conditional_weak_scale, order_probability, \
    sample_conditioned_real_part
from .errors import DomainError, EvaluationError
from .gaussfit import GaussianMixture, fit_mixture
from .modem import SUPPORTED_ORDERS, error_distance_table, scaling_factor
from .numerics import histogram_pdf, q_exact

__all__ = [
    "PepContext",
    "TermLedger",
    "SymbolCombination",
    "BerCurve",
    "BerRow",
    "TwoUserScenario",
    "UeErrorTerms",
    "pdf_z_first",
    "pdf_z_second",
    "pep_first",
    "pep_first_ledger",
    "pep_second_incorrect",
    "pep_second_incorrect_ledger",
    "pep_second_correct",
    "compose_ue_error",
    "enumerate_combinations",
    "conditional_bit_error",
    "theory_ber",
    "theory_ue_terms",
    "theory_curve",
    "fixed_order_theory_curve",
    "unconditional_real_part_mixture",
]

# chiani weights paired with the z^2 coefficient mapped to u = sqrt(2 N0) z:
# exp(-z^2/2) -> exp(-u^2/(4 N0)), exp(-2 z^2/3) -> exp(-u^2/(3 N0)).
_CHIANI_FAMILIES = ((1.0 / 12.0, 4.0), (1.0 / 4.0, 3.0))

_KERNEL_GAP = 1e-9


@dataclass(frozen=True)
class PepContext:
    """Inputs of one unconditional pairwise error probability.

    ``sigma_n`` scales the desired user's ordered gain; ``sigma_m`` is the
    second kernel scale of the strong-order pair (for first-position
    contexts).  Exactly one of ``interferer`` (first position: the other
    user's in-phase symbol amplitude) or ``residual`` (second position after
    a wrong first decision: the other user's in-phase residual) is set; both
    absent means second position after a correct first decision.
    """

    p_first: float
    p_second: float
    n0: float
    sigma_n: float
    sigma_m: float
    delta_n: complex
    interferer: float | None = None
    residual: float | None = None
    mixture: GaussianMixture | None = None

    def __post_init__(self):
        if not (self.p_first > self.p_second > 0.0):
            raise DomainError("power coefficients must satisfy p_first > p_second > 0")
        if abs(self.p_first + self.p_second - 1.0) > 1e-12:
            raise DomainError("power coefficients must sum to 1")
        if self.n0 <= 0.0:
            raise DomainError("noise density must be positive")
        if self.sigma_n <= 0.0 or self.sigma_m <= 0.0:
            raise DomainError("channel scales must be positive")
        if self.delta_n == 0:
            raise DomainError("desired symbol difference must be nonzero")
        if self.interferer is not None and self.residual is not None:
            raise DomainError("set either an interferer or a residual, not both")

    def first_order(self) -> "PepContext":
        if self.interferer is None:
            raise DomainError("first-order context requires an interference symbol")
        if self.mixture is None:
            raise DomainError("first-order context requires a fitted mixture")
        if self.mixture.n_terms != 1:
            raise DomainError("first-order closed form is written for a 1-term mixture")
        return self

    def second_order_incorrect(self) -> "PepContext":
        if self.residual is None or self.residual == 0.0:
            raise DomainError("incorrect-predecessor context requires a nonzero residual")
        if self.mixture is None:
            raise DomainError("incorrect-predecessor context requires a fitted mixture")
        if self.mixture.n_terms > 3:
            raise DomainError("mixture order must be at most 3")
        return self


class TermLedger:
    """Read-only record of the named intermediate values of one PEP."""

    def __init__(self):
        self._terms: dict[str, float] = {}

    def put(self, name: str, value: float) -> float:
        if not math.isfinite(value):
            raise EvaluationError(f"closed-form term {name!r} is not finite", term=name)
        self._terms[name] = float(value)
        return value

    @property
    def terms(self) -> Mapping[str, float]:
        return MappingProxyType(self._terms)

    def __getitem__(self, name: str) -> float:
        return self._terms[name]

    def __contains__(self, name: str) -> bool:
        return name in self._terms

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)


def _strong_kernel_pair(a: float, b: float) -> tuple[tuple[float, float], ...]:
    """Signed Rayleigh-kernel weights of the strong-order gain density.

    (2u/(A-B)) [e^(-u^2/A) - e^(-u^2/B)] = (A/(A-B)) k_A - (B/(A-B)) k_B with
    k_S the unit Rayleigh kernel of scale S.  Near-equal scales are nudged
    apart by 1e-9 relative, the same threshold at which the channel module
    switches to the analytic limit.
    """
    if abs(a - b) < _KERNEL_GAP * a:
        b = a * (1.0 - _KERNEL_GAP)
    return ((a / (a - b), a), (-b / (a - b), b))


def _mixture_scales(ctx: PepContext, other_amp: float, p_other: float):
    """Per-term (a_i, mu_i, tau_i) of the scaled interference Gaussian sum."""
    t = 2.0 * math.sqrt(p_other) * other_amp
    out = []
    for (ai, bi, ci) in ctx.mixture.terms:
        out.append((ai, t * bi, abs(t * ci), abs(ci)))
    return t, out


def _pdf_kernel_mixture(z, n0: float, kernels, t: float, scaled_terms):
    """Density of z for kernel-weighted desired gain plus Gaussian-sum term."""
    s2n0 = math.sqrt(2.0 * n0)
    u = s2n0 * np.asarray(z, dtype=float)
    out = np.zeros_like(u)
    for (ai, mu_i, tau_i, _) in scaled_terms:
        kap = u - mu_i
        for (wk, s) in kernels:
            big_i = s + tau_i**2
            c_s = math.sqrt(s) / (tau_i * math.sqrt(big_i))
            g1 = (tau_i**2 / (abs(t) * big_i)) * np.exp(-(kap / tau_i) ** 2)
            g2 = (math.sqrt(math.pi) * math.sqrt(s) * tau_i / (abs(t) * big_i**1.5)
                  ) * kap * np.exp(-(kap**2) / big_i) * (1.0 + erf(c_s * kap))
            out = out + ai * wk * (g1 + g2)
    return s2n0 * out


def _pep_kernel_mixture(n0: float, kernels, t: float, scaled_terms,
                        ledger: TermLedger, label: Callable[[int, float], str]) -> float:
    """Integral of q_chiani against the kernel/mixture density over [0, inf)."""
    total = 0.0
    for i, (ai, mu_i, tau_i, _) in enumerate(scaled_terms, start=1):
        groups = [0.0, 0.0, 0.0]
        for fam, (wq, qden) in enumerate(_CHIANI_FAMILIES, start=1):
            p = 1.0 / (qden * n0)
            for (wk, s) in kernels:
                big_i = s + tau_i**2
                c_s = math.sqrt(s) / (tau_i * math.sqrt(big_i))
                a1 = ledger.put(f"A1[{fam}]({label(i, s)})", gauss_tail(p, mu_i, tau_i))
                a2 = ledger.put(f"A2[{fam}]({label(i, s)})", lin_gauss_tail(p, mu_i, big_i))
                a3 = ledger.put(f"A3[{fam}]({label(i, s)})",
                                lin_gauss_erf_tail(p, mu_i, big_i, c_s))
                lin_coeff = math.sqrt(math.pi) * math.sqrt(s) * tau_i / (abs(t) * big_i**1.5)
                groups[0] += wq * wk * (tau_i**2 / (abs(t) * big_i)) * a1
                groups[1] += wq * wk * lin_coeff * a2
                groups[2] += wq * wk * lin_coeff * a3
        for j, g in enumerate(groups, start=1):
            ledger.put(f"S[{i},{j}]", ai * g)
        total += ai * sum(groups)
    return total


def _pep_kernel_mixture_negative_side(n0: float, kernels, t: float, scaled_terms) -> float:
    """Integral of (1 - q_chiani(-z)) against the density over (-inf, 0].

    Substituting z -> -u mirrors every atom (mu -> -mu, linear part and erf
    negated); the constant 1 is the p = 0 member of the same atom family.
    Used only by the fixed-order baseline, whose tail function extends as
    Q(-x) = 1 - Q(x); the dynamic-order PEPs stay on [0, inf) by convention.
    """
    families = ((1.0, 0.0),) + tuple(
        (-wq, 1.0 / (qden * n0)) for (wq, qden) in _CHIANI_FAMILIES)
    total = 0.0
    for (ai, mu_i, tau_i, _) in scaled_terms:
        acc = 0.0
        for (w, p) in families:
            for (wk, s) in kernels:
                big_i = s + tau_i**2
                c_s = math.sqrt(s) / (tau_i * math.sqrt(big_i))
                a1 = gauss_tail(p, -mu_i, tau_i)
                a2 = lin_gauss_tail(p, -mu_i, big_i)
                a3 = lin_gauss_erf_tail(p, -mu_i, big_i, c_s)
                lin_coeff = math.sqrt(math.pi) * math.sqrt(s) * tau_i / (abs(t) * big_i**1.5)
                acc += w * wk * ((tau_i**2 / (abs(t) * big_i)) * a1 - lin_coeff * (a2 - a3))
        total += ai * acc
    return total


# --------------------------------------------------------------------------
# densities


def pdf_z_first(z, ctx: PepContext):
    """Density of the first-position decision statistic.

    Strong-order desired gain (two-kernel pair from ``sigma_n``/``sigma_m``)
    plus the other user's interference through its 1-term fitted Gaussian.
    Supported on the whole real line; the PEP integrates only z >= 0.
    """
    ctx.first_order()
    a = ctx.p_first * abs(ctx.delta_n) ** 2 * ctx.sigma_n**2
    b = ctx.p_first * abs(ctx.delta_n) ** 2 * ctx.sigma_m**2
    kernels = _strong_kernel_pair(a, b)
    t, scaled = _mixture_scales(ctx, ctx.interferer, ctx.p_second)
    return _pdf_kernel_mixture(z, ctx.n0, kernels, t, scaled)


def pdf_z_second(z, ctx: PepContext, previous_correct: bool):
    """Density of the second-position decision statistic.

    With a correct first decision the statistic is a pure scaled Rayleigh
    magnitude (supported on z >= 0); after a wrong first decision the
    predecessor's residual enters through the fitted Gaussian sum of its
    strong-order real part and the support extends to negative z.
    """
    abar = ctx.p_second * abs(ctx.delta_n) ** 2 * ctx.sigma_n**2
    if previous_correct:
        arr = np.asarray(z, dtype=float)
        beta = abar / (2.0 * ctx.n0)
        out = np.where(arr >= 0.0, (2.0 * arr / beta) * np.exp(-(arr**2) / beta), 0.0)
        return float(out) if np.isscalar(z) or arr.ndim == 0 else out
    ctx.second_order_incorrect()
    t, scaled = _mixture_scales(ctx, ctx.residual, ctx.p_first)
    return _pdf_kernel_mixture(z, ctx.n0, ((1.0, abar),), t, scaled)


# --------------------------------------------------------------------------
# closed-form PEPs


def _first_order_ledger(ctx: PepContext) -> tuple[float, TermLedger]:
    ctx.first_order()
    ledger = TermLedger()
    a1c, b1c, c1c = ctx.mixture.terms[0]
    dn2 = abs(ctx.delta_n) ** 2
    a = ledger.put("A(n)", ctx.p_first * dn2 * ctx.sigma_n**2)
    b = ledger.put("A(m)", ctx.p_first * dn2 * ctx.sigma_m**2)
    kernels = _strong_kernel_pair(a, b)
    t, scaled = _mixture_scales(ctx, ctx.interferer, ctx.p_second)
    ledger.put("mu", scaled[0][1])
    tau = ledger.put("tau", scaled[0][2])
    rx2 = ctx.interferer**2
    for sig, name in ((ctx.sigma_n, "n"), (ctx.sigma_m, "m")):
        big_i = ledger.put(f"I({name})",
                           ctx.p_first * dn2 * sig**2 + 4.0 * c1c**2 * ctx.p_second * rx2)
        ledger.put(f"D1({name})", c1c**2 * big_i)
        ledger.put(f"D2({name})", sig**2 * math.sqrt(
            1.0 / (ctx.p_second * rx2 * c1c**2) + 4.0 / (ctx.p_first * dn2 * sig**2)))
        ledger.put(f"e1({name})", math.exp(-scaled[0][1] ** 2 / big_i))
    ledger.put("lambda1", math.sqrt(1.5 * math.pi) * ctx.p_first * dn2)
    ledger.put("lambda2", 2.0 * math.sqrt(6.0 * math.pi) * c1c**2 * ctx.p_second * rx2)
    ledger.put("lambda3", math.sqrt(0.5 * math.pi) * ctx.p_first * dn2)
    ledger.put("lambda4", 2.0 * math.sqrt(2.0 * math.pi) * c1c**2 * ctx.p_second * rx2)

    def label(_i: int, s: float) -> str:
        return "n" if s == kernels[0][1] else "m"

    # the mixture amplitude a1 is applied inside the kernel engine
    value = _pep_kernel_mixture(ctx.n0, kernels, t, scaled, ledger, label)
    # per-sigma group totals, one per tail-approximation family
    for name in ("n", "m"):
        for fam in (1, 2):
            wq = _CHIANI_FAMILIES[fam - 1][0]
            wk = kernels[0][0] if name == "n" else kernels[1][0]
            s = kernels[0][1] if name == "n" else kernels[1][1]
            big_i = s + tau**2
            lin = math.sqrt(math.pi) * math.sqrt(s) * tau / (abs(t) * big_i**1.5)
            g = wq * wk * ((tau**2 / (abs(t) * big_i)) * ledger[f"A1[{fam}]({name})"]
                           + lin * (ledger[f"A2[{fam}]({name})"] + ledger[f"A3[{fam}]({name})"]))
            ledger.put(f"G{fam}({name})", a1c * g)
            ledger.put(f"F{fam}({name})",
                       ledger[f"A2[{fam}]({name})"] + ledger[f"A3[{fam}]({name})"])
    pep = ledger.put("pep", value)
    return pep, ledger


def pep_first(ctx: PepContext) -> float:
    """Unconditional PEP of the first decoding position (closed form).

    Equals ``integrate_semi_infinite(q_chiani(z) * pdf_z_first(z, ctx))`` up
    to roundoff; the assembly is exact, including the half-line boundary
    terms that need the bivariate normal CDF.
    """
    return _first_order_ledger(ctx)[0]


def pep_first_ledger(ctx: PepContext) -> tuple[float, TermLedger]:
    """Closed-form first-position PEP plus its term ledger."""
    return _first_order_ledger(ctx)


def _second_order_ledger(ctx: PepContext) -> tuple[float, TermLedger]:
    ctx.second_order_incorrect()
    ledger = TermLedger()
    abar = ctx.p_second * abs(ctx.delta_n) ** 2 * ctx.sigma_n**2
    d1 = ledger.put("D1", math.sqrt(ctx.p_first) * abs(ctx.residual))
    d2 = ledger.put("D2", math.sqrt(abar))
    t, scaled = _mixture_scales(ctx, ctx.residual, ctx.p_first)
    for i, (ai, mu_i, tau_i, ci_abs) in enumerate(scaled, start=1):
        omega = ledger.put(f"Omega_{i}", d2**2 + ci_abs**2 * d1**2)
        if omega <= 0.0:
            raise EvaluationError(f"Omega_{i} must be positive", term=f"Omega_{i}")
        ledger.put(f"J_{i}", abar + tau_i**2)
        ledger.put(f"mu_{i}", mu_i)
        ledger.put(f"tau_{i}", tau_i)
    value = _pep_kernel_mixture(ctx.n0, ((1.0, abar),), t, scaled, ledger,
                                lambda i, _s: f"i={i}")
    pep = ledger.put("pep", value)
    return pep, ledger


def pep_second_incorrect(ctx: PepContext) -> float:
    """Closed-form PEP at the second position after a wrong first decision."""
    return _second_order_ledger(ctx)[0]


def pep_second_incorrect_ledger(ctx: PepContext) -> tuple[float, TermLedger]:
    return _second_order_ledger(ctx)


def pep_second_correct(delta_n: complex, sigma_n: float, p_second: float, n0: float) -> float:
    """Closed-form PEP at the second position after a correct first decision.

    With gamma = p_second |delta_n|^2 sigma_n^2 / N0 the integral of
    q_chiani against the scaled-Rayleigh density gives
    1/(12 + 3 gamma) + 3/(12 + 4 gamma).
    """
    if delta_n == 0:
        raise DomainError("desired symbol difference must be nonzero")
    if sigma_n <= 0 or p_second <= 0 or n0 <= 0:
        raise DomainError("scale, power, and noise density must be positive")
    gamma = p_second * abs(delta_n) ** 2 * sigma_n**2 / n0
    return 1.0 / (12.0 + 3.0 * gamma) + 3.0 / (12.0 + 4.0 * gamma)


def compose_ue_error(p_first_pos: float, p_second_correct_branch: float,
                     p_second_incorrect_branch: float, p_other_first: float,
                     order_prob_first: float) -> float:
    """Total-probability composition over decoding orders and propagation.

    P(A) = P(A|first) w + [P(A|prev ok)(1 - P(other|first))
           + P(A|prev err) P(other|first)] (1 - w).
    """
    vals = (p_first_pos, p_second_correct_branch, p_second_incorrect_branch,
            p_other_first, order_prob_first)
    if any(not (0.0 <= v <= 1.0) for v in vals):
        raise DomainError("composition inputs must be probabilities in [0, 1]")
    p_second = (p_second_correct_branch * (1.0 - p_other_first)
                + p_second_incorrect_branch * p_other_first)
    total = p_first_pos * order_prob_first + p_second * (1.0 - order_prob_first)
    if not (0.0 <= total <= 1.0):
        raise EvaluationError("composed probability left [0, 1]", term="composition")
    return total


# --------------------------------------------------------------------------
# symbol combinations and per-bit conditional error


@dataclass(frozen=True)
class SymbolCombination:
    """One pattern of predecessor residuals and undecoded interferers."""

    residuals: tuple[float, ...] = ()
    interferers: tuple[float, ...] = ()


def _interferer_amplitudes(m: int, d: float) -> list[float]:
    if m == 2:
        return [d]
    side = int(round(math.sqrt(m)))
    return [(2 * l - 1) * d for l in range(1, side // 2 + 1)]


def _residual_distances(m: int, d: float) -> list[float]:
    if m == 2:
        return [2.0 * d]
    side = int(round(math.sqrt(m)))
    return [2.0 * l * d for l in range(1, side)]


def enumerate_combinations(position: int, orders: Sequence[int], eb: float = 1.0
                           ) -> list[SymbolCombination]:
    """All residual/interferer patterns seen at a decoding position (two users).

    ``orders`` lists modulation orders by decoding position.  Position 1
    sees the undecoded user's positive in-phase amplitudes {d, 3d, ...};
    position 2 sees the predecessor's in-phase residual distances
    {2d, 4d, ...}.  BPSK contributes exactly one entry on either side.
    """
    if len(orders) != 2:
        raise DomainError("combination enumeration is defined for two users")
    if position not in (1, 2):
        raise DomainError("position must be 1 or 2")
    for m in orders:
        if m not in SUPPORTED_ORDERS:
            raise DomainError(f"unsupported modulation order {m}")
    if position == 1:
        other_m = orders[1]
        d = scaling_factor(other_m, eb)
        return [SymbolCombination(interferers=(x,)) for x in _interferer_amplitudes(other_m, d)]
    other_m = orders[0]
    d = scaling_factor(other_m, eb)
    return [SymbolCombination(residuals=(r,)) for r in _residual_distances(other_m, d)]


def conditional_bit_error(delta_b: float, rho: float, interference: float,
                          n0: float, q: Callable = q_exact) -> float:
    """Conditional bit error Q((2 delta_b rho + interference)/sqrt(2 N0)).

    ``q`` selects the tail function: the exact Gaussian tail on the
    simulation side, the two-exponential approximation on the closed-form
    side (which will reject negative arguments per its domain).
    """
    if n0 <= 0:
        raise DomainError("noise density must be positive")
    return float(q((2.0 * delta_b * rho + interference) / math.sqrt(2.0 * n0)))


# --------------------------------------------------------------------------
# two-user scenario and theory curves


def unconditional_real_part_mixture(sigma: float) -> GaussianMixture:
    """Exact 1-term Gaussian of an unconditioned channel's real part."""
    if sigma <= 0:
        raise DomainError("scale must be positive")
    return GaussianMixture(terms=((1.0 / (math.sqrt(math.pi) * sigma), 0.0, sigma),))


def exact_real_part_mixture(sigma_n: float, sigma_m: float, order: int) -> GaussianMixture:
    """Exact conditional density of Re{h_n} given the two-user ordering.

    Conditioning on losing the order leaves exactly CN(0, sigma_c^2); winning
    it leaves the normalized difference of the unconditional Gaussian and a
    narrow sigma_c-scaled one.  These are the targets the empirical fits
    approach, expressed as closed-form Gaussian sums.
    """
    if sigma_n <= 0 or sigma_m <= 0:
        raise DomainError("scales must be positive")
    sc = conditional_weak_scale(sigma_n, sigma_m)
    if order == 2:
        return GaussianMixture(terms=((1.0 / (math.sqrt(math.pi) * sc), 0.0, sc),))
    if order != 1:
        raise DomainError("order must be 1 or 2")
    w = order_probability(sigma_n, sigma_m)
    return GaussianMixture(terms=(
        (1.0 / (w * math.sqrt(math.pi) * sigma_n), 0.0, sigma_n),
        (-sc / (w * math.sqrt(math.pi) * sigma_n**2), 0.0, sc),
    ))


@dataclass(frozen=True)
class TwoUserScenario:
    """Two-user configuration plus cached real-part mixture fits.

    ``mixtures[(ue, order)]`` approximates the density of Re{h_ue}
    conditioned on that user holding the given decoding order.  Fits are
    scenario-specific (they change with the channel scales) and are always
    produced by :meth:`with_fitted_mixtures`, never hardcoded.
    """

    sigma1: float
    sigma2: float
    p_first: float
    p_second: float
    m1: int
    m2: int
    eb: float = 1.0
    mixtures: Mapping[tuple[int, int], GaussianMixture] = field(default_factory=dict)

    def __post_init__(self):
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise DomainError("channel scales must be positive")
        if not (self.p_first > self.p_second > 0):
            raise DomainError("power coefficients must satisfy p_first > p_second > 0")
        if abs(self.p_first + self.p_second - 1.0) > 1e-12:
            raise DomainError("power coefficients must sum to 1")
        for m in (self.m1, self.m2):
            if m not in SUPPORTED_ORDERS:
                raise DomainError(f"unsupported modulation order {m}")
        if self.eb <= 0:
            raise DomainError("Eb must be positive")
        object.__setattr__(self, "mixtures", dict(self.mixtures))

    def sigma(self, ue: int) -> float:
        return self.sigma1 if ue == 1 else self.sigma2

    def modulation(self, ue: int) -> int:
        return self.m1 if ue == 1 else self.m2

    @property
    def effective_weak_scale(self) -> float:
        return conditional_weak_scale(self.sigma1, self.sigma2)

    def with_fitted_mixtures(self, rng: np.random.Generator, n_samples: int = 400_000,
                             bin_count: int | None = None,
                             min_event_probability: float = 1e-3) -> "TwoUserScenario":
        """Fit the four conditioned real-part densities and cache them.

        Order-1 real parts get 3-term fits (their shape is a difference of
        a wide and a narrow Gaussian), order-2 real parts 1-term fits.  When
        an ordering event is rarer than ``min_event_probability`` (so
        rejection sampling would be prohibitive and its branch weight is
        negligible anyway), the exact conditional mixture is used instead.
        """
        params = ChannelParams((self.sigma1, self.sigma2))
        fits: dict[tuple[int, int], GaussianMixture] = {}
        for ue in (1, 2):
            other = 2 if ue == 1 else 1
            for order in (1, 2):
                event_p = order_probability(self.sigma(ue), self.sigma(other))
                if order == 2:
                    event_p = 1.0 - event_p
                if event_p < min_event_probability:
                    fits[(ue, order)] = exact_real_part_mixture(
                        self.sigma(ue), self.sigma(other), order)
                    continue
                samples = sample_conditioned_real_part(ue, order, params, rng, n_samples)
                pdf = histogram_pdf(samples, bin_count, padding=0.05)
                fits[(ue, order)] = fit_mixture(pdf, 3 if order == 1 else 1)[0]
        return replace(self, mixtures=fits)

    def with_exact_mixtures(self) -> "TwoUserScenario":
        """Use the closed-form conditional real-part mixtures (no sampling)."""
        fits = {(ue, order): exact_real_part_mixture(
            self.sigma(ue), self.sigma(2 if ue == 1 else 1), order)
            for ue in (1, 2) for order in (1, 2)}
        return replace(self, mixtures=fits)

    def mixture(self, ue: int, order: int) -> GaussianMixture:
        try:
            return self.mixtures[(ue, order)]
        except KeyError:
            raise DomainError(
                f"no fitted mixture for UE {ue} order {order}; call with_fitted_mixtures"
            ) from None


class UeErrorTerms(NamedTuple):
    """Branch probabilities behind one user's composed error probability."""

    first_position: float
    second_correct: float
    second_incorrect: float
    other_first: float
    order_prob_first: float

    @property
    def second_position(self) -> float:
        return (self.second_correct * (1.0 - self.other_first)
                + self.second_incorrect * self.other_first)

    @property
    def total(self) -> float:
        return compose_ue_error(self.first_position, self.second_correct,
                                self.second_incorrect, self.other_first,
                                self.order_prob_first)


def _terms_distance_sum(m: int, d: float, per_term: Callable[[float], float]) -> float:
    table = error_distance_table(m)
    acc = 0.0
    for (w, coeff) in table.ber_terms:
        acc += w * per_term(coeff * d)
    return table.ber_prefactor * acc


def _first_position_error(scn: TwoUserScenario, ue: int, n0: float) -> float:
    other = 2 if ue == 1 else 1
    d = scaling_factor(scn.modulation(ue), scn.eb)
    sc = scn.effective_weak_scale
    combos = enumerate_combinations(1, (scn.modulation(ue), scn.modulation(other)), scn.eb)
    mix = scn.mixture(other, 2)
    acc = 0.0
    for combo in combos:
        x_m = combo.interferers[0]

        def term(delta: float, x_m=x_m) -> float:
            ctx = PepContext(p_first=scn.p_first, p_second=scn.p_second, n0=n0,
                             sigma_n=scn.sigma(ue), sigma_m=sc, delta_n=delta,
                             interferer=x_m, mixture=mix)
            return pep_first(ctx)

        acc += _terms_distance_sum(scn.modulation(ue), d, term)
    return acc / len(combos)


def _second_position_branches(scn: TwoUserScenario, ue: int, n0: float) -> tuple[float, float]:
    other = 2 if ue == 1 else 1
    d = scaling_factor(scn.modulation(ue), scn.eb)
    sc = scn.effective_weak_scale
    correct = _terms_distance_sum(
        scn.modulation(ue), d,
        lambda delta: pep_second_correct(delta, sc, scn.p_second, n0))
    combos = enumerate_combinations(2, (scn.modulation(other), scn.modulation(ue)), scn.eb)
    mix = scn.mixture(other, 1)
    acc = 0.0
    for combo in combos:
        res = combo.residuals[0]

        def term(delta: float, res=res) -> float:
            ctx = PepContext(p_first=scn.p_first, p_second=scn.p_second, n0=n0,
                             sigma_n=sc, sigma_m=scn.sigma(other), delta_n=delta,
                             residual=res, mixture=mix)
            return pep_second_incorrect(ctx)

        acc += _terms_distance_sum(scn.modulation(ue), d, term)
    incorrect = acc / len(combos)
    return correct, incorrect


def theory_ue_terms(scn: TwoUserScenario, ue: int, n0: float) -> UeErrorTerms:
    """All branch probabilities of one user's theoretical error rate."""
    if ue not in (1, 2):
        raise DomainError("ue must be 1 or 2")
    other = 2 if ue == 1 else 1
    first = _first_position_error(scn, ue, n0)
    other_first = _first_position_error(scn, other, n0)
    corr, inc = _second_position_branches(scn, ue, n0)
    w = order_probability(scn.sigma(ue), scn.sigma(other))
    return UeErrorTerms(first_position=first, second_correct=corr,
                        second_incorrect=inc, other_first=other_first,
                        order_prob_first=w)


def theory_ber(scn: TwoUserScenario, ue: int, n0: float) -> float:
    """Theoretical bit error rate of one user under dynamic ordering."""
    return theory_ue_terms(scn, ue, n0).total


# --------------------------------------------------------------------------
# fixed-order baseline (average-gain order, no ordering mixture)


def _fixed_pep_first_stage(scn: TwoUserScenario, strong: int, n0: float) -> float:
    weak = 2 if strong == 1 else 1
    d = scaling_factor(scn.modulation(strong), scn.eb)
    mix = unconditional_real_part_mixture(scn.sigma(weak))
    combos = enumerate_combinations(1, (scn.modulation(strong), scn.modulation(weak)), scn.eb)
    acc = 0.0
    ledger = TermLedger()
    for combo in combos:
        x_m = combo.interferers[0]
        t = 2.0 * math.sqrt(scn.p_second) * x_m
        scaled = [(a, t * b, abs(t * c), abs(c)) for (a, b, c) in mix.terms]

        def term(delta: float, t=t, scaled=scaled) -> float:
            abar = scn.p_first * delta**2 * scn.sigma(strong) ** 2
            kernels = ((1.0, abar),)
            return (_pep_kernel_mixture(n0, kernels, t, scaled, ledger,
                                        lambda i, _s: f"i={i}")
                    + _pep_kernel_mixture_negative_side(n0, kernels, t, scaled))

        acc += _terms_distance_sum(scn.modulation(strong), d, term)
    return acc / len(combos)


def _fixed_second_stage(scn: TwoUserScenario, weak: int, n0: float,
                        first_stage_error: float) -> float:
    strong = 2 if weak == 1 else 1
    d = scaling_factor(scn.modulation(weak), scn.eb)
    correct = _terms_distance_sum(
        scn.modulation(weak), d,
        lambda delta: pep_second_correct(delta, scn.sigma(weak), scn.p_second, n0))
    mix = unconditional_real_part_mixture(scn.sigma(strong))
    combos = enumerate_combinations(2, (scn.modulation(strong), scn.modulation(weak)), scn.eb)
    ledger = TermLedger()
    acc = 0.0
    for combo in combos:
        res = combo.residuals[0]
        t = 2.0 * math.sqrt(scn.p_first) * res
        scaled = [(a, t * b, abs(t * c), abs(c)) for (a, b, c) in mix.terms]

        def term(delta: float, t=t, scaled=scaled) -> float:
            abar = scn.p_second * delta**2 * scn.sigma(weak) ** 2
            kernels = ((1.0, abar),)
            return (_pep_kernel_mixture(n0, kernels, t, scaled, ledger,
                                        lambda i, _s: f"i={i}")
                    + _pep_kernel_mixture_negative_side(n0, kernels, t, scaled))

        acc += _terms_distance_sum(scn.modulation(weak), d, term)
    incorrect = acc / len(combos)
    return correct * (1.0 - first_stage_error) + incorrect * first_stage_error


def fixed_order_theory(scn: TwoUserScenario, n0: float) -> tuple[float, float]:
    """(UE1, UE2) theoretical error rates with the order frozen by average gain.

    The stronger-on-average user is always decoded first against the other
    user's unconditional statistics; no order-probability mixing occurs,
    which is what produces the high-SNR floor.
    """
    strong = 1 if scn.sigma1 >= scn.sigma2 else 2
    weak = 2 if strong == 1 else 1
    p_strong = _fixed_pep_first_stage(scn, strong, n0)
    p_weak = _fixed_second_stage(scn, weak, n0, p_strong)
    return (p_strong, p_weak) if strong == 1 else (p_weak, p_strong)


# --------------------------------------------------------------------------
# curves


class BerRow(NamedTuple):
    param: float
    ue: str
    mode: str
    source: str
    value: float
    ci95: float
    trials: int


@dataclass(frozen=True)
class BerCurve:
    """Per-user error-rate series over a parameter grid.

    ``ue`` values are "1"/"2" for aggregates and "1|case1" style for curves
    conditioned on the realized ordering (case1 = |h1| >= |h2|).  Empty
    conditioning buckets carry NaN values with zero trials.
    """

    grid: tuple[float, ...]
    rows: tuple[BerRow, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise DomainError("parameter grid must be strictly increasing")
        for row in self.rows:
            if not math.isnan(row.value) and not (0.0 <= row.value <= 1.0):
                raise DomainError(f"probability out of range in row {row!r}")

    def series(self, ue: str, mode: str, source: str) -> np.ndarray:
        out = np.full(len(self.grid), np.nan)
        index = {p: i for i, p in enumerate(self.grid)}
        for row in self.rows:
            if (row.ue, row.mode, row.source) == (ue, mode, source):
                out[index[row.param]] = row.value
        return out

    def merged(self, other: "BerCurve") -> "BerCurve":
        if other.grid != self.grid:
            raise DomainError("cannot merge curves over different grids")
        return BerCurve(grid=self.grid, rows=self.rows + other.rows)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("param,ue,mode,source,value,ci95,trials\n")
            for r in self.rows:
                fh.write(f"{r.param!r},{r.ue},{r.mode},{r.source},"
                         f"{r.value!r},{r.ci95!r},{r.trials}\n")

    @classmethod
    def from_csv(cls, path) -> "BerCurve":
        rows = []
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "param,ue,mode,source,value,ci95,trials":
                raise DomainError(f"unexpected CSV header {header!r}")
            for line in fh:
                param, ue, mode, source, value, ci95, trials = line.strip().split(",")
                rows.append(BerRow(float(param), ue, mode, source,
                                   float(value), float(ci95), int(trials)))
        grid = tuple(sorted({r.param for r in rows}))
        return cls(grid=grid, rows=tuple(rows))


def theory_curve(scn: TwoUserScenario, ebn0_db: Sequence[float]) -> BerCurve:
    """Dynamic-order theory curve: aggregates plus ordering-conditioned buckets."""
    grid = tuple(float(v) for v in ebn0_db)
    rows: list[BerRow] = []
    for snr in grid:
        n0 = scn.eb / 10.0 ** (snr / 10.0)
        t1 = theory_ue_terms(scn, 1, n0)
        t2 = theory_ue_terms(scn, 2, n0)
        rows.append(BerRow(snr, "1", "dynamic", "theory", t1.total, 0.0, 0))
        rows.append(BerRow(snr, "2", "dynamic", "theory", t2.total, 0.0, 0))
        # case1: |h1| >= |h2|, so UE1 sits first and UE2 second
        rows.append(BerRow(snr, "1|case1", "dynamic", "theory", t1.first_position, 0.0, 0))
        rows.append(BerRow(snr, "2|case1", "dynamic", "theory", t2.second_position, 0.0, 0))
        rows.append(BerRow(snr, "1|case2", "dynamic", "theory", t1.second_position, 0.0, 0))
        rows.append(BerRow(snr, "2|case2", "dynamic", "theory", t2.first_position, 0.0, 0))
    return BerCurve(grid=grid, rows=tuple(rows))


def fixed_order_theory_curve(scn: TwoUserScenario, ebn0_db: Sequence[float]) -> BerCurve:
    """Fixed-order baseline curve (aggregate rows only)."""
    grid = tuple(float(v) for v in ebn0_db)
    rows: list[BerRow] = []
    for snr in grid:
        n0 = scn.eb / 10.0 ** (snr / 10.0)
        ue1, ue2 = fixed_order_theory(scn, n0)
        rows.append(BerRow(snr, "1", "fixed", "theory", ue1, 0.0, 0))
        rows.append(BerRow(snr, "2", "fixed", "theory", ue2, 0.0, 0))
    return BerCurve(grid=grid, rows=tuple(rows))
