"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s -v`` to see every line live.
Tolerances are pinned here and nowhere else.  Criteria that compare the
closed-form theory against the physical link simulator hold wherever the
framework's independence approximation is mild (large power separation);
where they cannot hold, the failure is reported as-is rather than loosened.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from noma_sic.analytic import (PepContext, TwoUserScenario,
                               exact_real_part_mixture, pdf_z_first, pdf_z_second,
                               pep_first, pep_second_correct, pep_second_incorrect,
                               theory_ber, theory_ue_terms)
from noma_sic.channel import (ChannelParams, conditional_weak_scale,
                              order_probability, order_statistic_cdf,
                              pdf_ordered_gain_strong, pdf_ordered_gain_weak,
                              sample_conditioned_real_part)
from noma_sic.gaussfit import fit_mixture
from noma_sic.numerics import histogram_pdf, integrate_semi_infinite, q_chiani
from noma_sic.simcore import SimConfig, run_curve

S1 = 10.0                    # sigma_1^2 = 100 (20 dB)
S2 = 2.5                     # sigma_2^2 = 6.25 (7.96 dB)
SC = conditional_weak_scale(S1, S2)


def report(num: int, name: str, ok: bool, detail: str, t0: float,
           budget_s: float | None = None) -> None:
    elapsed = time.monotonic() - t0
    if budget_s is not None and elapsed > budget_s:
        ok = False
        detail += f"; runtime {elapsed:.0f}s exceeded budget {budget_s:.0f}s"
    status = "PASS" if ok else "FAIL"
    print(f"\ncriterion {num:2d} ({name}): {status} [{elapsed:.1f}s] {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


@pytest.fixture(scope="module")
def fig3_scenario():
    scn = TwoUserScenario(sigma1=S1, sigma2=S2, p_first=0.6, p_second=0.4, m1=2, m2=2)
    return scn.with_fitted_mixtures(np.random.default_rng(202), n_samples=400_000)


def test_criterion_01_order_probability():
    t0 = time.monotonic()
    formula = order_probability(S1, S2)
    rng = np.random.default_rng(1)
    n = 1_000_000
    h1 = (S1 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    h2 = (S2 / math.sqrt(2)) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    freq = float(np.mean(np.abs(h1) >= np.abs(h2)))
    ok = abs(formula - 0.941176) <= 1e-6 and abs(freq - formula) <= 0.002
    report(1, "order probability", ok,
           f"formula={formula:.6f}, MC={freq:.6f}, |diff|={abs(freq - formula):.2e}", t0, budget_s=5)


def test_criterion_02_correct_branch_oracle():
    t0 = time.monotonic()
    worst = 0.0
    for gamma in (0.1, 1.0, 4.0, 10.0, 100.0):
        delta, sigma, p2 = 2.0, 3.0, 0.4
        n0 = p2 * delta**2 * sigma**2 / gamma
        ctx = PepContext(p_first=0.6, p_second=p2, n0=n0, sigma_n=sigma,
                         sigma_m=sigma, delta_n=delta)
        closed = pep_second_correct(delta, sigma, p2, n0)
        quad = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_second(z, ctx, True))
        worst = max(worst, abs(closed - quad) / quad)
    report(2, "correct-branch closed form vs quadrature", worst <= 1e-9,
           f"worst relative gap {worst:.2e} over gamma grid", t0, budget_s=1)


def test_criterion_03_pep_oracle_grid():
    t0 = time.monotonic()
    mix_weak = exact_real_part_mixture(S2, S1, 2)
    mix_strong = exact_real_part_mixture(S1, S2, 1)
    worst = 0.0
    worst_at = ""
    for snr in (0.0, 10.0, 20.0, 30.0, 40.0):
        n0 = 10 ** (-snr / 10)
        for ratio in (2.0, 4.0, 8.0, 12.0, 16.0):
            p2 = 1 / (1 + 10 ** (ratio / 10))
            p1 = 1 - p2
            ctx1 = PepContext(p_first=p1, p_second=p2, n0=n0, sigma_n=S1, sigma_m=SC,
                              delta_n=2.0, interferer=1.0, mixture=mix_weak)
            q1 = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_first(z, ctx1))
            r1 = abs(pep_first(ctx1) - q1) / q1
            ctx2 = PepContext(p_first=p1, p_second=p2, n0=n0, sigma_n=SC, sigma_m=S1,
                              delta_n=2.0, residual=2.0, mixture=mix_strong)
            q2 = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_second(z, ctx2, False))
            r2 = abs(pep_second_incorrect(ctx2) - q2) / q2
            if max(r1, r2) > worst:
                worst = max(r1, r2)
                worst_at = f"snr={snr} ratio={ratio}"
    report(3, "first/second-incorrect closed forms vs quadrature", worst <= 1e-6,
           f"worst relative gap {worst:.2e} at {worst_at} (5x5 grid)", t0, budget_s=30)


def test_criterion_04_gaussian_fit_regression():
    t0 = time.monotonic()
    params = ChannelParams((S1, S2))
    rng = np.random.default_rng(4)
    results = {}
    for ue, (a_ref, c_ref) in ((1, (0.2329, 2.422)), (2, (0.2326, 2.426))):
        samples = sample_conditioned_real_part(ue, 2, params, rng, 1_000_000)
        mix, _ = fit_mixture(histogram_pdf(samples, padding=0.05), 1)
        a, _b, c = mix.terms[0]
        results[ue] = (a, c, abs(a - a_ref) <= 0.01 and abs(c - c_ref) <= 0.05)
    ok = all(v[2] for v in results.values())
    detail = ", ".join(f"UE{ue}: a={v[0]:.4f}, c={v[1]:.4f}" for ue, v in results.items())
    report(4, "weak-order real-part fit regression", ok, detail, t0, budget_s=60)


def _bucket_pairs(theory_terms, sim_curve, idx):
    t1, t2 = theory_terms
    pairs = {
        "1": (t1.total, sim_curve.series("1", "dynamic", "sim")[idx]),
        "2": (t2.total, sim_curve.series("2", "dynamic", "sim")[idx]),
        "1|case1": (t1.first_position, sim_curve.series("1|case1", "dynamic", "sim")[idx]),
        "2|case1": (t2.second_position, sim_curve.series("2|case1", "dynamic", "sim")[idx]),
        "1|case2": (t1.second_position, sim_curve.series("1|case2", "dynamic", "sim")[idx]),
        "2|case2": (t2.first_position, sim_curve.series("2|case2", "dynamic", "sim")[idx]),
    }
    return pairs


def test_criterion_05_fig3_reproduction(fig3_scenario):
    t0 = time.monotonic()
    grid = tuple(float(v) for v in range(0, 31, 5))
    cfg = SimConfig(channel=ChannelParams((S1, S2)), p_first=0.6, p_second=0.4,
                    m1=2, m2=2, ebn0_db=grid, trials=1_000_000, seed=5)
    sim = run_curve(cfg)
    failures = []
    worst = 0.0
    for idx, snr in enumerate(grid):
        n0 = 10 ** (-snr / 10)
        terms = (theory_ue_terms(fig3_scenario, 1, n0), theory_ue_terms(fig3_scenario, 2, n0))
        for tag, (thr, simv) in _bucket_pairs(terms, sim, idx).items():
            if not np.isfinite(simv) or simv <= 1e-4:
                continue
            rel = abs(thr - simv) / simv
            worst = max(worst, rel)
            if rel > 0.15:
                failures.append(f"{tag}@{snr:.0f}dB thr={thr:.3e} sim={simv:.3e} rel={rel:.0%}")
    detail = (f"worst gated deviation {worst:.0%}; "
              + (f"violations: {'; '.join(failures[:4])}"
                 + (f" (+{len(failures) - 4} more)" if len(failures) > 4 else "")
                 if failures else "all gated points within 15%"))
    report(5, "reference BPSK curve reproduction", not failures, detail, t0, budget_s=300)


def _knee(m: int, grid, trials: int, seed: int) -> float:
    s1g, s2g = 10 ** (10 / 20), 1.0   # sigma^2 = 10 dB / 0 dB
    scn = TwoUserScenario(sigma1=s1g, sigma2=s2g, p_first=0.6, p_second=0.4, m1=m, m2=m)
    scn = scn.with_fitted_mixtures(np.random.default_rng(60 + m), n_samples=250_000)
    n0 = 10 ** (-2.0)
    for r in grid:
        p2 = 1 / (1 + 10 ** (r / 10))
        theory = theory_ber(replace(scn, p_first=1 - p2, p_second=p2), 1, n0)
        cfg = SimConfig(channel=ChannelParams((s1g, s2g)), p_first=1 - p2, p_second=p2,
                        m1=m, m2=m, ebn0_db=(20.0,), trials=trials, seed=seed)
        simv = run_curve(cfg).series("1", "dynamic", "sim")[0]
        if simv <= 2 * theory:
            return float(r)
    return float("inf")


def test_criterion_06_power_ratio_knees():
    t0 = time.monotonic()
    targets = {2: (1.63, 1.0), 4: (4.33, 1.0), 16: (12.61, 2.0), 64: (19.05, 2.0)}
    grids = {2: np.arange(0.25, 8.01, 0.25), 4: np.arange(0.25, 8.01, 0.25),
             16: np.arange(8.0, 17.01, 0.5), 64: np.arange(13.0, 23.01, 0.5)}
    trials = {2: 400_000, 4: 400_000, 16: 100_000, 64: 100_000}
    rows = []
    ok = True
    for m, (target, tol) in targets.items():
        knee = _knee(m, grids[m], trials[m], seed=600 + m)
        good = abs(knee - target) <= tol
        ok = ok and good
        rows.append(f"M={m}: knee={knee:.2f} dB (target {target}+-{tol})"
                    + ("" if good else " <-"))
    report(6, "power-ratio agreement knees", ok, "; ".join(rows), t0, budget_s=600)


def test_criterion_07_channel_gap_validity():
    t0 = time.monotonic()
    s2g = 10 ** (10 / 20)
    n0 = 10 ** (-2.0)
    failures = []
    for m in (2, 4):
        sims1, cis1 = [], []
        for gap in range(10, 41, 4):
            s1g = 10 ** ((10 + gap) / 20)
            scn = TwoUserScenario(sigma1=s1g, sigma2=s2g, p_first=0.99, p_second=0.01,
                                  m1=m, m2=m)
            scn = scn.with_fitted_mixtures(np.random.default_rng(70 + gap),
                                           n_samples=150_000)
            cfg = SimConfig(channel=ChannelParams((s1g, s2g)), p_first=0.99,
                            p_second=0.01, m1=m, m2=m, ebn0_db=(20.0,),
                            trials=600_000, seed=700 + gap)
            sim = run_curve(cfg)
            for ue in (1, 2):
                thr = theory_ber(scn, ue, n0)
                simv = sim.series(str(ue), "dynamic", "sim")[0]
                if simv > 1e-4 and abs(thr - simv) / simv > 0.20:
                    failures.append(f"M={m} UE{ue} gap={gap} thr={thr:.2e} sim={simv:.2e}")
            row1 = next(r for r in sim.rows if r.ue == "1")
            sims1.append(row1.value)
            cis1.append(row1.ci95)
        for i in range(len(sims1) - 1):
            if sims1[i + 1] > sims1[i] + 2 * (cis1[i] + cis1[i + 1]):
                failures.append(f"M={m} UE1 BER not nonincreasing at step {i}")
    report(7, "channel-gap validity", not failures,
           "; ".join(failures) if failures else
           "theory within 20% at all measurable gaps >= 10 dB; UE1 monotone", t0, budget_s=300)


def test_criterion_08_error_floor_dichotomy():
    t0 = time.monotonic()
    base = dict(channel=ChannelParams((S1, S2)), p_first=0.6, p_second=0.4,
                m1=2, m2=2, ebn0_db=(35.0, 45.0))
    fixed = run_curve(SimConfig(trials=1_000_000, seed=8, sic_mode="fixed", **base))
    dyn = run_curve(SimConfig(trials=6_000_000, seed=9, **base))
    f1 = fixed.series("1", "fixed", "sim")
    floor_ok = abs(f1[1] - f1[0]) / f1[0] < 0.20
    # the dynamic error is carried by the worse user (UE 2) at these SNRs
    d = np.nanmax([dyn.series("1", "dynamic", "sim"), dyn.series("2", "dynamic", "sim")],
                  axis=0)
    drop_ok = d[0] / d[1] >= 5.0
    report(8, "error-floor dichotomy", floor_ok and drop_ok,
           f"fixed UE1 {f1[0]:.3e}->{f1[1]:.3e}; dynamic worst-UE {d[0]:.3e}->{d[1]:.3e} "
           f"({d[0] / d[1]:.1f}x)", t0, budget_s=300)


def test_criterion_09_order_statistic_cdf():
    t0 = time.monotonic()
    sigmas = (1.0, 2.0, 3.0)
    cdfs = [lambda x, s=s: 1 - math.exp(-(x / s) ** 2) for s in sigmas]
    rng = np.random.default_rng(9)
    n = 1_000_000
    draws = np.abs((np.array(sigmas)[None, :] / math.sqrt(2))
                   * (rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))))
    ordered = np.sort(draws, axis=1)
    xs = np.linspace(0.3, 4.0, 10)
    worst = 0.0
    for r in (1, 2, 3):
        for x in xs:
            got = order_statistic_cdf(float(x), r, cdfs)
            want = float(np.mean(ordered[:, r - 1] <= x))
            worst = max(worst, abs(got - want))
    report(9, "order-statistic CDF vs sort-and-count", worst <= 2e-3,
           f"worst |CDF - MC| = {worst:.2e} over ranks 1..3 x 10 grid points", t0, budget_s=30)


def test_criterion_10_normalization_suite(fig3_scenario):
    t0 = time.monotonic()
    exact_tol, fit_tol = 1e-6, 0.02
    checks = []

    def add(name, value, tol):
        checks.append((name, value, tol, abs(value - 1.0) <= tol))

    add("ordered strong (raw scales)",
        integrate_semi_infinite(lambda x: pdf_ordered_gain_strong(x, S1, S2)), exact_tol)
    add("ordered strong (conditional scales)",
        integrate_semi_infinite(lambda x: pdf_ordered_gain_strong(x, S1, SC)), exact_tol)
    add("ordered weak", integrate_semi_infinite(lambda x: pdf_ordered_gain_weak(x, SC)),
        exact_tol)
    for sig in (S1, S2):
        add(f"rayleigh marginal sigma={sig}",
            integrate_semi_infinite(lambda x: pdf_ordered_gain_weak(x, sig)), exact_tol)
    n0 = 0.1
    ctx1 = PepContext(p_first=0.6, p_second=0.4, n0=n0, sigma_n=S1, sigma_m=SC,
                      delta_n=2.0, interferer=1.0, mixture=fig3_scenario.mixture(2, 2))
    z1 = (integrate_semi_infinite(lambda z: pdf_z_first(z, ctx1))
          + integrate_semi_infinite(lambda z: pdf_z_first(-z, ctx1)))
    add("first-order decision density (fit)", z1, fit_tol)
    ctx2 = PepContext(p_first=0.6, p_second=0.4, n0=n0, sigma_n=SC, sigma_m=S1,
                      delta_n=2.0, residual=2.0, mixture=fig3_scenario.mixture(1, 1))
    z2 = (integrate_semi_infinite(lambda z: pdf_z_second(z, ctx2, False))
          + integrate_semi_infinite(lambda z: pdf_z_second(-z, ctx2, False)))
    add("second-order incorrect density (fit)", z2, fit_tol)
    add("second-order correct density",
        integrate_semi_infinite(lambda z: pdf_z_second(z, ctx2, True)), exact_tol)
    bad = [f"{n}={v:.6f}" for (n, v, _t, okv) in checks if not okv]
    report(10, "density normalization suite", not bad,
           "; ".join(bad) if bad else f"all {len(checks)} densities within tolerance", t0, budget_s=10)


def _hetero_case(m1, m2, seed):
    scn = TwoUserScenario(sigma1=S1, sigma2=S2, p_first=0.9, p_second=0.1, m1=m1, m2=m2)
    scn = scn.with_fitted_mixtures(np.random.default_rng(seed), n_samples=300_000)
    grid = tuple(float(v) for v in range(0, 31, 5))
    cfg = SimConfig(channel=ChannelParams((S1, S2)), p_first=0.9, p_second=0.1,
                    m1=m1, m2=m2, ebn0_db=grid, trials=1_000_000, seed=seed)
    sim = run_curve(cfg)
    failures = []
    for idx, snr in enumerate(grid):
        n0 = 10 ** (-snr / 10)
        for ue in (1, 2):
            thr = theory_ber(scn, ue, n0)
            simv = sim.series(str(ue), "dynamic", "sim")[idx]
            if simv > 1e-4 and abs(thr - simv) / simv > 0.20:
                failures.append(f"UE{ue}@{snr:.0f}dB thr={thr:.2e} sim={simv:.2e}")
    # no-floor check at 35/45 dB, dynamic mode
    floor_cfg = SimConfig(channel=ChannelParams((S1, S2)), p_first=0.9, p_second=0.1,
                          m1=m1, m2=m2, ebn0_db=(35.0, 45.0), trials=2_000_000,
                          seed=seed + 1)
    d = run_curve(floor_cfg)
    worst = np.nanmax([d.series("1", "dynamic", "sim"), d.series("2", "dynamic", "sim")],
                      axis=0)
    if not worst[0] / max(worst[1], 1e-12) >= 5.0:
        failures.append(f"dynamic floor: {worst[0]:.2e} -> {worst[1]:.2e}")
    return failures


def test_criterion_11_heterogeneous_configs():
    t0 = time.monotonic()
    f1 = [f"C1 {m}" for m in _hetero_case(4, 2, seed=1101)]
    f2 = [f"C2 {m}" for m in _hetero_case(16, 4, seed=1102)]
    failures = f1 + f2
    report(11, "heterogeneous configurations", not failures,
           "; ".join(failures[:6]) + (f" (+{len(failures) - 6} more)" if len(failures) > 6
                                      else "") if failures else
           "both configs within 20% at gated points; no dynamic floor", t0, budget_s=600)
