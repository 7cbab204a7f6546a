"""Closed-form pairwise error probabilities vs adaptive quadrature.

Every closed-form PEP equals the semi-infinite integral of the
two-exponential tail approximation against the matching decision-statistic
density.  This script evaluates both routes across an SNR sweep and prints
the relative gaps (machine-precision agreement) plus the named term ledger
of one evaluation for inspection.

Run:  python3 demos/closed_form_vs_quadrature.py
"""

from noma_sic import (PepContext, conditional_weak_scale, exact_real_part_mixture,
                      integrate_semi_infinite, pdf_z_first, pdf_z_second,
                      pep_first_ledger, pep_second_correct, pep_second_incorrect,
                      q_chiani)

S1 = 10.0
S2 = 2.5
SC = conditional_weak_scale(S1, S2)
P1, P2 = 0.6, 0.4

print(f"{'Eb/N0':>6} {'pep first':>12} {'rel gap':>9} {'pep 2nd inc':>12} "
      f"{'rel gap':>9} {'pep 2nd corr':>12} {'rel gap':>9}")
for snr in range(0, 41, 10):
    n0 = 10 ** (-snr / 10)
    ctx1 = PepContext(p_first=P1, p_second=P2, n0=n0, sigma_n=S1, sigma_m=SC,
                      delta_n=2.0, interferer=1.0,
                      mixture=exact_real_part_mixture(S2, S1, 2))
    v1, _ = pep_first_ledger(ctx1)
    q1 = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_first(z, ctx1))
    ctx2 = PepContext(p_first=P1, p_second=P2, n0=n0, sigma_n=SC, sigma_m=S1,
                      delta_n=2.0, residual=2.0,
                      mixture=exact_real_part_mixture(S1, S2, 1))
    v2 = pep_second_incorrect(ctx2)
    q2 = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_second(z, ctx2, False))
    v3 = pep_second_correct(2.0, SC, P2, n0)
    q3 = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_second(z, ctx2, True))
    print(f"{snr:>6} {v1:12.5e} {abs(v1 - q1) / q1:9.1e} "
          f"{v2:12.5e} {abs(v2 - q2) / q2:9.1e} "
          f"{v3:12.5e} {abs(v3 - q3) / q3:9.1e}")

print("\nterm ledger of the first-order evaluation at 10 dB:")
ctx = PepContext(p_first=P1, p_second=P2, n0=0.1, sigma_n=S1, sigma_m=SC,
                 delta_n=2.0, interferer=1.0,
                 mixture=exact_real_part_mixture(S2, S1, 2))
_, ledger = pep_first_ledger(ctx)
for name in sorted(ledger):
    print(f"    {name:14s} = {ledger[name]: .6e}")
