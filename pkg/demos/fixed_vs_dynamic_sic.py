"""Error-floor dichotomy: fixed vs dynamic decoding order.

Freezing the decoding order by average channel gain leaves the first user
interference-limited whenever instantaneous fading flips the order, so its
BER floors at high SNR (and the second user paradoxically overtakes it).
Adapting the order per realization removes the floor.  Both effects appear
in the simulator and in the theory baselines.

Run:  python3 demos/fixed_vs_dynamic_sic.py
"""

import numpy as np

from noma_sic import (ChannelParams, SimConfig, TwoUserScenario, fixed_order_theory,
                      run_curve, theory_ber)

S1 = 10 ** (20 / 20)
S2 = 10 ** (7.96 / 20)
GRID = (10.0, 20.0, 30.0, 40.0, 45.0)
TRIALS = 1_500_000

scn = TwoUserScenario(sigma1=S1, sigma2=S2, p_first=0.6, p_second=0.4, m1=2, m2=2)
scn = scn.with_fitted_mixtures(np.random.default_rng(5), n_samples=300_000)

sim_dyn = run_curve(SimConfig(channel=ChannelParams((S1, S2)), p_first=0.6,
                              p_second=0.4, m1=2, m2=2, ebn0_db=GRID,
                              trials=TRIALS, seed=11))
sim_fix = run_curve(SimConfig(channel=ChannelParams((S1, S2)), p_first=0.6,
                              p_second=0.4, m1=2, m2=2, ebn0_db=GRID,
                              trials=TRIALS, seed=11, sic_mode="fixed"))

print(f"{'Eb/N0':>6} {'fixed thr UE1':>14} {'fixed sim UE1':>14} "
      f"{'dyn thr UE1':>12} {'dyn sim UE1':>12} {'dyn sim UE2':>12}")
for i, snr in enumerate(GRID):
    n0 = 10 ** (-snr / 10)
    f1, _f2 = fixed_order_theory(scn, n0)
    print(f"{snr:>6.0f} {f1:14.3e} {sim_fix.series('1', 'fixed', 'sim')[i]:14.3e} "
          f"{theory_ber(scn, 1, n0):12.3e} "
          f"{sim_dyn.series('1', 'dynamic', 'sim')[i]:12.3e} "
          f"{sim_dyn.series('2', 'dynamic', 'sim')[i]:12.3e}")
print("\nfixed order floors near 1e-2 while the dynamic curves keep falling.")
