"""Compare all five beamforming schemes on shared channel draws.

A scaled-down version of the full Monte-Carlo experiment: every scheme sees
the same channel realizations (paired comparison), and the printout shows
how the constrained architectures stack up against the unconstrained
digital reference as frequency selectivity grows.

Run:  python demos/demo_scheme_comparison.py        (about a minute)
"""

import dataclasses

from milacbeam import SolverOptions, total_power_for_snr_db
from milacbeam.harness import (SCHEME_RUNNERS, _solver_rng,
                               default_system_config, trial_seed)
from milacbeam.channel import generate_channel, generate_pdp, rms_delay_spread

schemes = ("digital", "hybrid-milac", "milac-only", "hybrid-ps", "analog-ps")
base = default_system_config(small=True, seed=5)
base = dataclasses.replace(base, n_users=4, n_rf=4,
                           total_power=total_power_for_snr_db(base.n_subcarriers, 5.0))
opts = SolverOptions(max_outer=60, outer_tol=1e-4)
trials = 5

print(f"N={base.n_subcarriers} subcarriers, N_T={base.n_tx} antennas, "
      f"K={base.n_users} users, N_RF={base.n_rf} chains, SNR 5 dB, "
      f"{trials} paired trials\n")
header = "decay  tau/Ts " + "".join(f"{s:>14}" for s in schemes)
print(header)
for si, eps in enumerate((0.1, 1.0, 4.0)):
    cfg = dataclasses.replace(base, pdp_decay=eps)
    sums = {s: 0.0 for s in schemes}
    for t in range(trials):
        tseed = trial_seed(cfg.seed, si, t)
        chan = generate_channel(cfg, tseed)
        for s in schemes:
            rate, _ = SCHEME_RUNNERS[s](cfg, chan, opts, _solver_rng(tseed))
            sums[s] += rate
    tau = rms_delay_spread(generate_pdp(cfg.n_taps, eps))
    row = f"{eps:>5} {tau:7.3f}"
    for s in schemes:
        row += f"{sums[s] / trials:14.3f}"
    print(row)

print("\nrates in bits/s/Hz; the digital column is the unconstrained reference")
