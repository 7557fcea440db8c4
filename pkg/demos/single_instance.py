"""Walk one random network through every scheme and compare the designs.

Run from the repository root:

    python3 demos/single_instance.py [seed]
"""

import sys

import numpy as np

from relaysec import chansim, distributed, dps, model, sps
from relaysec.chansim import RngSpec
from relaysec.harness import ExperimentConfig
from relaysec.model import JammingCovariance

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 3
cfg = ExperimentConfig(N=4, K=2)
params = cfg.system_params()
topo, channels = chansim.sample_scenario(params, cfg.R, RngSpec(cfg.master_seed, seed))

print(f"N={params.n_relays} relays, K={params.k_eves} eavesdroppers, "
      f"Ps={params.ps_w:.1f} W, seed {seed}")
print(f"relay positions:\n{np.round(topo.relay_pos, 2)}")

rows = []

nocj_s = sps.solve_p1(params, channels, 0.5, no_cj=True)
rows.append(("NoCJ-SPS", nocj_s.rate, nocj_s.solve_count))

cj_s = sps.solve_p1(params, channels, 0.5)
rows.append(("CJ-SPS", cj_s.rate, cj_s.solve_count))

nocj_d = dps.solve_p2_prime(params, channels, JammingCovariance.zeros(params.n_relays))
rows.append(("NoCJ-DPS", nocj_d.rate, nocj_d.solve_count))

cj_d = dps.alternate(params, channels, nocj=nocj_d)
rows.append(("CJ-DPS", cj_d.rate, cj_d.solve_count))

for mode, name in (("sps", "Distributed-SPS"), ("dps", "Distributed-DPS")):
    pol, S, rate = distributed.run_distributed(params, channels, mode)
    rows.append((name, rate, 0))

print(f"\n{'scheme':<16} {'secrecy':>9} {'dest':>7} {'worst eve':>9} {'solves':>6}")
for name, rate, solves in rows:
    print(f"{name:<16} {rate.r_sec:9.4f} {rate.r_sd:7.4f} {rate.max_r_se:9.4f} {solves:6d}")

print(f"\nalternating trace (incumbent rate per outer pass):")
print("  " + " -> ".join(f"{r:.4f}" for r in cj_d.trace))
print(f"status={cj_d.status}, outer iterations={cj_d.outer_iterations}")

alpha = cj_d.policy.alpha
rho = cj_d.policy.rho
print(f"\nCJ-DPS splits per relay:")
print(f"  alpha (harvest fraction): {np.round(alpha, 3)}")
print(f"  rho (jamming share):      {np.round(rho, 3)}")
slack = model.jamming_budget_slack(params, channels, cj_d.policy, cj_d.S)
print(f"  budget slack (W, >=0 means feasible): {slack}")
w = np.linalg.eigvalsh(cj_d.S.S)
print(f"  jamming covariance eigenvalues (W): {w}")
