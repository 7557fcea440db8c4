"""Average secrecy rate vs. number of eavesdroppers, jamming on vs. off.

A scaled-down version of the kind of campaign the CLI runs; a few dozen
realizations are enough to see the gap widen with K.

    python3 demos/eavesdropper_sweep.py
"""

import numpy as np

from relaysec.harness import ExperimentConfig, run_experiment

cfg = ExperimentConfig(N=6, K=2, realizations=20, master_seed=2024,
                       schemes=("CJ-SPS", "NoCJ-SPS", "Distributed-SPS"),
                       sweep_axis="K", sweep_values=(1, 2, 4, 6))
print(f"N={cfg.N}, {cfg.realizations} realizations per point, fixed split 0.5")

records = run_experiment(cfg)
bad = [r for r in records if r.status not in ("optimal", "zero-rate")]
if bad:
    print(f"warning: {len(bad)} failed records")

print(f"\n{'K':>3} {'CJ-SPS':>9} {'NoCJ-SPS':>9} {'gap':>7} {'Distributed':>11}")
for k in cfg.sweep_values:
    sel = {}
    for s in cfg.schemes:
        vals = [r.secrecy_rate_bits for r in records
                if r.scheme == s and r.sweep_value == k]
        sel[s] = float(np.mean(vals))
    gap = sel["CJ-SPS"] - sel["NoCJ-SPS"]
    print(f"{k:3d} {sel['CJ-SPS']:9.4f} {sel['NoCJ-SPS']:9.4f} {gap:7.4f} "
          f"{sel['Distributed-SPS']:11.4f}")

print("\njamming matters more as eavesdroppers multiply; the distributed")
print("rules keep a useful fraction of the centralized rate at zero solver cost.")
