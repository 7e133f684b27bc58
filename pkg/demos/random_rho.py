"""Discrepancy of random 3-uniform hypergraphs against the concentration threshold."""

import math

from specmix import random_rho_experiment, rho_envelope

n, k, alpha, seeds = 10, 3, 0.5, 20
rep = random_rho_experiment(n, k, alpha, seeds, estimate=False)
env = rho_envelope(n, k, 1, alpha)
values = sorted(r["rho"] for r in rep.details["rows"])
print(f"deterministic lower bound {env.witness_lower:.4f}")
print(f"concentration threshold   {env.hoeffding_threshold:.4f} (without ln 2: {math.sqrt((n * math.log(4) + n) / 2):.4f})")
print(f"rho over {seeds} seeds: min {values[0]:.4f}  median {values[seeds // 2]:.4f}  max {values[-1]:.4f}")
