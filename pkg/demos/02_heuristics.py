"""Compare H, TH-2 and the nearest-column rule with the optimum on random 4x7 bays."""
import numpy as np

from crp import InstanceSpec, generate_uniform, nearest_relocation, solve, tree_heuristic, z_h

spec = InstanceSpec(tiers=4, columns=7, fill=3)
rng = np.random.default_rng(1)

rows = []
for _ in range(200):
    bay = generate_uniform(spec, rng)
    z = solve(bay).z
    rows.append((z, z_h(bay), tree_heuristic(bay, 2).relocations, nearest_relocation(bay).relocations))
rows = np.array(rows)

z = rows[:, 0]
for i, name in enumerate(["H", "TH-2", "nearest"], start=1):
    gap = rows[:, i] - z
    print(f"{name:8s} optimal on {np.mean(gap == 0):6.1%}   mean extra relocations {gap.mean():.3f}")
print(f"mean z_opt = {z.mean():.2f}")
