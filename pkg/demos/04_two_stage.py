"""Partially known retrieval order: ASA* against the myopic rule and full information."""
import numpy as np

from crp import InstanceSpec, SamplingParams, TwoStageInstance, asa_star, generate_uniform, myopic_heuristic, solve
from crp.stochastic import info_levels, realized_cost

spec = InstanceSpec(4, 7, 3)
rng = np.random.default_rng(11)
bay = generate_uniform(spec, rng)
t_star = 7
print(bay, "\n")

z_full = solve(bay).z
print("full information:", z_full)
params = SamplingParams(delta=0.5, eps=0.05, max_samples=20)
for k in info_levels(21, [0.25, 0.5, 0.9]):
    inst = TwoStageInstance(bay, k, t_star)
    res = asa_star(inst, params, prune_times=range(1, t_star - 1), rng=rng)
    mh = myopic_heuristic(bay, k, t_star).relocations
    print(f"known={k:2d}  ASA* estimate {res.expected_cost:5.2f}  realized {realized_cost(inst, res.moves):2d}"
          f"  myopic {mh:2d}  paths kept {res.leaves}  pruned at {res.ledger.m} steps")
