"""Sample sizes and loss bounds for the sampled two-stage search."""
from crp import SamplingParams, error_bound_e1_e2, error_bound_e3, sample_size

for delta in (0.1, 0.5, 1.0):
    for eps in (0.01, 0.05, 0.1):
        p = SamplingParams(delta, eps, r_max=63)
        print(f"delta={delta:<4} eps={eps:<5} samples={sample_size(p):>9,d}  E[e1], E[e2] <= {error_bound_e1_e2(p):.3f}")

p = SamplingParams(0.5, 0.05)
print()
for C in (10, 30, 50):
    N = 3 * C
    print(f"C={C}: pruning at 5 earlier steps costs at most {error_bound_e3(p, 5, 1.0, 2 * N):.2f} relocations")
