"""Blocking containers in a random column, and how z_H / S0 shrinks as the bay widens."""
import numpy as np

from crp.analysis import alpha, block_dist, convergence_experiment, fit_inverse_c, k_const, special_column_check

for h in range(1, 6):
    p = block_dist(h).p
    print(f"h={h}  alpha={float(alpha(h)):.4f}  p_k =", ", ".join(str(x) for x in p))

rows = convergence_experiment(3, 4, [5, 10, 20, 40], samples=2000, seed=0)
print("\n  C   E[S0]   E[zH]   ratio   diff")
for r in rows:
    print(f"{r.C:3d} {r.mean_s0:7.2f} {r.mean_zH:7.2f} {r.ratio:7.4f} {r.diff:6.3f}")
c, r2 = fit_inverse_c(rows)
print(f"ratio - 1 ~ {c:.2f}/C  (R^2 {r2:.3f})")

# the proven envelope f(C) = 1 + K/C has a huge constant
K = k_const(3, 4, 1.0)
print(f"K = {K:.3e}, so f(C) < 1.01 only once C > {100 * K:.1e}")

sc = special_column_check(2, 8, 50_000, np.random.default_rng(3))
print(f"\nh=2, C=8: no special column in {sc.frequency:.4f} of bays (bound {sc.bound:.4f})")
