"""Solve a small bay exactly and watch the search tree."""
import io

from crp import Bay, SolverConfig, gap_curve, s0, s_full, s_p, solve, z_h

# columns bottom to top; container 1 leaves first
bay = Bay(3, [[4, 1, 6], [2, 5], [3]])
print(bay)
print()

print("S0 =", s0(bay))
print("S_p for p = 0..3:", [s_p(bay, p) for p in range(4)])
print("S_N =", s_full(bay), " z_H =", z_h(bay))

# with only the counting bound the tree has to branch twice
buf = io.StringIO()
out = solve(bay, SolverConfig(lb_depth=0), trace=buf)
print("\nlevel,bay,L,U,action")
print(buf.getvalue(), end="")
print(f"z = {out.z}, nodes = {out.nodes}, gap = {out.gap}")

for m in out.moves:
    print("  ", m)

# the saturated look-ahead closes the gap at the root
print("\nwith S_N:", solve(bay).as_dict()["nodes"], "nodes")

# certified gap against the node budget
print("budget -> gap:", gap_curve(bay, [1, 2, 3, 4, 5, 6, 7], SolverConfig(lb_depth=0)))
