"""Batch experiments on uniform random bays.

Every experiment derives one seed per instance from a master seed, so the
output does not depend on the worker count or on completion order.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import stochastic as st
from .analysis import ratio_ci
from .astar import SolverConfig, _Search, gap_curve, solve
from .bay import InstanceSpec, generate_uniform, pop_retrievable
from .bounds import s_full
from .heuristics import myopic_heuristic, nearest_relocation, stacks_h, tree_heuristic

_INF = float("inf")


def _seeds(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


def pmap(fn, items, workers=1):
    """Ordered map, in worker processes when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def to_csv(rows, header=None):
    """Render dataclass rows (or dicts) as CSV text with fixed float formatting."""
    rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    if header is None:
        header = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if r[k] is None else (f"{r[k]:.6f}" if isinstance(r[k], float) else r[k])
                    for k in header])
    return buf.getvalue()


# -- complete information -------------------------------------------------------

def _bench_one(args):
    spec, ss, widths, budget = args
    bay = generate_uniform(spec, np.random.default_rng(ss))
    out = solve(bay, SolverConfig(node_budget=budget))
    row = {"z_opt": out.z, "solved": out.optimal, "H": stacks_h(bay.stacks, bay.tiers)}
    for w in widths:
        row[f"TH-{w}"] = tree_heuristic(bay, w).relocations
    return row


@dataclass(frozen=True)
class BenchmarkRow:
    heuristic: str
    solved: int
    gap0: float
    gap1: float
    gap2: float
    gap3plus: float
    pr: float


@dataclass
class BenchReport:
    rows: list
    instances: list
    excluded: int

    def row(self, name):
        return next(r for r in self.rows if r.heuristic == name)


def bench(spec, n, seed=0, widths=(2,), budget=400_000, workers=1):
    """Gap distribution and mean performance ratio of H and TH-L against A*.

    Instances where A* stops on the budget are excluded and counted.
    """
    per = pmap(_bench_one, [(spec, s, tuple(widths), budget) for s in _seeds(seed, n)], workers)
    solved = [r for r in per if r["solved"]]
    rows = []
    for name in ["H"] + [f"TH-{w}" for w in widths]:
        gaps = np.array([r[name] - r["z_opt"] for r in solved])
        if (gaps < 0).any():
            raise AssertionError(f"{name} beat the optimum")
        zo = np.array([r["z_opt"] for r in solved], float)
        pr = np.where(zo > 0, gaps / np.where(zo > 0, zo, 1), 0.0)
        k = max(len(gaps), 1)
        rows.append(BenchmarkRow(name, len(gaps), float((gaps == 0).sum() / k), float((gaps == 1).sum() / k),
                                 float((gaps == 2).sum() / k), float((gaps >= 3).sum() / k),
                                 float(pr.mean()) if len(pr) else 0.0))
    return BenchReport(rows, per, len(per) - len(solved))


def _lb_one(args):
    spec, ss, depths = args
    bay = generate_uniform(spec, np.random.default_rng(ss))
    row = {}
    for d in depths:
        search = _Search(bay, SolverConfig(node_budget=None, lb_depth=d))
        z, _, _ = search.run([_INF])[0]
        row[d] = search.nodes
        row["z_opt"] = int(z)
    root, _ = pop_retrievable(bay)
    row["root_gap"] = stacks_h(root.stacks, root.tiers) - s_full(root)
    row["level0_gap"] = row["z_opt"] - s_full(root)
    return row


@dataclass(frozen=True)
class NodeStats:
    depth: str
    mean: float
    q1: float
    median: float
    q3: float
    max: int


@dataclass
class LBReport:
    stats: list
    root_optimal_fraction: float
    level0_gap: float
    instances: list

    def mean_nodes(self, depth):
        key = "N" if depth is None else str(depth)
        return next(s.mean for s in self.stats if s.depth == key)


def lb_study(spec, n, seed=0, depths=(0, 1, 2, None), workers=1):
    """Nodes needed to prove optimality for each look-ahead depth (``None`` is S_N).

    Also reports the fraction of bays whose root gap ``z_H - S_N`` is zero and
    the mean of ``z_opt - S_N`` at the root.
    """
    per = pmap(_lb_one, [(spec, s, tuple(depths)) for s in _seeds(seed, n)], workers)
    stats = []
    for d in depths:
        v = np.array([r[d] for r in per])
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        stats.append(NodeStats("N" if d is None else str(d), float(v.mean()), float(q1),
                               float(med), float(q3), int(v.max())))
    root = float(np.mean([r["root_gap"] == 0 for r in per]))
    lvl0 = float(np.mean([r["level0_gap"] for r in per]))
    return LBReport(stats, root, lvl0, per)


def _path_one(args):
    spec, ss = args
    from .astar import optimal_path_lb_gap
    return optimal_path_lb_gap(generate_uniform(spec, np.random.default_rng(ss)))


def lb_convergence(spec, n, seed=0, workers=1):
    """Mean of ``z_opt(B^l) - S_N(B^l)`` along the optimal path, per level."""
    per = pmap(_path_one, [(spec, s) for s in _seeds(seed, n)], workers)
    depth = max(len(p) for p in per)
    out = []
    for lvl in range(depth):
        # paths that ended earlier have a zero gap from then on
        vals = [p[lvl][1] if lvl < len(p) else 0 for p in per]
        out.append({"level": lvl, "mean_gap": float(np.mean(vals))})
    return out


def _gap_one(args):
    spec, ss, budgets = args
    return [g for _, g in gap_curve(generate_uniform(spec, np.random.default_rng(ss)), budgets)]


def gap_study(spec, n, budgets, seed=0, workers=1):
    """Mean guaranteed gap and optimal fraction for each node budget."""
    budgets = sorted(budgets)
    per = np.array(pmap(_gap_one, [(spec, s, tuple(budgets)) for s in _seeds(seed, n)], workers))
    return [{"budget": b, "mean_gap": float(per[:, i].mean()), "optimal": float((per[:, i] == 0).mean())}
            for i, b in enumerate(budgets)]


def th_width_study(spec, n, widths=(1, 2, 3, 4, 5, 6), seed=0, budget=400_000, workers=1):
    rep = bench(spec, n, seed, widths=[w for w in widths if w > 1], budget=budget, workers=workers)
    out = []
    for w in widths:
        name = "H" if w == 1 else f"TH-{w}"
        out.append({"L": w, "pr": rep.row(name).pr, "optimal": rep.row(name).gap0})
    return out


# -- incomplete information -----------------------------------------------------

def _two_stage_one(args):
    spec, ss, levels, t_star, params, prune_times, clock = args
    rng = np.random.default_rng(ss)
    bay = generate_uniform(spec, rng)
    z_opt = solve(bay, SolverConfig(node_budget=10**5)).z
    row = {"z_opt": z_opt, "asa": [], "mh": []}
    for k in levels:
        inst = st.TwoStageInstance(bay, k, t_star)
        if params is not None:
            res = st.asa_star(inst, params, prune_times, rng=rng, clock=clock)
            row["asa"].append(st.realized_cost(inst, res.moves))
        row["mh"].append(myopic_heuristic(bay, k, t_star, clock=clock).relocations)
    return row


@dataclass(frozen=True)
class InfoRow:
    known: int
    fraction: float
    mean_zopt: float
    mean_asa: float | None
    mean_mh: float
    gap_asa: float | None
    gap_asa_ci95: float | None
    gap_mh: float
    gap_mh_ci95: float


def value_of_information(spec, n, seed=0, fracs=(0.25, 0.375, 0.5, 0.625, 0.75, 0.9),
                         t_star=None, params=None, prune_times=None, clock="relocations",
                         workers=1):
    """Relative gap of ASA* and of the myopic heuristic against full information,
    for each initially known fraction. ``params=None`` skips ASA*."""
    N = spec.n_containers
    levels = st.info_levels(N, fracs)
    t_star = st.default_t_star(N) if t_star is None else t_star
    if prune_times is None:
        prune_times = tuple(range(1, t_star - 1))
    per = pmap(_two_stage_one, [(spec, s, levels, t_star, params, tuple(prune_times), clock)
                                for s in _seeds(seed, n)], workers)
    zo = np.array([r["z_opt"] for r in per], float)
    rows = []
    for i, (k, f) in enumerate(zip(levels, fracs)):
        mh = np.array([r["mh"][i] for r in per], float)
        g_mh, c_mh = ratio_ci(mh, zo)
        if params is not None:
            asa = np.array([r["asa"][i] for r in per], float)
            g_asa, c_asa = ratio_ci(asa, zo)
            rows.append(InfoRow(k, f, float(zo.mean()), float(asa.mean()), float(mh.mean()),
                                float(g_asa - 1), c_asa, float(g_mh - 1), c_mh))
        else:
            rows.append(InfoRow(k, f, float(zo.mean()), None, float(mh.mean()), None, None,
                                float(g_mh - 1), c_mh))
    return rows


def _bays_one(args):
    spec, ss, levels, t_star, clock = args
    bay = generate_uniform(spec, np.random.default_rng(ss))
    zh = stacks_h(bay.stacks, bay.tiers)
    near = nearest_relocation(bay).relocations
    mh = [myopic_heuristic(bay, k, t_star, clock=clock).relocations for k in levels]
    return zh, near, mh


def info_bays_study(h, P, C_list, n, seed=0, fracs=(0.25, 0.5, 0.75, 1.0), clock="relocations",
                    workers=1):
    """Per bay width: ``E[z_MH] / E[z_H]`` and the saving of the myopic heuristic
    over the nearest-column rule, for each known fraction."""
    out = []
    for C in C_list:
        spec = InstanceSpec(P, C, h)
        N = spec.n_containers
        levels = st.info_levels(N, fracs)
        t_star = st.default_t_star(N)
        per = pmap(_bays_one, [(spec, s, levels, t_star, clock) for s in _seeds((seed, C), n)], workers)
        zh = np.array([p[0] for p in per], float)
        near = np.array([p[1] for p in per], float)
        for i, (k, f) in enumerate(zip(levels, fracs)):
            mh = np.array([p[2][i] for p in per], float)
            r, ci = ratio_ci(mh, zh)
            out.append({"C": C, "fraction": f, "known": k, "ratio_mh_h": float(r), "ci95": ci,
                        "saving_vs_nearest": float(1 - mh.mean() / near.mean())})
    return out


# -- closed forms ------------------------------------------------------------------

E12_GRID = [(0.1, 0.01), (0.1, 0.05), (0.1, 0.1), (0.5, 0.01), (0.5, 0.05), (0.5, 0.1),
            (1.0, 0.01), (1.0, 0.05), (1.0, 0.1)]


def error_bound_tables(m=5, d_min=1.0, delta=0.5, eps=0.05, h=3,
                       C_list=(10, 15, 20, 25, 30, 35, 40, 45, 50)):
    """Loss bounds from sampling/pruning at the last first-stage step (left) and
    from pruning at ``m`` earlier steps with ``U_hat_max = 2N`` (right)."""
    left = [{"delta": d, "eps": e, "e1_e2": st.error_bound_e1_e2(st.SamplingParams(d, e))}
            for d, e in E12_GRID]
    right = []
    p = st.SamplingParams(delta, eps)
    for C in C_list:
        N = h * C
        right.append({"C": C, "m": m, "e3": st.error_bound_e3(p, m, d_min, 2 * N)})
    return left, right


def sample_size_table(grid=E12_GRID, r_max=63):
    return [{"delta": d, "eps": e, "r_max": r_max,
             "samples": st.sample_size(st.SamplingParams(d, e, r_max))} for d, e in grid]


__all__ = ["bench", "lb_study", "lb_convergence", "gap_study", "th_width_study",
           "value_of_information", "info_bays_study", "error_bound_tables",
           "sample_size_table", "to_csv", "pmap"]
