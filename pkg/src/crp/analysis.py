"""Average-case quantities for uniformly filled bays and the Monte Carlo
studies of how ``E[z] / E[S0]`` behaves as the bay gets wider.

Bays in this module have ``h`` containers in each of ``C`` columns and
``P >= h + 1`` tiers.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .astar import SolverConfig, _Search
from .bay import Bay, InstanceSpec, generate_uniform, instance_rngs
from .bounds import stacks_s0
from .heuristics import stacks_h


@dataclass(frozen=True)
class ColumnBlockDist:
    """Distribution of the number of blocking containers in one uniformly
    ordered column of height ``h``; ``p[k]`` for ``k = 0..h-1``."""

    h: int
    p: tuple

    def mean(self):
        return sum(k * pk for k, pk in enumerate(self.p))


def block_dist(h):
    """Exact distribution (as fractions), by conditioning on where the
    smallest container sits."""
    if h < 0:
        raise ValueError("h must be non-negative")
    # table[g][k] = P(k blocking containers in a column of height g)
    table = [[Fraction(1)]]
    for g in range(1, h + 1):
        row = []
        for k in range(g):
            if k == 0:
                row.append(Fraction(1, math.factorial(g)))
                continue
            tot = Fraction(0)
            # smallest at the j-th topmost tier: j-1 blockers above it
            for j in range(1, min(k + 1, g) + 1):
                below = table[g - j]
                kk = k - j + 1
                if kk < len(below):
                    tot += below[kk]
            row.append(tot / g)
        table.append(row)
    return ColumnBlockDist(h, tuple(table[h]) if h else (Fraction(1),))


def alpha(h):
    """Expected number of blocking containers per column of height ``h``."""
    return block_dist(h).mean()


def theta(h):
    return (1 / (8 * h)) * (2 / (h * (h + 1))) ** (2 * h)


def k_prime(h, P, g_next):
    """``g(h+1)`` plus the tail term of the width recursion."""
    e = math.exp(theta(h))
    return g_next + e * h * (P - 1) / (e - 1) ** 2


def k_const(h, P, g_next):
    return k_prime(h, P, g_next) / float(alpha(h))


def f_of_C(h, P, C, g_next):
    """Upper envelope ``1 + K/C`` of ``E[z_opt] / E[S0]``."""
    if C < 1:
        raise ValueError("C must be positive")
    return 1 + k_const(h, P, g_next) / C


# -- Monte Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class GEstimate:
    mean: float
    ci95: float
    samples: int
    exact: bool
    budget_hits: int = 0
    proxy: str = "opt"


def _z_opt(stacks, tiers, budget):
    search = _Search(Bay._trusted(tiers, stacks), SolverConfig(node_budget=budget))
    z, _, low = search.run([budget if budget is not None else float("inf")])[0]
    return int(z), z == low


def estimate_g(h, P, C, samples=1000, rng=None, proxy="opt", budget=10**6):
    """Estimate ``g(C) = E[z] - alpha_h C`` on uniform ``P x C`` bays.

    ``proxy="H"`` uses ``z_H`` instead of ``z_opt`` (an upper estimate). When
    ``(hC)! <= 10**6`` every bay is enumerated and the value is exact.
    Instances that hit the node budget keep their incumbent and are counted in
    ``budget_hits``.
    """
    if proxy not in ("opt", "H"):
        raise ValueError("proxy must be 'opt' or 'H'")
    n = h * C
    a = float(alpha(h))
    hits = 0

    def z_of(stacks):
        nonlocal hits
        if proxy == "H":
            return stacks_h(stacks, P)
        z, ok = _z_opt(stacks, P, budget)
        hits += not ok
        return z

    if math.factorial(n) <= 10**6:
        tot = 0
        count = 0
        for perm in itertools.permutations(range(1, n + 1)):
            stacks = tuple(perm[h * i:h * (i + 1)] for i in range(C))
            tot += z_of(stacks)
            count += 1
        return GEstimate(tot / count - a * C, 0.0, count, True, hits, proxy)
    if rng is None:
        rng = np.random.default_rng()
    spec = InstanceSpec(P, C, h)
    vals = np.array([z_of(generate_uniform(spec, rng).stacks) for _ in range(samples)], float)
    ci = 1.96 * vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else float("inf")
    return GEstimate(float(vals.mean()) - a * C, ci, len(vals), False, hits, proxy)


@dataclass(frozen=True)
class SpecialColumnResult:
    frequency: float
    bound: float
    sigma: float
    samples: int

    @property
    def holds(self):
        return self.frequency <= self.bound + 3 * self.sigma


def special_column_check(h, C, samples=10**4, rng=None):
    """Fraction of uniform bays with ``C+1`` columns of height ``h`` having no
    column whose labels are all at least ``(h-1)(C+1)+1``."""
    if rng is None:
        rng = np.random.default_rng()
    cols = C + 1
    n = h * cols
    omega = (h - 1) * cols + 1
    none = 0
    chunk = 4096
    left = samples
    while left:
        k = min(chunk, left)
        perms = rng.permuted(np.tile(np.arange(1, n + 1), (k, 1)), axis=1)
        mins = perms.reshape(k, cols, h).min(axis=2)
        none += int(np.sum(~(mins >= omega).any(axis=1)))
        left -= k
    freq = none / samples
    bound = math.exp(-theta(h) * cols)
    sigma = math.sqrt(max(bound * (1 - bound), 1e-12) / samples)
    return SpecialColumnResult(freq, bound, sigma, samples)


@dataclass(frozen=True)
class ConvergenceRow:
    C: int
    samples: int
    mean_s0: float
    mean_zH: float
    mean_zopt: float | None
    ratio: float
    diff: float
    ci95: float
    diff_ci95: float

    def ratio_interval(self):
        return self.ratio - self.ci95, self.ratio + self.ci95


def _instance_values(h, P, C, seed, samples, with_opt, budget):
    spec = InstanceSpec(P, C, h)
    s0v = np.empty(samples)
    zh = np.empty(samples)
    zo = np.empty(samples) if with_opt else None
    for i, rng in enumerate(instance_rngs(seed, samples)):
        st = generate_uniform(spec, rng).stacks
        s0v[i] = stacks_s0(st)
        zh[i] = stacks_h(st, P)
        if with_opt:
            zo[i] = _z_opt(st, P, budget)[0]
    return s0v, zh, zo


def ratio_ci(num, den):
    """Ratio of means with a delta-method 95% half-width."""
    n = len(num)
    mx, my = num.mean(), den.mean()
    r = mx / my
    if n < 2:
        return r, float("inf")
    cov = np.cov(num, den, ddof=1)
    var = (cov[0, 0] - 2 * r * cov[0, 1] + r * r * cov[1, 1]) / (my * my * n)
    return r, 1.96 * math.sqrt(max(var, 0.0))


def convergence_experiment(h, P, C_list, samples, seed=0, with_opt=False, budget=10**6):
    """Per-``C`` means of ``S0`` and ``z_H`` (and ``z_opt`` if asked) on
    ``samples`` uniform bays each, with ratio and difference intervals."""
    rows = []
    for C in C_list:
        s0v, zh, zo = _instance_values(h, P, C, (seed, C), samples, with_opt, budget)
        r, ci = ratio_ci(zh, s0v)
        d = zh - s0v
        dci = 1.96 * d.std(ddof=1) / math.sqrt(samples) if samples > 1 else float("inf")
        rows.append(ConvergenceRow(C, samples, float(s0v.mean()), float(zh.mean()),
                                   float(zo.mean()) if zo is not None else None,
                                   r, float(d.mean()), ci, dci))
    return rows


def fit_inverse_c(rows):
    """Least-squares ``ratio - 1 = c / C``; returns ``(c, R^2)``."""
    x = np.array([1 / r.C for r in rows])
    y = np.array([r.ratio - 1 for r in rows])
    c = float(x @ y / (x @ x))
    ss_res = float(((y - c * x) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return c, r2


CSV_HEADER = ["C", "samples", "mean_s0", "mean_zH", "mean_zopt", "ratio", "diff", "ci95"]


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.C, r.samples, f"{r.mean_s0:.6f}", f"{r.mean_zH:.6f}",
                    "" if r.mean_zopt is None else f"{r.mean_zopt:.6f}",
                    f"{r.ratio:.6f}", f"{r.diff:.6f}", f"{r.ci95:.6f}"])
    return buf.getvalue()
