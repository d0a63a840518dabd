"""Two-stage CRP with a partially known retrieval order.

Containers ``1..known`` are known from the start; the order of the others is
revealed at time step ``t_star`` (every retrieval or relocation takes one
step). Before the reveal the solver only sees *where* the unknown containers
are. Internally they carry placeholder ids ``N+1, N+2, ...`` assigned by
position (column by column, bottom to top), so nothing the first stage does
can depend on their true labels.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .astar import SolverConfig, _Search, solve
from .bay import Bay, MoveKind, apply_move, relocate, retrieve
from .bounds import stacks_sp
from .heuristics import myopic_heuristic, stacks_h

_INF = float("inf")


class InvalidParams(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class TooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class TwoStageInstance:
    """Realized bay (labels ``1..N``) plus the information structure."""

    bay: Bay
    known: int
    t_star: int

    def __post_init__(self):
        labels = self.bay.labels()
        if labels != list(range(1, len(labels) + 1)):
            raise ValueError("two-stage bays must carry labels 1..N")
        if not 1 <= self.known <= len(labels):
            raise ValueError("known must lie in 1..N")
        if self.t_star < 1:
            raise ValueError("t_star must be at least 1")

    @property
    def n(self):
        return self.bay.n_containers

    @property
    def unknown(self):
        return self.n - self.known

    def n_scenarios(self):
        return math.factorial(self.unknown)

    def masked(self):
        """Stacks with unknown containers replaced by positional placeholders,
        and the placeholder -> true label map."""
        n = self.n
        nxt = n + 1
        truth = {}
        stacks = []
        for s in self.bay.stacks:
            col = []
            for x in s:
                if x <= self.known:
                    col.append(x)
                else:
                    truth[nxt] = x
                    col.append(nxt)
                    nxt += 1
            stacks.append(tuple(col))
        return tuple(stacks), truth


@dataclass(frozen=True)
class SamplingParams:
    """Hoeffding sampling precision ``delta``, failure probability ``eps`` and
    range ``[r_min, r_max]`` of the sampled relocation count.

    ``max_samples`` optionally caps the sample count at desk scale.
    """

    delta: float
    eps: float
    r_max: float | None = None
    r_min: float = 0.0
    max_samples: int | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidParams("delta must be positive")
        if not 0 < self.eps < 1:
            raise InvalidParams("eps must lie in (0, 1)")
        if self.r_max is not None and self.r_max < self.r_min:
            raise InvalidParams("r_max must be at least r_min")
        if self.max_samples is not None and self.max_samples < 1:
            raise InvalidParams("max_samples must be positive")

    def for_bay(self, bay):
        """Fill ``r_max`` with ``N(P-1)``, the worst case relocation count."""
        if self.r_max is not None:
            return self
        return SamplingParams(self.delta, self.eps, bay.n_containers * (bay.tiers - 1),
                              self.r_min, self.max_samples)


def sample_size(params):
    """Smallest ``S`` with ``2 exp(-2 S delta^2 / (r_max - r_min)^2) <= eps``."""
    if params.r_max is None:
        raise InvalidParams("r_max is not set")
    span = params.r_max - params.r_min
    if math.isinf(params.delta) or span == 0:
        return 1
    s = span ** 2 * math.log(params.eps / 2) / (-2 * params.delta ** 2)
    # guard against 29283.000000001-style round-off before taking the ceiling
    s_round = round(s)
    s = s_round if abs(s - s_round) < 1e-9 else math.ceil(s)
    return max(1, int(s))


def hoeffding_tail(n_samples, delta, span):
    """Right-hand side of Hoeffding's inequality for ``n_samples`` draws."""
    return 2 * math.exp(-2 * n_samples * delta ** 2 / span ** 2)


def error_bound_e1_e2(params):
    """Bound on the expected loss from sampling (and from pruning at t*-1)."""
    return 2 * params.delta * math.sqrt(math.pi / -math.log(params.eps / 2))


def error_bound_e3(params, m, d_min, u_hat_max):
    """Bound on the expected loss from pruning at ``m`` times before t*-1."""
    if m < 0:
        raise InvalidParams("m must be non-negative")
    if m == 0:
        return 0.0
    if not d_min > 0:
        raise InvalidParams("d_min must be positive")
    a = params.eps / 2
    la = -math.log(a)
    d, dl = d_min, params.delta
    p_mistake = a ** (d * d / dl ** 2) + (d / dl) * math.sqrt(la * math.pi / 2) * a ** (d * d / (2 * dl ** 2))
    return m * p_mistake * (dl * math.sqrt(math.pi / la) + u_hat_max)


# -- scenario handling ----------------------------------------------------------

def _scenario_maps(instance, placeholders, n_draw, rng):
    """Realization maps placeholder -> label, and whether they enumerate all scenarios."""
    unknown_labels = list(range(instance.known + 1, instance.n + 1))
    if not placeholders:
        return [dict()], True
    total = instance.n_scenarios()
    if n_draw >= total:
        return [dict(zip(placeholders, p)) for p in itertools.permutations(unknown_labels)], True
    maps = []
    for _ in range(n_draw):
        perm = rng.permutation(len(unknown_labels))
        maps.append({ph: unknown_labels[i] for ph, i in zip(placeholders, perm)})
    return maps, False


def _realize(stacks, mapping):
    if not mapping:
        return stacks
    return tuple(tuple(mapping.get(x, x) for x in s) for s in stacks)


class _Evaluator:
    """Full-information bounds and optima of realized bays, cached by bay."""

    def __init__(self, tiers, node_budget):
        self.tiers = tiers
        self.cfg = SolverConfig(node_budget=node_budget)
        self.bounds = {}
        self.opt = {}
        self.budget_hits = 0

    def lu(self, stacks):
        hit = self.bounds.get(stacks)
        if hit is None:
            hit = (stacks_sp(stacks, 10**9), stacks_h(stacks, self.tiers))
            self.bounds[stacks] = hit
        return hit

    def z(self, stacks):
        hit = self.opt.get(stacks)
        if hit is not None:
            return hit
        lo, up = self.lu(stacks)
        if lo == up:
            val = up
        else:
            search = _Search(Bay._trusted(self.tiers, stacks), self.cfg)
            budget = self.cfg.node_budget if self.cfg.node_budget is not None else _INF
            z, _, low = search.run([budget])[0]
            if z != low:
                self.budget_hits += 1
            val = int(z)
        self.opt[stacks] = val
        return val


# -- first-stage tree -----------------------------------------------------------

@dataclass
class _Path:
    stacks: tuple
    relocations: int
    moves: tuple
    done: bool = False


def _step(path, known, tiers, clock="relocations"):
    """Advance the clock by one unit; returns the successor paths.

    With ``clock="steps"`` every retrieval and relocation is one unit. With
    ``clock="relocations"`` retrievals are free and only relocations count.
    """
    st = path.stacks
    moves = path.moves
    while True:
        cands = [(min(x for x in s if x <= known), i) for i, s in enumerate(st)
                 if any(x <= known for x in s)]
        if not cands:
            # nothing known is left: wait for the reveal
            return [_Path(st, path.relocations, moves, True)]
        t, c = min(cands)
        if st[c][-1] != t:
            break
        nxt = list(st)
        nxt[c] = st[c][:-1]
        st = tuple(nxt)
        moves = moves + (retrieve(t, c),)
        if clock == "steps":
            return [_Path(st, path.relocations, moves)]
    r = st[c][-1]
    out = []
    for d, s in enumerate(st):
        if d == c or len(s) >= tiers:
            continue
        nxt = list(st)
        nxt[c] = st[c][:-1]
        nxt[d] = s + (r,)
        out.append(_Path(tuple(nxt), path.relocations + 1, moves + (relocate(r, c, d),)))
    return out


@dataclass
class PruneLedger:
    """Pruning record: per pruning time the smallest ``L - U_best`` among
    pruned paths and the best estimated upper bound."""

    times: list = field(default_factory=list)
    d: list = field(default_factory=list)
    u_hat: list = field(default_factory=list)
    pruned: list = field(default_factory=list)

    @property
    def m(self):
        return len(self.times)

    @property
    def d_min(self):
        return min(self.d) if self.d else None

    @property
    def u_hat_max(self):
        return max(self.u_hat) if self.u_hat else None


@dataclass(frozen=True)
class ASAResult:
    """First-stage decisions chosen by ASA*.

    ``moves`` use placeholder ids (> N) for unknown containers; play them on
    the realized bay with ``apply_first_stage``.
    """

    moves: tuple
    expected_cost: float
    ledger: PruneLedger
    n_samples: int
    exhaustive: bool
    first_stage_nodes: int
    leaves: int


def _estimate(paths, maps, ev):
    lows, ups = [], []
    for p in paths:
        lo_sum = up_sum = 0
        for mp in maps:
            lo, up = ev.lu(_pop_stacks(_realize(p.stacks, mp)))
            lo_sum += lo
            up_sum += up
        k = len(maps)
        lows.append(p.relocations + lo_sum / k)
        ups.append(p.relocations + up_sum / k)
    return lows, ups


def _prune(paths, lows, ups, ledger, time):
    best = min(range(len(paths)), key=lambda i: (ups[i], i))
    keep, d_vals = [], []
    for i, p in enumerate(paths):
        if i != best and lows[i] >= ups[best]:
            d_vals.append(lows[i] - ups[best])
        else:
            keep.append(p)
    if d_vals:
        ledger.times.append(time)
        ledger.d.append(min(d_vals))
        ledger.u_hat.append(ups[best])
        ledger.pruned.append(len(d_vals))
    return keep


def _pop_stacks(stacks):
    from .astar import _pop
    return _pop(stacks)


def asa_star(instance, params, prune_times=(), rng=None, node_cap=200_000,
             second_stage_budget=10**5, prune_leaves=True, clock="relocations"):
    """Approximate stochastic A* for the two-stage problem.

    Builds every first-stage path over time steps ``1..t_star-1``, estimates
    expected lower/upper bounds on sampled scenarios (the same draws for every
    path), prunes with them at ``prune_times`` and at ``t_star-1`` and returns
    the path with the smallest sampled mean of first-stage relocations plus
    optimal second-stage relocations. When the sample count reaches the number
    of scenarios, all scenarios are enumerated and the expectation is exact.
    """
    if rng is None:
        rng = np.random.default_rng()
    params = params.for_bay(instance.bay)
    n_samples = sample_size(params)
    if params.max_samples is not None:
        n_samples = min(n_samples, params.max_samples)
    stacks, _ = instance.masked()
    placeholders = sorted(x for s in stacks for x in s if x > instance.n)
    maps, exhaustive = _scenario_maps(instance, placeholders, n_samples, rng)
    ev = _Evaluator(instance.bay.tiers, second_stage_budget)
    ledger = PruneLedger()
    tiers = instance.bay.tiers
    prune_at = set(t for t in prune_times if 1 <= t < instance.t_star - 1)

    frontier = [_Path(stacks, 0, ())]
    nodes = 1
    for time in range(1, instance.t_star):
        nxt = []
        for p in frontier:
            if p.done or not any(p.stacks):
                nxt.append(p)
                continue
            succ = _step(p, instance.known, tiers, clock)
            nodes += len(succ)
            nxt.extend(succ)
        if nodes > node_cap:
            raise BudgetExceeded(f"first-stage tree exceeds {node_cap} nodes")
        frontier = nxt
        if time in prune_at and len(frontier) > 1:
            lows, ups = _estimate(frontier, maps, ev)
            frontier = _prune(frontier, lows, ups, ledger, time)

    if prune_leaves and len(frontier) > 1:
        lows, ups = _estimate(frontier, maps, ev)
        frontier = _prune(frontier, lows, ups, ledger, instance.t_star - 1)

    best, best_val = None, _INF
    for p in frontier:
        total = 0
        for mp in maps:
            total += ev.z(_realize(p.stacks, mp))
        val = p.relocations + total / len(maps)
        if val < best_val - 1e-12:
            best, best_val = p, val
    return ASAResult(best.moves, best_val, ledger, len(maps), exhaustive, nodes, len(frontier))


def apply_first_stage(bay, moves, known):
    """Play first-stage ``moves`` (placeholder ids for unknowns) on the realized bay.

    Returns the bay at the reveal and the relocation count.
    """
    n_reloc = 0
    for mv in moves:
        top = bay.stacks[mv.from_column][-1]
        if mv.kind is MoveKind.RETRIEVE:
            bay = apply_move(bay, retrieve(top, mv.from_column))
        else:
            if mv.container <= known and top != mv.container:
                raise ValueError(f"move {mv} does not match the bay")
            bay = apply_move(bay, relocate(top, mv.from_column, mv.to_column))
            n_reloc += 1
    return bay, n_reloc


def realized_cost(instance, moves, config=None):
    """Relocations when the first stage follows ``moves`` and the rest is solved
    with full information on the realized bay."""
    bay, n_first = apply_first_stage(instance.bay, moves, instance.known)
    out = solve(bay, config or SolverConfig(node_budget=10**5))
    return n_first + out.z


def exact_two_stage(instance, limit=10**6, node_budget=None, clock="relocations"):
    """Exact optimum of the expected relocation count by full enumeration.

    Enumerates every first-stage path and every scenario, solving each
    realized bay to optimality.
    """
    stacks, _ = instance.masked()
    placeholders = sorted(x for s in stacks for x in s if x > instance.n)
    n_scen = instance.n_scenarios()
    leaves = _enumerate_leaves(stacks, instance.known, instance.bay.tiers, instance.t_star - 1, clock)
    if len(leaves) * n_scen > limit:
        raise TooLarge(f"{len(leaves)} paths x {n_scen} scenarios exceeds {limit}")
    unknown_labels = list(range(instance.known + 1, instance.n + 1))
    scen = [dict(zip(placeholders, p)) for p in itertools.permutations(unknown_labels)]
    tiers = instance.bay.tiers
    cfg = SolverConfig(node_budget=node_budget)
    memo = {}
    best = _INF
    for reloc, st in leaves:
        total = 0
        for mp in scen:
            real = _realize(st, mp)
            if real not in memo:
                memo[real] = solve(Bay._trusted(tiers, real), cfg).z
            total += memo[real]
        best = min(best, reloc + total / len(scen))
    return best


def _enumerate_leaves(stacks, known, tiers, steps, clock="relocations"):
    """All ``(relocations, stacks)`` reachable after ``steps`` clock units (depth first)."""
    out = []

    def rec(st, reloc, left):
        if left == 0 or not any(st):
            out.append((reloc, st))
            return
        knowns = [(min(x for x in s if x <= known), i) for i, s in enumerate(st)
                  if any(x <= known for x in s)]
        if not knowns:
            out.append((reloc, st))
            return
        t, c = min(knowns)
        if st[c][-1] == t:
            nxt = list(st)
            nxt[c] = st[c][:-1]
            rec(tuple(nxt), reloc, left - (clock == "steps"))
            return
        r = st[c][-1]
        for d, s in enumerate(st):
            if d != c and len(s) < tiers:
                nxt = list(st)
                nxt[c] = st[c][:-1]
                nxt[d] = s + (r,)
                rec(tuple(nxt), reloc + 1, left - 1)

    rec(tuple(stacks), 0, steps)
    return out


def myopic(instance, clock="relocations"):
    """Myopic heuristic on the realized scenario of ``instance``."""
    return myopic_heuristic(instance.bay, instance.known, instance.t_star, clock)


def info_levels(n, fracs=(0.25, 0.375, 0.5, 0.625, 0.75, 0.9)):
    """Known-container counts ``ceil(f N)`` for each information fraction."""
    return [math.ceil(f * n - 1e-9) for f in fracs]


def default_t_star(n):
    return math.ceil(0.25 * n - 1e-9) + 1
