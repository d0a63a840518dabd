"""Breadth-first A* with a node budget for the restricted CRP.

Every tree node is the bay reached after ``level`` relocations, with all
immediately retrievable targets already taken out. A node is pruned when its
cumulative bounds meet (``U <= L``) or when ``L`` reaches the incumbent. When
the budget stops the search, the returned gap is certified by the smallest
cumulative lower bound left on the frontier.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .bay import pop_retrievable, relocate
from .bounds import stacks_sp
from .heuristics import heuristic_h, stacks_h, tree_heuristic

_INF = float("inf")


class BudgetZero(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Search settings.

    ``lb_depth=None`` uses the saturated look-ahead bound; ``upper`` is
    ``"H"`` or ``"TH"`` (tree heuristic with ``th_width``). ``node_budget``
    caps the number of children added to the tree (``None`` = unlimited).
    """

    node_budget: int | None = 10**6
    lb_depth: int | None = None
    upper: str = "H"
    th_width: int = 2
    cache_bounds: bool = True

    def __post_init__(self):
        if self.node_budget is not None and self.node_budget < 1:
            raise BudgetZero("node budget must be at least 1")
        if self.upper not in ("H", "TH"):
            raise ValueError("upper must be 'H' or 'TH'")


@dataclass(frozen=True)
class SolveOutcome:
    z: int
    moves: tuple = field(repr=False)
    gap: int
    nodes: int
    lower: int

    @property
    def optimal(self):
        return self.gap == 0

    def as_dict(self):
        return {"z": self.z, "gap": self.gap, "optimal": self.optimal,
                "nodes": self.nodes, "lower": self.lower,
                "moves": [m.as_dict() for m in self.moves]}


def _pop(stacks):
    stacks = list(stacks)
    while True:
        best, col = None, -1
        for i, s in enumerate(stacks):
            if s:
                m = min(s)
                if best is None or m < best:
                    best, col = m, i
        if best is None or stacks[col][-1] != best:
            return tuple(stacks)
        stacks[col] = stacks[col][:-1]


def _children(stacks, tiers):
    """Relocations of the topmost blocker, in tree-heuristic candidate order."""
    mins = [min(s) if s else _INF for s in stacks]
    t = min(mins)
    c = mins.index(t)
    r = stacks[c][-1]
    good, bad = [], []
    for j, s in enumerate(stacks):
        if j == c or len(s) >= tiers:
            continue
        (good if mins[j] > r else bad).append(j)
    good.sort(key=mins.__getitem__)
    bad.sort(key=lambda j: -mins[j])
    return r, c, good + bad


def _bay_hash(stacks):
    return hashlib.sha1(repr(stacks).encode()).hexdigest()[:12]


class _Search:
    def __init__(self, bay, config, trace=None):
        self.tiers = bay.tiers
        self.config = config
        root, self.pre = pop_retrievable(bay)
        self.root_bay = root
        depth = config.lb_depth
        if depth is None:
            depth = 10**9
        self.depth = depth
        self.cache = {} if config.cache_bounds else None
        self.trace = trace
        # node arrays
        self.stacks = []
        self.parent = []
        self.move = []
        self.level = []
        self.lo = []
        self.up = []
        self._add(root.stacks, -1, None, 0)

    def _bounds(self, stacks):
        cache = self.cache
        if cache is not None:
            hit = cache.get(stacks)
            if hit is not None:
                return hit
        lb = stacks_sp(stacks, self.depth)
        if self.config.upper == "H":
            ub = stacks_h(stacks, self.tiers)
        else:
            from .bay import Bay
            ub = tree_heuristic(Bay._trusted(self.tiers, stacks), self.config.th_width).relocations
        if cache is not None:
            cache[stacks] = (lb, ub)
        return lb, ub

    def _add(self, stacks, parent, move, level):
        lb, ub = self._bounds(stacks)
        self.stacks.append(stacks)
        self.parent.append(parent)
        self.move.append(move)
        self.level.append(level)
        self.lo.append(lb + level)
        self.up.append(ub + level)
        return len(self.stacks) - 1

    def _emit(self, nid, action):
        if self.trace is not None:
            self.trace.write(f"{self.level[nid]},{_bay_hash(self.stacks[nid])},"
                             f"{self.lo[nid]},{self.up[nid]},{action}\n")

    def run(self, checkpoints):
        """Run the search; ``checkpoints`` are ascending node budgets.

        Returns one ``(z, best_node, lower)`` snapshot per checkpoint; the
        search stops at the last checkpoint.
        """
        cps = list(checkpoints)
        snaps = []
        z_a, best = _INF, None
        m = 0
        level_nodes = [0]
        stacks_of, lo, up = self.stacks, self.lo, self.up
        tiers = self.tiers
        while level_nodes:
            nxt = []
            for pos, nid in enumerate(level_nodes):
                u, l = up[nid], lo[nid]
                if u < z_a:
                    z_a, best = u, nid
                if u <= l:
                    self._emit(nid, "prune-equal")
                    continue
                if l >= z_a:
                    self._emit(nid, "prune-incumbent")
                    continue
                st = stacks_of[nid]
                r, c, cands = _children(st, tiers)
                self._emit(nid, "branch")
                lvl = self.level[nid] + 1
                for d in cands:
                    while cps and m >= cps[0]:
                        frontier = level_nodes[pos:] + nxt
                        low = min(lo[i] for i in frontier)
                        snaps.append((z_a, best, min(low, z_a)))
                        cps.pop(0)
                    if not cps:
                        self.nodes = m
                        return snaps
                    child = list(st)
                    child[c] = st[c][:-1]
                    child[d] = st[d] + (r,)
                    nxt.append(self._add(_pop(child), nid, (r, c, d), lvl))
                    m += 1
            level_nodes = nxt
        self.nodes = m
        while cps:
            snaps.append((z_a, best, z_a))
            cps.pop(0)
        return snaps

    def path_moves(self, nid):
        """Full move sequence: tree path to ``nid`` then the upper-bound heuristic."""
        rel = []
        while nid > 0:
            rel.append(self.move[nid])
            nid = self.parent[nid]
        rel.reverse()
        moves = list(self.pre)
        bay = self.root_bay
        from .bay import apply_move
        for r, c, d in rel:
            mv = relocate(r, c, d)
            bay = apply_move(bay, mv)
            moves.append(mv)
            bay, ev = pop_retrievable(bay)
            moves.extend(ev)
        if self.config.upper == "H":
            tail = heuristic_h(bay)
        else:
            tail = tree_heuristic(bay, self.config.th_width)
        moves.extend(tail.moves)
        return tuple(moves)


def solve(bay, config=None, trace=None):
    """Solve ``bay`` within ``config.node_budget`` tree nodes.

    ``trace`` may be a writable text stream receiving one CSV line per visited
    node: ``level,bay-hash,L,U,action``.
    """
    config = config or SolverConfig()
    search = _Search(bay, config, trace)
    budget = config.node_budget if config.node_budget is not None else _INF
    z, best, low = search.run([budget])[0]
    return SolveOutcome(int(z), search.path_moves(best), int(z - low), search.nodes, int(low))


def gap_curve(bay, budgets, config=None):
    """Guaranteed gap for each node budget in ``budgets`` from a single search."""
    budgets = list(budgets)
    if budgets != sorted(budgets):
        raise ValueError("budgets must be sorted ascending")
    if budgets and budgets[0] < 1:
        raise BudgetZero("node budget must be at least 1")
    config = config or SolverConfig()
    search = _Search(bay, config)
    snaps = search.run(budgets)
    out = [(b, int(z - low)) for b, (z, _, low) in zip(budgets, snaps)]
    gaps = [g for _, g in out]
    assert all(a >= b for a, b in zip(gaps, gaps[1:])), "gap increased with the budget"
    return out


def nodes_to_optimality(bay, lb_depth=None, upper="H"):
    """Number of tree nodes an unlimited search creates."""
    search = _Search(bay, SolverConfig(node_budget=None, lb_depth=lb_depth, upper=upper))
    search.run([_INF])
    return search.nodes


def optimal_path_lb_gap(bay, config=None):
    """``z_opt(B^l) - S_N(B^l)`` along the optimal path, one entry per relocation level."""
    config = config or SolverConfig(node_budget=None)
    out = solve(bay, config)
    if not out.optimal:
        raise RuntimeError("bay not solved to optimality within the node budget")
    from .bay import MoveKind, apply_move
    from .bounds import s_full
    cur, _ = pop_retrievable(bay)
    gaps = [(0, out.z - s_full(cur))]
    level = 0
    state = bay
    for mv in out.moves:
        state = apply_move(state, mv)
        if mv.kind is MoveKind.RELOCATE:
            level += 1
            cur, _ = pop_retrievable(state)
            gaps.append((level, out.z - level - s_full(cur)))
    return gaps
