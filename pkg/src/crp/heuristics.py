"""Feasible solutions: heuristic H, the tree heuristic TH-L, the myopic
heuristic for partially known retrieval orders and a nearest-column baseline.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bay import relocate, retrieve
from .bounds import stacks_s0


class InternalError(RuntimeError):
    """No legal destination exists for a blocking container."""


_INF = float("inf")


@dataclass(frozen=True)
class HeuristicResult:
    relocations: int
    moves: tuple = field(default=(), repr=False)

    @property
    def z(self):
        return self.relocations


# -- column choice rules ----------------------------------------------------

def h_choice(mins, heights, tiers, src, r):
    """Destination column picked by H for blocking container ``r``.

    ``mins[i]`` is the column minimum (``inf`` when empty). Ties go to the
    lowest column index.
    """
    good, good_val = -1, _INF
    bad, bad_val = -1, -1
    for j in range(len(mins)):
        if j == src or heights[j] >= tiers:
            continue
        m = mins[j]
        if m > r:
            if good < 0 or m < good_val:
                good, good_val = j, m
        elif m > bad_val:
            bad, bad_val = j, m
    if good >= 0:
        return good
    if bad >= 0:
        return bad
    raise InternalError(f"no legal destination for container {r}")


def candidate_columns(mins, heights, tiers, src, r):
    """Columns ordered as in the tree heuristic.

    Good columns (minimum above ``r``) by increasing minimum, then bad
    columns by decreasing minimum; full columns and ``src`` are excluded.
    """
    good, bad = [], []
    for j in range(len(mins)):
        if j == src or heights[j] >= tiers:
            continue
        (good if mins[j] > r else bad).append(j)
    good.sort(key=lambda j: mins[j])
    bad.sort(key=lambda j: -mins[j])
    return good + bad


# -- heuristic H ------------------------------------------------------------

def stacks_h(stacks, tiers):
    """Relocation count of heuristic H, no move record (hot path of A*)."""
    cols = [list(s) for s in stacks]
    mins = [min(s) if s else _INF for s in cols]
    heights = [len(s) for s in cols]
    n = 0
    ncol = len(cols)
    remaining = sum(heights)
    while remaining:
        t = min(mins)
        c = mins.index(t)
        col = cols[c]
        top = col[-1]
        if top == t:
            col.pop()
            heights[c] -= 1
            mins[c] = min(col) if col else _INF
            remaining -= 1
            continue
        col.pop()
        heights[c] -= 1
        good, good_val, bad, bad_val = -1, _INF, -1, -1
        for j in range(ncol):
            if j == c or heights[j] >= tiers:
                continue
            m = mins[j]
            if m > top:
                if good < 0 or m < good_val:
                    good, good_val = j, m
            elif m > bad_val:
                bad, bad_val = j, m
        d = good if good >= 0 else bad
        if d < 0:
            raise InternalError(f"no legal destination for container {top}")
        cols[d].append(top)
        heights[d] += 1
        if top < mins[d]:
            mins[d] = top
        n += 1
    return n


def _run_rule(bay, rule):
    cols = [list(s) for s in bay.stacks]
    mins = [min(s) if s else _INF for s in cols]
    heights = [len(s) for s in cols]
    moves = []
    n = 0
    while any(heights):
        t = min(mins)
        c = mins.index(t)
        col = cols[c]
        top = col[-1]
        if top == t:
            col.pop()
            heights[c] -= 1
            mins[c] = min(col) if col else _INF
            moves.append(retrieve(t, c))
            continue
        col.pop()
        heights[c] -= 1
        d = rule(mins, heights, bay.tiers, c, top)
        cols[d].append(top)
        heights[d] += 1
        mins[d] = min(mins[d], top)
        moves.append(relocate(top, c, d))
        n += 1
    return HeuristicResult(n, tuple(moves))


def heuristic_h(bay):
    """Heuristic H with the full move sequence."""
    return _run_rule(bay, h_choice)


def z_h(bay):
    return stacks_h(bay.stacks, bay.tiers)


# -- nearest relocation baseline ---------------------------------------------

def nearest_choice(mins, heights, tiers, src, r):
    best, dist = -1, None
    for j in range(len(mins)):
        if j == src or heights[j] >= tiers:
            continue
        d = abs(j - src)
        if dist is None or d < dist:
            best, dist = j, d
    if best < 0:
        raise InternalError(f"no legal destination for container {r}")
    return best


def nearest_relocation(bay):
    """Relocate each blocking container to the closest non-full column."""
    return _run_rule(bay, nearest_choice)


# -- tree heuristic -----------------------------------------------------------

class _Budget:
    __slots__ = ("left",)

    def __init__(self, n):
        self.left = n


def tree_heuristic(bay, width=2, node_cap=2_000_000, memo=False):
    """Tree heuristic TH-L: branch on the ``width`` best H candidates.

    Candidates are ranked over all other columns; full columns keep their rank
    and are skipped, so fewer than ``width`` branches may remain. When none
    is legal the first legal column in rank order (H's choice) is used, so
    ``width=1`` reproduces H. Subtrees whose counting bound cannot beat the
    best leaf found so far are skipped, which leaves the value unchanged.
    Once ``node_cap`` branch points are used, the remaining subtrees are
    completed with H, which keeps ``z <= z_H``.
    """
    if width < 1:
        raise ValueError("width must be at least 1")
    tiers = bay.tiers
    budget = _Budget(node_cap)
    cache = {} if memo else None

    def solve(stacks, cap):
        # (relocations, cons-list of moves); exact when below cap, otherwise
        # only known to be >= cap and the move list is None
        if cache is not None and stacks in cache:
            return cache[stacks]
        cols = [list(s) for s in stacks]
        mins = [min(s) if s else _INF for s in cols]
        prefix = []
        while True:
            if not any(cols):
                return 0, _cons_from(prefix, None)
            t = min(mins)
            c = mins.index(t)
            if cols[c][-1] != t:
                break
            cols[c].pop()
            mins[c] = min(cols[c]) if cols[c] else _INF
            prefix.append(retrieve(t, c))
        lb = stacks_s0(cols)
        if lb >= cap:
            return lb, None
        r = cols[c][-1]
        heights = [len(s) for s in cols]
        heights[c] -= 1
        # rank every other column, full ones included, and keep the legal
        # ones among the first `width`; H's column is the fallback
        ranked = candidate_columns(mins, heights, _INF, c, r)
        legal = [d for d in ranked if heights[d] < tiers]
        if not legal:
            raise InternalError(f"no legal destination for container {r}")
        budget.left -= 1
        cands = [d for d in ranked[:width] if heights[d] < tiers] if budget.left >= 0 else []
        cands = cands or legal[:1]
        base = [tuple(s) for s in cols]
        base[c] = base[c][:-1]
        best, chain = cap, None
        for d in cands:
            if best <= lb:
                break
            nxt = list(base)
            nxt[d] = nxt[d] + (r,)
            sub, tail = solve(tuple(nxt), best - 1)
            if sub + 1 < best:
                best, chain = sub + 1, (relocate(r, c, d), tail)
        if chain is None:
            return best, None
        res = (best, _cons_from(prefix, chain))
        if cache is not None:
            cache[stacks] = res
        return res

    z, chain = solve(bay.stacks, _INF)
    moves = []
    while chain is not None:
        moves.append(chain[0])
        chain = chain[1]
    return HeuristicResult(z, tuple(moves))


def _cons_from(items, tail):
    for m in reversed(items):
        tail = (m, tail)
    return tail


# -- myopic heuristic ----------------------------------------------------------

def myopic_heuristic(bay, known, t_star, clock="relocations"):
    """H with unknown labels hidden until the reveal time ``t_star``.

    ``bay`` holds the realized labels; containers ``1..known`` are known from
    the start, the others look like ``N+1`` until the reveal. The clock starts
    at 1 and advances with every relocation (``clock="relocations"``) or with
    every move (``clock="steps"``); decisions taken while it reads less than
    ``t_star`` are masked. Empty columns count as ``N+2``. Ties among masked
    columns favour emptier columns, then lower indices.
    """
    if clock not in ("relocations", "steps"):
        raise ValueError("clock must be 'relocations' or 'steps'")
    n_total = max(bay.labels(), default=0)
    hidden = n_total + 1
    empty = n_total + 2
    tiers = bay.tiers
    cols = [list(s) for s in bay.stacks]
    moves = []
    n_reloc = 0
    ticks = 0
    while any(cols):
        mins = [min(s) if s else _INF for s in cols]
        t = min(mins)
        c = mins.index(t)
        if cols[c][-1] == t:
            cols[c].pop()
            moves.append(retrieve(t, c))
            ticks += clock == "steps"
            continue
        r = cols[c].pop()
        # once every known container has left, the reveal has come
        if ticks + 1 < t_star and t <= known:
            def view(x):
                return x if x <= known else hidden
            seen_r = view(r)
            seen = [min(view(x) for x in s) if s else empty for s in cols]
        else:
            seen_r = r
            seen = [min(s) if s else empty for s in cols]
        d = _masked_choice(seen, [len(s) for s in cols], tiers, c, seen_r)
        cols[d].append(r)
        moves.append(relocate(r, c, d))
        n_reloc += 1
        ticks += 1
    return HeuristicResult(n_reloc, tuple(moves))


def _masked_choice(seen, heights, tiers, src, r):
    opts = [j for j in range(len(seen)) if j != src and heights[j] < tiers]
    if not opts:
        raise InternalError(f"no legal destination for container {r}")
    good = [j for j in opts if seen[j] > r]
    if good:
        return min(good, key=lambda j: (seen[j], heights[j], j))
    return min(opts, key=lambda j: (-seen[j], heights[j], j))


def replay_count(bay, moves):
    """Relocation count of ``moves`` after checking they legally empty ``bay``."""
    from .bay import replay

    final, n = replay(bay, moves)
    if not final.is_empty():
        raise ValueError("move sequence does not empty the bay")
    return n

