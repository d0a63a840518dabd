"""Independent brute-force references.

Nothing here imports the library: moves, retrievals and the two-stage
enumeration are re-implemented from the problem definition.
"""
from __future__ import annotations

import itertools
from functools import lru_cache


def _retrieve_all(stacks):
    stacks = [list(s) for s in stacks]
    while True:
        present = [x for s in stacks for x in s]
        if not present:
            return stacks
        t = min(present)
        col = next(s for s in stacks if t in s)
        if col[-1] != t:
            return stacks
        col.pop()


def _successors(stacks, tiers):
    """Bays reachable by one relocation of the topmost container above the target."""
    t = min(x for s in stacks for x in s)
    c = next(i for i, s in enumerate(stacks) if t in s)
    out = []
    for d in range(len(stacks)):
        if d == c or len(stacks[d]) >= tiers:
            continue
        new = [list(s) for s in stacks]
        new[d].append(new[c].pop())
        out.append(new)
    return out


def z_opt(stacks, tiers):
    """Minimum relocations by exhaustive depth-first search with memoisation."""

    @lru_cache(maxsize=None)
    def f(key):
        st = _retrieve_all(key)
        if not any(st):
            return 0
        best = None
        for nxt in _successors(st, tiers):
            v = 1 + f(tuple(tuple(s) for s in nxt))
            if best is None or v < best:
                best = v
        if best is None:
            raise RuntimeError("no legal relocation")
        return best

    return f(tuple(tuple(s) for s in stacks))


def blocking_count(stacks):
    n = 0
    for s in stacks:
        for i, x in enumerate(s):
            if any(y < x for y in s[:i]):
                n += 1
    return n


def all_bays(columns, height):
    """Every full-height filling with labels 1..columns*height."""
    n = columns * height
    for perm in itertools.permutations(range(1, n + 1)):
        yield tuple(tuple(perm[height * i:height * (i + 1)]) for i in range(columns))


def two_stage_optimum(stacks, tiers, known, t_star, clock="relocations"):
    """Exact minimum over first-stage policies of the expected relocation count.

    Unknown containers are indistinguishable before the reveal, so the first
    stage is a fixed sequence of column choices; clock units are relocations
    (or every move with ``clock="steps"``).
    """
    n = sum(len(s) for s in stacks)
    unknown = [x for s in stacks for x in s if x > known]
    scenarios = []
    for perm in itertools.permutations(range(known + 1, n + 1)):
        mp = dict(zip(sorted(unknown), perm))
        scenarios.append(mp)
    # play column decisions on every scenario at once; decisions are legal in
    # all of them because the known part evolves identically
    best = [float("inf")]

    def rec(bays, reloc, left):
        # bays: list of per-scenario stacks (lists)
        ref = bays[0]
        # retrieve known targets (they coincide across scenarios)
        while True:
            if left == 0:
                return finish(bays, reloc)
            ks = [x for s in ref for x in s if x <= known]
            if not ks:
                return finish(bays, reloc)
            t = min(ks)
            c = next(i for i, s in enumerate(ref) if t in s)
            if ref[c][-1] != t:
                break
            for b in bays:
                b[c].pop()
            if clock == "steps":
                left -= 1
        for d in range(len(ref)):
            if d == c or len(ref[d]) >= tiers:
                continue
            nb = [[list(s) for s in b] for b in bays]
            for b in nb:
                b[d].append(b[c].pop())
            rec(nb, reloc + 1, left - 1)

    def finish(bays, reloc):
        tot = sum(z_opt(b, tiers) for b in bays)
        best[0] = min(best[0], reloc + tot / len(bays))

    start = [[[mp.get(x, x) for x in s] for s in stacks] for mp in scenarios]
    if t_star - 1 <= 0:
        finish(start, 0)
    else:
        rec(start, 0, t_star - 1)
    return best[0]
