"""Admissible lower bounds on the optimal number of relocations.

``s0`` counts blocking containers. ``s_p`` adds the bad moves that are
unavoidable while the ``p`` next targets leave, detected on "discarded"
bays where every relocated container is thrown away.
"""
from __future__ import annotations

_INF = float("inf")


def s0(bay):
    """Number of containers lying above a smaller label in their column."""
    return stacks_s0(bay.stacks)


def stacks_s0(stacks):
    n = 0
    for s in stacks:
        m = _INF
        for x in s:
            if x > m:
                n += 1
            else:
                m = x
    return n


def max_of_mins(bay):
    """Maximum over non-empty columns of the column minimum."""
    mins = [min(s) for s in bay.stacks if s]
    if not mins:
        raise ValueError("empty bay has no max-of-mins")
    return max(mins)


def s_p(bay, p):
    """Look-ahead lower bound of depth ``p`` (``p=0`` is the counting bound).

    Depth is counted in labels present in the bay, so after retrievals the
    ``p`` smallest remaining labels are inspected.
    """
    if p < 0:
        raise ValueError("look-ahead depth must be non-negative")
    return stacks_sp(bay.stacks, p)


def s_full(bay):
    """Look-ahead bound at saturating depth (``p = N``)."""
    return stacks_sp(bay.stacks, bay.n_containers)


def stacks_sp(stacks, p):
    # In the discarded bay B_k every column is a prefix of the original one:
    # discarding k together with R_k removes k and all that still sits on it.
    s0_count = 0
    owners = {}
    prefix_min = []
    where = {}
    for c, s in enumerate(stacks):
        m = _INF
        pmc = []
        for i, x in enumerate(s):
            if x > m:
                s0_count += 1
                owners.setdefault(m, []).append(x)
            else:
                m = x
            pmc.append(m)
            where[x] = (c, i)
        prefix_min.append(pmc)
    if p <= 0 or not owners:
        return s0_count
    heights = [len(s) for s in stacks]
    ncol = len(stacks)
    extra = 0
    pending = len(owners)
    for k in sorted(where)[:p]:
        if 0 in heights:
            break
        c, i = where[k]
        if i >= heights[c]:
            continue
        rs = owners.get(k)
        if rs is not None:
            mm = max(prefix_min[j][heights[j] - 1] for j in range(ncol))
            for r in rs:
                if r > mm:
                    extra += 1
            pending -= 1
            if pending == 0:
                heights[c] = i
                break
        heights[c] = i
    return s0_count + extra


def discarded_bays(bay):
    """Yield ``(k, B_k)`` for the discard recursion, stopping at an empty column.

    Debugging aid mirroring ``s_p``; not used on the hot path.
    """
    from .bay import Bay

    stacks = [list(s) for s in bay.stacks]
    for k in bay.labels():
        if any(not s for s in stacks):
            return
        cur = Bay._trusted(bay.tiers, tuple(tuple(s) for s in stacks))
        if not any(k in s for s in stacks):
            continue
        yield k, cur
        for s in stacks:
            if k in s:
                del s[s.index(k):]
                break


def cumulative(bound_value, level):
    """Cumulative bound of a node ``level`` relocations below the root."""
    return bound_value + level
