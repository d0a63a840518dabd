"""Bay configurations, restricted-CRP moves, random instances and instance files.

A bay is stored column by column, each column bottom to top. Column indices
are 0-based in the library and 1-based in every file format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np


class IllegalMove(ValueError):
    pass


class NotBlocked(ValueError):
    pass


class ParseError(ValueError):
    pass


class MoveKind(str, Enum):
    RELOCATE = "relocate"
    RETRIEVE = "retrieve"


@dataclass(frozen=True)
class MoveEvent:
    kind: MoveKind
    container: int
    from_column: int
    to_column: int | None = None

    def __str__(self):
        if self.kind is MoveKind.RETRIEVE:
            return f"retrieve {self.container} from c{self.from_column + 1}"
        return f"relocate {self.container} c{self.from_column + 1}->c{self.to_column + 1}"

    def as_dict(self):
        d = {"kind": self.kind.value, "container": self.container,
             "from": self.from_column + 1}
        if self.to_column is not None:
            d["to"] = self.to_column + 1
        return d


def relocate(container, src, dst):
    return MoveEvent(MoveKind.RELOCATE, container, src, dst)


def retrieve(container, src):
    return MoveEvent(MoveKind.RETRIEVE, container, src)


class Bay:
    """Immutable bay of ``tiers`` x ``len(stacks)`` slots.

    ``stacks[i]`` lists the labels of column ``i`` from bottom to top. Labels
    are distinct positive integers; the smallest label present is the next
    container to leave.
    """

    __slots__ = ("tiers", "stacks", "_hash")

    def __init__(self, tiers, stacks):
        stacks = tuple(tuple(int(x) for x in s) for s in stacks)
        tiers = int(tiers)
        if tiers < 1:
            raise ValueError("tiers must be positive")
        if not stacks:
            raise ValueError("a bay needs at least one column")
        seen = set()
        for i, s in enumerate(stacks):
            if len(s) > tiers:
                raise ValueError(f"column {i + 1} holds {len(s)} containers but tiers={tiers}")
            for x in s:
                if x < 1:
                    raise ValueError(f"label {x} is not a positive integer")
                if x in seen:
                    raise ValueError(f"duplicate label {x}")
                seen.add(x)
        object.__setattr__(self, "tiers", tiers)
        object.__setattr__(self, "stacks", stacks)
        object.__setattr__(self, "_hash", hash((tiers, stacks)))

    @classmethod
    def _trusted(cls, tiers, stacks):
        # skips validation; callers guarantee a legal configuration
        b = object.__new__(cls)
        object.__setattr__(b, "tiers", tiers)
        object.__setattr__(b, "stacks", stacks)
        object.__setattr__(b, "_hash", hash((tiers, stacks)))
        return b

    def __setattr__(self, name, value):
        raise AttributeError("Bay is immutable")

    def __eq__(self, other):
        if not isinstance(other, Bay):
            return NotImplemented
        return self.tiers == other.tiers and self.stacks == other.stacks

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Bay(tiers={self.tiers}, stacks={[list(s) for s in self.stacks]})"

    def __str__(self):
        width = max([len(str(x)) for s in self.stacks for x in s] + [1])
        rows = []
        for t in range(self.tiers - 1, -1, -1):
            cells = [str(s[t]).rjust(width) if t < len(s) else " " * width for s in self.stacks]
            rows.append("|" + "|".join(cells) + "|")
        return "\n".join(rows)

    @property
    def columns(self):
        return len(self.stacks)

    @property
    def n_containers(self):
        return sum(len(s) for s in self.stacks)

    def labels(self):
        return sorted(x for s in self.stacks for x in s)

    def is_empty(self):
        return not any(self.stacks)

    def locate(self, label):
        """Return ``(column, tier)`` of ``label``."""
        for i, s in enumerate(self.stacks):
            if label in s:
                return i, s.index(label)
        raise KeyError(label)

    def column_min(self, i, empty=None):
        s = self.stacks[i]
        return min(s) if s else empty

    def is_regular(self):
        """Whether the bay satisfies C >= P >= 3, the regime used for experiments."""
        return self.columns >= self.tiers >= 3


def target(bay):
    """Smallest label in the bay, or None when the bay is empty."""
    best = None
    for s in bay.stacks:
        if s:
            m = min(s)
            if best is None or m < best:
                best = m
    return best


def target_column(bay):
    t = target(bay)
    if t is None:
        return None, None
    for i, s in enumerate(bay.stacks):
        if t in s:
            return t, i


def is_blocked(bay):
    t, c = target_column(bay)
    return t is not None and bay.stacks[c][-1] != t


def apply_move(bay, m):
    """Return the bay obtained by playing ``m``; raises IllegalMove otherwise."""
    t, c = target_column(bay)
    if t is None:
        raise IllegalMove("bay is empty")
    stacks = list(bay.stacks)
    src = m.from_column
    if not 0 <= src < len(stacks) or not stacks[src] or stacks[src][-1] != m.container:
        raise IllegalMove(f"{m.container} is not on top of column {src + 1}")
    if m.kind is MoveKind.RETRIEVE:
        if m.container != t:
            raise IllegalMove(f"{m.container} is not the target ({t})")
        stacks[src] = stacks[src][:-1]
        return Bay._trusted(bay.tiers, tuple(stacks))
    dst = m.to_column
    if src != c:
        raise IllegalMove(f"{m.container} does not block target {t}")
    if m.container == t:
        raise IllegalMove(f"{t} is the target and must be retrieved")
    if dst is None or not 0 <= dst < len(stacks) or dst == src:
        raise IllegalMove(f"bad destination column {dst}")
    if len(stacks[dst]) >= bay.tiers:
        raise IllegalMove(f"column {dst + 1} is full")
    stacks[src] = stacks[src][:-1]
    stacks[dst] = stacks[dst] + (m.container,)
    return Bay._trusted(bay.tiers, tuple(stacks))


def legal_relocations(bay):
    """All relocations of the topmost container blocking the target."""
    t, c = target_column(bay)
    if t is None or bay.stacks[c][-1] == t:
        raise NotBlocked("target is not blocked")
    r = bay.stacks[c][-1]
    return [relocate(r, c, j) for j, s in enumerate(bay.stacks)
            if j != c and len(s) < bay.tiers]


def pop_retrievable(bay):
    """Retrieve targets while they sit on top. Returns ``(bay, retrievals)``."""
    stacks = list(bay.stacks)
    events = []
    while True:
        best, col = None, -1
        for i, s in enumerate(stacks):
            if s:
                m = min(s)
                if best is None or m < best:
                    best, col = m, i
        if best is None or stacks[col][-1] != best:
            break
        events.append(retrieve(best, col))
        stacks[col] = stacks[col][:-1]
    if not events:
        return bay, events
    return Bay._trusted(bay.tiers, tuple(stacks)), events


def replay(bay, moves):
    """Play ``moves`` on ``bay``; returns the final bay and the relocation count."""
    n_reloc = 0
    for m in moves:
        bay = apply_move(bay, m)
        n_reloc += m.kind is MoveKind.RELOCATE
    return bay, n_reloc


@dataclass(frozen=True)
class InstanceSpec:
    tiers: int
    columns: int
    fill: int
    seed: int | None = None

    def __post_init__(self):
        if self.fill > self.tiers - 1:
            raise ValueError("fill height must be at most tiers - 1")
        if self.fill < 0 or self.columns < 1:
            raise ValueError("invalid instance shape")

    @property
    def n_containers(self):
        return self.fill * self.columns


def generate_uniform(spec, rng=None):
    """Uniform bay with exactly ``spec.fill`` containers per column.

    A uniform permutation of ``1..h*C`` is laid out column by column, bottom
    to top, so every filling is equally likely.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    h = spec.fill
    perm = rng.permutation(spec.n_containers) + 1
    stacks = tuple(tuple(int(x) for x in perm[h * i:h * (i + 1)]) for i in range(spec.columns))
    return Bay._trusted(spec.tiers, stacks)


def relabel(bay):
    """Renumber labels to ``1..N`` keeping their relative order."""
    rank = {x: i + 1 for i, x in enumerate(bay.labels())}
    return Bay._trusted(bay.tiers, tuple(tuple(rank[x] for x in s) for s in bay.stacks))


# -- instance files ---------------------------------------------------------

def bay_to_dict(bay):
    return {"tiers": bay.tiers, "columns": bay.columns, "stacks": [list(s) for s in bay.stacks]}


def bay_from_dict(d):
    try:
        tiers, columns, stacks = d["tiers"], d["columns"], d["stacks"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing field {e}") from None
    if not isinstance(stacks, list) or len(stacks) != columns:
        raise ParseError(f"'stacks' must list {columns} columns")
    for i, s in enumerate(stacks):
        if not isinstance(s, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in s):
            raise ParseError(f"stacks[{i}]: expected a list of integer labels")
    try:
        return Bay(tiers, stacks)
    except ValueError as e:
        raise ParseError(str(e)) from None


def dumps(bay):
    return json.dumps(bay_to_dict(bay))


def loads(text):
    """Parse a bay from JSON or from the plain-text form.

    Plain text: a header line ``P C`` followed by one line per column with
    labels listed bottom to top (a blank line is an empty column).
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            d = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {e.lineno}: {e.msg}") from None
        return bay_from_dict(d)
    return _parse_text(text)


def _parse_text(text):
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    while lines and not lines[0].strip():
        lines.pop(0)
    if not lines:
        raise ParseError("empty instance")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError("line 1: header must be 'P C'")
    try:
        tiers, columns = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("line 1: header must hold two integers") from None
    body = lines[1:1 + columns]
    body += [""] * (columns - len(body))
    if any(ln.strip() for ln in lines[1 + columns:]):
        raise ParseError(f"more than {columns} column lines")
    stacks = []
    for k, ln in enumerate(body, start=2):
        try:
            stacks.append([int(x) for x in ln.split()])
        except ValueError:
            raise ParseError(f"line {k}: labels must be integers") from None
    seen = set()
    for k, s in enumerate(stacks, start=2):
        if len(s) > tiers:
            raise ParseError(f"line {k}: column holds {len(s)} containers, tiers={tiers}")
        for x in s:
            if x in seen:
                raise ParseError(f"line {k}: duplicate label {x}")
            seen.add(x)
    try:
        return Bay(tiers, stacks)
    except ValueError as e:
        raise ParseError(str(e)) from None


def load(path):
    return loads(Path(path).read_text())


def save(bay, path, **extra):
    d = bay_to_dict(bay)
    d.update(extra)
    Path(path).write_text(json.dumps(d) + "\n")


def instance_rngs(seed, n):
    """``n`` independent generators derived from one master seed.

    Instance ``i`` always gets the same stream, whatever order or process
    evaluates it.
    """
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def instance_stream(spec, n, seed):
    """Yield ``(rng, bay)`` for ``n`` uniform instances; ``rng`` continues the
    instance's own stream for any further randomness."""
    for rng in instance_rngs(seed, n):
        yield rng, generate_uniform(spec, rng)
