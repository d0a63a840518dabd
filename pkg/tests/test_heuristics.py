import pytest

from conftest import random_bay
from oracles import all_bays, z_opt
from crp import Bay
from crp.bay import MoveKind, replay
from crp.bounds import s0, s_p
from crp.heuristics import (InternalError, h_choice, heuristic_h, myopic_heuristic,
                            nearest_relocation, replay_count, tree_heuristic, z_h)


def _describe(moves):
    return [(m.kind.value, m.container, m.from_column, m.to_column) for m in moves]


def test_h_sequence_example(small_bay):
    res = heuristic_h(small_bay)
    assert res.z == 4
    assert _describe(res.moves) == [
        ("relocate", 6, 0, 2), ("retrieve", 1, 0, None),
        ("relocate", 5, 1, 0), ("retrieve", 2, 1, None),
        ("relocate", 6, 2, 1), ("retrieve", 3, 2, None),
        ("relocate", 5, 0, 1), ("retrieve", 4, 0, None),
        ("retrieve", 5, 1, None), ("retrieve", 6, 1, None)]


def test_h_upper_bound_can_grow(tall_bay, tall_bay_moved):
    # (b) is a child of (a) one relocation down: cumulative U goes from 7 to 8
    assert z_h(tall_bay) == 7
    assert z_h(tall_bay_moved) + 1 == 8


def test_h_choice_rules():
    inf = float("inf")
    # good columns: tightest minimum above r
    assert h_choice([1, 9, 7, inf], [2, 1, 1, 0], 4, 0, 5) == 2
    # no good column: largest minimum, ties to lowest index
    assert h_choice([1, 3, 3], [2, 1, 1], 4, 0, 5) == 1
    with pytest.raises(InternalError):
        h_choice([1, 3], [2, 4], 4, 0, 5)


def test_moves_replay_legally(rng):
    for _ in range(100):
        b = random_bay(rng, 5, 4, 14)
        for res in (heuristic_h(b), tree_heuristic(b, 2), nearest_relocation(b),
                    myopic_heuristic(b, 5, 4)):
            final, n = replay(b, res.moves)
            assert final.is_empty() and n == res.relocations
            assert replay_count(b, res.moves) == n


def test_replay_count_rejects_partial(small_bay):
    with pytest.raises(ValueError):
        replay_count(small_bay, heuristic_h(small_bay).moves[:2])


def test_th_width_one_is_h(rng):
    for _ in range(100):
        b = random_bay(rng, 5, 4, 14)
        assert tree_heuristic(b, 1).z == z_h(b)


def test_th_dominates(rng):
    for _ in range(40):
        b = random_bay(rng, 5, 4, 10)
        vals = [tree_heuristic(b, w).z for w in (1, 2, 3, 4)]
        assert all(a >= c for a, c in zip(vals, vals[1:]))


def _plain_th(stacks, tiers, width):
    # unpruned TH-L: the first `width` ranked columns that are not full
    cols = [list(x) for x in stacks]
    while any(cols):
        t = min(x for c in cols for x in c)
        c = next(i for i, col in enumerate(cols) if t in col)
        if cols[c][-1] != t:
            break
        cols[c].pop()
    if not any(cols):
        return 0
    r = cols[c][-1]
    mins = {j: min(col) if col else float("inf") for j, col in enumerate(cols)}
    opts = [j for j in range(len(cols)) if j != c]
    good = sorted((j for j in opts if mins[j] > r), key=lambda j: mins[j])
    bad = sorted((j for j in opts if mins[j] < r), key=lambda j: -mins[j])
    ranked = good + bad
    chosen = [d for d in ranked[:width] if len(cols[d]) < tiers]
    chosen = chosen or [next(d for d in ranked if len(cols[d]) < tiers)]
    best = None
    for d in chosen:
        nxt = [list(x) for x in cols]
        nxt[c].pop()
        nxt[d].append(r)
        v = 1 + _plain_th(nxt, tiers, width)
        best = v if best is None else min(best, v)
    return best


@pytest.mark.parametrize("width, n", [(2, 11), (3, 9)])
def test_th_pruning_keeps_value(rng, width, n):
    for _ in range(60):
        b = random_bay(rng, 4, 4, n)
        res = tree_heuristic(b, width)
        assert res.z == _plain_th(b.stacks, 4, width) == replay_count(b, res.moves)
        assert tree_heuristic(b, width, memo=True).z == res.z


def test_th_capped_never_worse_than_h(rng):
    for _ in range(30):
        b = random_bay(rng, 6, 4, 18)
        assert tree_heuristic(b, 3, node_cap=5).z <= z_h(b)


def test_th_full_width_equals_oracle():
    for stacks in all_bays(3, 2):
        assert tree_heuristic(Bay(3, stacks), 2).z == z_opt(stacks, 3)


def test_th_bad_width(small_bay):
    with pytest.raises(ValueError):
        tree_heuristic(small_bay, 0)


def test_nearest_prefers_adjacent():
    b = Bay(4, [[], [2, 1], [], [3]])
    res = nearest_relocation(b)
    assert _describe(res.moves)[0] == ("relocate", 1, 1, 0) or res.moves[0].kind is MoveKind.RETRIEVE


def test_nearest_choice_tie_goes_low():
    b = Bay(4, [[5], [1, 2], [6]])
    first = nearest_relocation(b).moves[0]
    assert (first.container, first.to_column) == (2, 0)


def test_myopic_full_information_is_h(rng):
    for _ in range(200):
        b = random_bay(rng, 6, 4, 18)
        assert myopic_heuristic(b, 18, 5).moves == heuristic_h(b).moves


def test_myopic_after_reveal_is_h(rng):
    for _ in range(100):
        b = random_bay(rng, 6, 4, 18)
        assert myopic_heuristic(b, 3, 1).moves == heuristic_h(b).moves


def test_myopic_masks_unknown():
    # known: 1, 2. Unknown 3 and 4 look alike before the reveal, so 5 goes to
    # the emptier of the two masked columns even though 4 would be tighter
    b = Bay(4, [[1, 5], [3, 7, 8], [4]])
    first = myopic_heuristic(b, 2, 3).moves[0]
    assert (first.container, first.to_column) == (5, 2)
    assert heuristic_h(b).moves[0].to_column == 2
    b = Bay(4, [[1, 5], [4, 7, 8], [3]])
    assert myopic_heuristic(b, 2, 3).moves[0].to_column == 2
    assert heuristic_h(b).moves[0].to_column == 1


def test_myopic_bad_clock(small_bay):
    with pytest.raises(ValueError):
        myopic_heuristic(small_bay, 2, 2, clock="hours")


def test_at_most_c_containers(rng):
    for _ in range(300):
        cols = int(rng.integers(3, 6))
        b = random_bay(rng, cols, 4, int(rng.integers(1, cols + 1)))
        assert s0(b) == z_opt(b.stacks, 4) == z_h(b)


def test_at_most_c_plus_one_containers(rng):
    for _ in range(300):
        cols = int(rng.integers(3, 6))
        b = random_bay(rng, cols, 4, cols + 1)
        z = z_opt(b.stacks, 4)
        assert z_h(b) == z
        assert s_p(b, 1) <= z


def test_one_step_bound_not_tight_with_c_plus_one():
    # two containers above the target and a single empty column: one of them
    # must make a bad move, which the discarded-bay bound cannot see
    b = Bay(4, [[], [1, 4, 3], [2]])
    assert (s_p(b, 1), z_opt(b.stacks, 4), z_h(b)) == (2, 3, 3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_h_within_triangle(rng, k):
    slack = 2 if k == 2 else k * (k + 1) // 2
    for _ in range(150):
        cols = int(rng.integers(k, 6))
        b = random_bay(rng, cols, 4, cols + k)
        assert z_h(b) <= z_opt(b.stacks, 4) + slack
