import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_bay
from oracles import all_bays, blocking_count, z_opt
from crp import Bay
from crp.bay import apply_move, legal_relocations, pop_retrievable
from crp.bounds import cumulative, discarded_bays, max_of_mins, s0, s_full, s_p


def test_counting_bound_example(small_bay):
    # 6 blocks 1 and 4 but counts once; 5 blocks 2
    assert s0(small_bay) == 2


def test_lookahead_example(small_bay):
    assert [s_p(small_bay, p) for p in range(4)] == [2, 3, 4, 4]
    mm = [max_of_mins(b) for _, b in discarded_bays(small_bay)]
    assert mm[:2] == [3, 4]
    assert s_full(small_bay) == 4


def test_counting_matches_oracle_count(rng):
    for _ in range(200):
        b = random_bay(rng, 4, 4, 12)
        assert s0(b) == blocking_count(b.stacks)


def test_negative_depth():
    with pytest.raises(ValueError):
        s_p(Bay(3, [[1]]), -1)


def test_max_of_mins_empty():
    with pytest.raises(ValueError):
        max_of_mins(Bay(3, [[], []]))


def test_empty_bay_bounds():
    b = Bay(3, [[], []])
    assert s0(b) == 0 and s_full(b) == 0


def test_all_small_bays_admissible():
    for stacks in all_bays(3, 2):
        b = Bay(3, stacks)
        z = z_opt(stacks, 3)
        vals = [s_p(b, p) for p in range(7)]
        assert vals == sorted(vals)
        assert vals[-1] <= z


def test_saturation(rng):
    # beyond N - C the bound cannot change
    for _ in range(200):
        b = random_bay(rng, 5, 4, 15)
        assert s_p(b, 15 - 5) == s_full(b) == s_p(b, 40)


def test_cumulative():
    assert cumulative(3, 2) == 5


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6), st.integers(3, 5))
def test_depth_monotone(seed, cols, tiers):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, cols * tiers))
    b = random_bay(rng, cols, tiers, n)
    vals = [s_p(b, p) for p in range(n + 1)]
    assert all(a <= c for a, c in zip(vals, vals[1:]))


def _walk(rng, b, depth):
    """Random root-to-node path: (level, bay) pairs after pending retrievals."""
    b, _ = pop_retrievable(b)
    out = [(0, b)]
    for lvl in range(1, depth + 1):
        if b.is_empty():
            break
        moves = legal_relocations(b)
        b, _ = pop_retrievable(apply_move(b, moves[rng.integers(len(moves))]))
        out.append((lvl, b))
    return out


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_path_monotone(seed):
    rng = np.random.default_rng(seed)
    b = random_bay(rng, 6, 4, 16)
    path = _walk(rng, b, 12)
    for p in (0, 1, 2, 16):
        cum = [cumulative(s_p(x, p), lvl) for lvl, x in path]
        assert all(a <= c for a, c in zip(cum, cum[1:]))
