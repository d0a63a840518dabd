import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_bay
from oracles import all_bays, z_opt
from crp import Bay, SolverConfig, gap_curve, nodes_to_optimality, solve
from crp.astar import BudgetZero, optimal_path_lb_gap
from crp.bay import InstanceSpec, generate_uniform, replay
from crp.bounds import s_full
from crp.heuristics import z_h


def test_fig2_tree(small_bay):
    buf = io.StringIO()
    out = solve(small_bay, SolverConfig(lb_depth=0), trace=buf)
    assert (out.z, out.gap, out.nodes) == (4, 0, 6)
    rows = [ln.split(",") for ln in buf.getvalue().splitlines()]
    levels = [int(r[0]) for r in rows]
    assert levels == [0, 1, 1, 2, 2, 2, 2]
    assert [(int(r[2]), int(r[3])) for r in rows] == [(2, 4), (3, 4), (3, 5), (4, 4), (4, 5), (4, 5), (4, 5)]
    assert [r[4] for r in rows] == ["branch", "branch", "branch", "prune-equal",
                                    "prune-incumbent", "prune-incumbent", "prune-incumbent"]


def test_fig2_full_lookahead_closes_at_root(small_bay):
    out = solve(small_bay)
    assert (out.z, out.gap, out.nodes) == (4, 0, 0)


def test_moves_are_a_solution(rng):
    for _ in range(50):
        b = random_bay(rng, 5, 4, 13)
        out = solve(b)
        final, n = replay(b, out.moves)
        assert final.is_empty() and n == out.z


def test_budget_one(small_bay):
    out = solve(small_bay, SolverConfig(node_budget=1, lb_depth=0))
    assert out.z == 4 and out.gap == 4 - out.lower and out.gap >= 0
    assert out.nodes <= 1


def test_budget_zero_rejected(small_bay):
    with pytest.raises(BudgetZero):
        SolverConfig(node_budget=0)
    with pytest.raises(BudgetZero):
        gap_curve(small_bay, [0, 1])
    with pytest.raises(ValueError):
        SolverConfig(upper="X")


def test_fig2_gap_curve(small_bay):
    gaps = [g for _, g in gap_curve(small_bay, range(1, 8), SolverConfig(lb_depth=0))]
    assert gaps == [2, 1, 1, 1, 1, 0, 0]


def test_gap_curve_needs_sorted(small_bay):
    with pytest.raises(ValueError):
        gap_curve(small_bay, [5, 1])


@pytest.mark.parametrize("depth", [0, 1, 2, None])
@pytest.mark.parametrize("upper", ["H", "TH"])
def test_all_small_bays_exact(depth, upper):
    for stacks in all_bays(3, 2):
        out = solve(Bay(3, stacks), SolverConfig(node_budget=None, lb_depth=depth, upper=upper))
        assert out.optimal and out.z == z_opt(stacks, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle_random(seed):
    rng = np.random.default_rng(seed)
    b = random_bay(rng, 4, 4, 10)
    out = solve(b, SolverConfig(node_budget=None))
    assert out.z == z_opt(b.stacks, 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gap_non_increasing_and_certified(seed):
    rng = np.random.default_rng(seed)
    b = generate_uniform(InstanceSpec(4, 6, 3), rng)
    z = solve(b, SolverConfig(node_budget=None)).z
    curve = gap_curve(b, [1, 2, 5, 10, 50, 200, 10**4], SolverConfig(lb_depth=0))
    gaps = [g for _, g in curve]
    assert gaps == sorted(gaps, reverse=True)
    for budget, g in curve:
        out = solve(b, SolverConfig(node_budget=budget, lb_depth=0))
        assert out.gap == g
        assert out.lower <= z <= out.z


def test_tighter_bound_fewer_nodes():
    rng = np.random.default_rng(3)
    tot0 = totn = 0
    for _ in range(60):
        b = generate_uniform(InstanceSpec(4, 6, 3), rng)
        tot0 += nodes_to_optimality(b, lb_depth=0)
        totn += nodes_to_optimality(b)
    assert totn <= tot0


def test_optimal_path_lb_gap(small_bay):
    gaps = optimal_path_lb_gap(small_bay)
    assert gaps[0] == (0, 4 - s_full(small_bay))
    assert all(g >= 0 for _, g in gaps)


def test_upper_is_heuristic_at_tiny_budget(rng):
    b = generate_uniform(InstanceSpec(4, 7, 3), rng)
    assert solve(b, SolverConfig(node_budget=1)).z <= z_h(b)
