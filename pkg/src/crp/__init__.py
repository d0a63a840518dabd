"""Restricted container relocation: exact search, bounds, heuristics and a
two-stage variant with a partially known retrieval order."""
from .astar import SolveOutcome, SolverConfig, gap_curve, nodes_to_optimality, solve
from .bay import (Bay, IllegalMove, InstanceSpec, MoveEvent, MoveKind, NotBlocked, ParseError,
                  apply_move, generate_uniform, legal_relocations, load, loads, pop_retrievable,
                  replay, save)
from .bounds import max_of_mins, s0, s_full, s_p
from .heuristics import heuristic_h, myopic_heuristic, nearest_relocation, tree_heuristic, z_h
from .stochastic import (SamplingParams, TwoStageInstance, asa_star, error_bound_e1_e2,
                         error_bound_e3, exact_two_stage, sample_size)

__all__ = ["SolveOutcome", "SolverConfig", "gap_curve", "nodes_to_optimality", "solve",
           "Bay", "IllegalMove", "InstanceSpec", "MoveEvent", "MoveKind", "NotBlocked", "ParseError",
           "apply_move", "generate_uniform", "legal_relocations", "load", "loads", "pop_retrievable",
           "replay", "save", "max_of_mins", "s0", "s_full", "s_p", "heuristic_h", "myopic_heuristic",
           "nearest_relocation", "tree_heuristic", "z_h", "SamplingParams", "TwoStageInstance", "asa_star",
           "error_bound_e1_e2", "error_bound_e3", "exact_two_stage", "sample_size"]

__version__ = "0.1.0"
