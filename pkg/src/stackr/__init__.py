"""Solvers and benchmarks for labeled stack rearrangement."""

from .core import (Action, Arrangement, Geometry, Instance, Kind, Solution, SolverStats, StackError,
                   Verification, apply_action, canonical_key, decode_key, is_goal, is_permissible,
                   load_instance, replay, save_instance, verify_solution)
from .generate import Setup, generate_instance
from .heuristics import HeuristicKind
from .poly import PreconditionError, poly_clsr_solve, poly_d_solve, poly_lsr_solve, sort_stack
from .search import Algorithm, SearchConfig, SearchTimeout, Unsolvable, expand, solve

__version__ = "0.1.0"
