"""State elimination solvers and elimination-order heuristics."""
from .order import (ALL, BFS, MIN_PROD, NAMES, NUM_NEW, RANDOM, REVERSE_BFS,
                    TARGET_BFS, Heuristic, new_transitions, pair_count, plan)
from .solve import (Workspace, accumulated_reward, lra, order_states,
                    reach_probability)

__all__ = [
    "ALL", "BFS", "MIN_PROD", "NAMES", "NUM_NEW", "RANDOM", "REVERSE_BFS",
    "TARGET_BFS", "Heuristic", "Workspace", "accumulated_reward", "lra",
    "new_transitions", "order_states", "pair_count", "plan",
    "reach_probability",
]
