from .lp import (
    EQ,
    GE,
    LE,
    FEASIBILITY_TOL,
    LinearProgram,
    Solution,
    solve_lp,
)
from .milp import INTEGRALITY_TOL, MilpModel, solve_milp
from .oracle import enumerate_assignments

__all__ = [
    "LE", "EQ", "GE",
    "FEASIBILITY_TOL", "INTEGRALITY_TOL",
    "LinearProgram", "MilpModel", "Solution",
    "solve_lp", "solve_milp", "enumerate_assignments",
]
