"""Exact branch-and-bound MILP solver over the simplex LP relaxation.

Best-bound node selection, most-fractional branching, integrality
tolerance 1e-6 (documented constant, not configuration).
"""

import heapq
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lp import (
    BUDGET_EXCEEDED,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    Solution,
    solve_lp,
)

INTEGRALITY_TOL = 1e-6


@dataclass
class MilpModel:
    lp: LinearProgram
    integer: Sequence[bool]

    def __post_init__(self):
        self.integer = list(self.integer)
        if len(self.integer) != self.lp.num_vars:
            raise ValueError("integrality flags do not match variable count")
        for j, flag in enumerate(self.integer):
            if flag:
                lo, hi = self.lp.bounds[j]
                if lo is None or hi is None:
                    raise ValueError(f"integral variable {j} must have finite bounds")


def _most_fractional(x: np.ndarray, integer: Sequence[bool]) -> Optional[int]:
    best, best_j = -1.0, None
    for j, flag in enumerate(integer):
        if not flag:
            continue
        frac = abs(x[j] - round(x[j]))
        if frac > INTEGRALITY_TOL and frac > best + 1e-15:
            best, best_j = frac, j
    return best_j


def _feasible(lp: LinearProgram, x: np.ndarray, tol: float = 1e-7) -> bool:
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and x[j] < lo - tol:
            return False
        if hi is not None and x[j] > hi + tol:
            return False
    if len(lp.b):
        r = lp.A @ x
        for i, s in enumerate(lp.senses):
            if s == "<=" and r[i] > lp.b[i] + tol:
                return False
            if s == ">=" and r[i] < lp.b[i] - tol:
                return False
            if s == "=" and abs(r[i] - lp.b[i]) > tol:
                return False
    return True


def _greedy_incumbent(model: MilpModel, root: Solution) -> Optional[Solution]:
    """Round the relaxation for an initial bound; pruning aid only, the
    branch-and-bound search still proves optimality."""
    x = root.values.copy()
    for j, flag in enumerate(model.integer):
        if flag:
            x[j] = round(x[j])
    if not _feasible(model.lp, x):
        x = root.values.copy()
        for j, flag in enumerate(model.integer):
            if flag:
                x[j] = np.floor(x[j] + 1e-9)
        if not _feasible(model.lp, x):
            return None
    return Solution(
        status=OPTIMAL, values=x, objective=float(model.lp.c @ x), certificate=False,
    )


def solve_milp(model: MilpModel, budget: Optional[float] = None) -> Solution:
    """Branch and bound. `budget` is a wall-clock limit in seconds.

    Within budget, returns the best incumbent found with certificate
    False; with no budget (or if the tree is exhausted in time), the
    returned solution is exact and carries certificate True.
    """
    lp = model.lp
    t0 = time.monotonic()
    sense = -1.0 if lp.maximize else 1.0

    root = solve_lp(lp)
    if root.status in (INFEASIBLE, UNBOUNDED):
        return Solution(status=root.status, node_count=1)

    incumbent: Optional[Solution] = _greedy_incumbent(model, root)
    nodes = 1
    counter = 0
    # heap entries: (bound in minimize space, insertion order, bounds list)
    heap = [(sense * root.objective, counter, list(lp.bounds), root)]

    while heap:
        bound, _, node_bounds, relax = heapq.heappop(heap)
        if incumbent is not None and bound >= sense * incumbent.objective - 1e-9:
            continue
        if budget is not None and time.monotonic() - t0 > budget:
            if incumbent is not None:
                incumbent.certificate = False
                incumbent.node_count = nodes
                return incumbent
            return Solution(status=BUDGET_EXCEEDED, node_count=nodes)

        frac_var = _most_fractional(relax.values, model.integer)
        if frac_var is None:
            x = relax.values.copy()
            for j, flag in enumerate(model.integer):
                if flag:
                    x[j] = round(x[j])
            cand = Solution(
                status=OPTIMAL,
                values=x,
                objective=float(lp.c @ x),
                certificate=True,
            )
            if incumbent is None or sense * cand.objective < sense * incumbent.objective - 1e-12:
                incumbent = cand
            continue

        v = relax.values[frac_var]
        for lo, hi in (
            (node_bounds[frac_var][0], float(np.floor(v))),
            (float(np.ceil(v)), node_bounds[frac_var][1]),
        ):
            if lo is not None and hi is not None and lo > hi:
                continue
            child_bounds = list(node_bounds)
            child_bounds[frac_var] = (lo, hi)
            child_lp = LinearProgram(
                c=lp.c, A=lp.A, senses=lp.senses, b=lp.b,
                bounds=child_bounds, maximize=lp.maximize,
            )
            child = solve_lp(child_lp)
            nodes += 1
            if child.status != OPTIMAL:
                continue
            child_bound = sense * child.objective
            if incumbent is not None and child_bound >= sense * incumbent.objective - 1e-9:
                continue
            counter += 1
            heapq.heappush(heap, (child_bound, counter, child_bounds, child))

    if incumbent is None:
        return Solution(status=INFEASIBLE, node_count=nodes)
    incumbent.node_count = nodes
    incumbent.certificate = True
    return incumbent
