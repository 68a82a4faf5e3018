"""Dense bounded-variable simplex solver with Bland's anti-cycling rule.

Sized for the trip-assignment and rebalancing programs of the fleet
simulator: at most a few thousand variables, dense tableau, correctness
over speed. Variable bounds are handled implicitly in the ratio test
(upper bounds never become rows), which keeps branch-and-bound nodes at
the natural constraint dimension. Feasibility tolerance is 1e-7
(documented constant).
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import NumericalInstability

FEASIBILITY_TOL = 1e-7
PIVOT_TOL = 1e-9
INF = math.inf

LE, EQ, GE = "<=", "=", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass
class LinearProgram:
    """min (or max) c.x  subject to  A x (<=,=,>=) b  and  lo <= x <= hi.

    `bounds[j]` is a (lo, hi) pair; hi may be None for +inf and lo may be
    None for a free variable (handled by splitting internally).
    """

    c: Sequence[float]
    A: Sequence[Sequence[float]]
    senses: Sequence[str]
    b: Sequence[float]
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float).reshape(len(self.b), len(self.c)) \
            if len(self.b) else np.zeros((0, len(self.c)))
        self.b = np.asarray(self.b, dtype=float)
        self.senses = list(self.senses)
        n = len(self.c)
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        else:
            self.bounds = [tuple(bd) for bd in self.bounds]
        if self.A.shape != (len(self.b), n) or len(self.senses) != len(self.b):
            raise ValueError("inconsistent LP dimensions")
        for s in self.senses:
            if s not in (LE, EQ, GE):
                raise ValueError(f"unknown constraint sense {s!r}")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError("variable bound lo > hi")

    @property
    def num_vars(self) -> int:
        return len(self.c)


@dataclass
class Solution:
    status: str
    values: Optional[np.ndarray] = None
    objective: Optional[float] = None
    certificate: bool = False
    dual_objective: Optional[float] = None
    node_count: int = 1
    max_residual: float = 0.0
    extra: dict = field(default_factory=dict)


class _Standardized:
    """min c.x, A x = b, 0 <= x <= ub, with b >= 0 after row flips."""

    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        c = lp.c.copy() if not lp.maximize else -lp.c
        shift = np.zeros(n)
        split = [False] * n
        ub_orig = []
        for j, (lo, hi) in enumerate(lp.bounds):
            if lo is None:
                split[j] = True
                ub_orig.append(INF)      # positive part unbounded
            else:
                shift[j] = lo
                ub_orig.append(INF if hi is None else hi - lo)

        neg_col = {}
        ncols = n
        for j in range(n):
            if split[j]:
                neg_col[j] = ncols
                ncols += 1

        m = len(lp.b)
        A = np.zeros((m, ncols))
        if m:
            A[:, :n] = lp.A
        b = (lp.b - lp.A @ shift) if m else np.zeros(0)
        senses = list(lp.senses)
        for j, col in neg_col.items():
            A[:, col] = -A[:, j]

        cs = np.zeros(ncols)
        cs[:n] = c
        ub = np.array(ub_orig + [INF] * (ncols - n))
        for j, col in neg_col.items():
            cs[col] = -cs[j]
            # a free var with an upper bound keeps it on the positive part
            lo, hi = lp.bounds[j]
            if hi is not None:
                ub[j] = hi

        for i in range(m):
            if b[i] < 0:
                A[i] *= -1.0
                b[i] *= -1.0
                if senses[i] == LE:
                    senses[i] = GE
                elif senses[i] == GE:
                    senses[i] = LE

        slack_rows = []
        for i, s in enumerate(senses):
            if s == LE:
                slack_rows.append((i, 1.0))
            elif s == GE:
                slack_rows.append((i, -1.0))
        A_full = np.hstack([A, np.zeros((m, len(slack_rows)))])
        for k, (i, sgn) in enumerate(slack_rows):
            A_full[i, ncols + k] = sgn
        self.A = A_full
        self.b = b
        self.c = np.concatenate([cs, np.zeros(len(slack_rows))])
        self.ub = np.concatenate([ub, np.full(len(slack_rows), INF)])
        self.const = float(c @ shift)
        self.n_orig = n
        self.shift = shift
        self.split = split
        self.neg_col = neg_col
        self.senses = senses
        self.slack_basic = {i: ncols + k for k, (i, sgn) in enumerate(slack_rows) if sgn > 0}


def _bounded_simplex(T, cost, basis, ub, flipped, ncols):
    """Iterate to optimality in place; returns OPTIMAL or UNBOUNDED.

    All nonbasic variables sit at zero in the working representation;
    variables currently substituted as (upper - x) are marked in
    `flipped`. The rhs column always holds the basic values.
    """
    m = T.shape[0]
    while True:
        negative = cost[:ncols] < -PIVOT_TOL
        if not negative.any():
            return OPTIMAL
        enter = int(np.argmax(negative))  # Bland: lowest eligible index
        y = T[:, enter]
        rhs = T[:, -1]

        # candidate steps: (t, kind, row); kind 0 = basic to lower,
        # 1 = basic to upper, 2 = entering bound flip
        best_t = ub[enter]
        best = (2, -1) if best_t < INF else None
        pos = y > PIVOT_TOL
        if pos.any():
            rows = np.flatnonzero(pos)
            ts = rhs[rows] / y[rows]
            i = int(np.argmin(ts))
            tie = rows[ts <= ts[i] + 1e-12]
            r = int(min(tie, key=lambda k: basis[k]))
            t = rhs[r] / y[r]
            if best is None or t < best_t - 1e-12 or (t <= best_t + 1e-12 and best[0] == 2):
                if best is None or t < best_t - 1e-12:
                    best_t, best = t, (0, r)
                else:
                    best_t, best = min(t, best_t), (0, r)
        neg = y < -PIVOT_TOL
        if neg.any():
            rows = [i for i in np.flatnonzero(neg) if ub[basis[i]] < INF]
            if rows:
                ts = [(ub[basis[i]] - rhs[i]) / (-y[i]) for i in rows]
                order = sorted(range(len(rows)), key=lambda k: (ts[k], basis[rows[k]]))
                k = order[0]
                t, r = ts[k], rows[k]
                if best is None or t < best_t - 1e-12:
                    best_t, best = t, (1, r)
        if best is None:
            return UNBOUNDED

        kind = best[0]
        if kind == 2:
            # entering variable runs to its other bound; no basis change
            u = ub[enter]
            T[:, -1] -= u * y
            cost[-1] -= u * cost[enter]
            T[:, enter] *= -1.0
            cost[enter] *= -1.0
            flipped[enter] = not flipped[enter]
            continue
        r = best[1]
        if kind == 1:
            # leaving variable exits at its upper bound: rewrite its row
            # in terms of (upper - x) first, then pivot as usual
            lv = basis[r]
            u = ub[lv]
            T[r, :-1] *= -1.0
            T[r, lv] = 1.0
            T[r, -1] = u - T[r, -1]
            flipped[lv] = not flipped[lv]
        piv = T[r, enter]
        T[r] /= piv
        factors = T[:, enter].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r])
        cost -= cost[enter] * T[r]
        basis[r] = enter


def solve_lp(lp: LinearProgram) -> Solution:
    """Solve an LP exactly with the bounded-variable two-phase simplex.

    Rows whose slack can serve as the initial basic variable skip the
    artificial; when none are needed, phase 1 is skipped entirely.
    `values` live in the original variable space; `dual_objective` is
    recovered from the final basis (it equals the primal objective at
    optimality, up to numerical tolerance).
    """
    std = _Standardized(lp)
    A, b, c, ub = std.A, std.b, std.c, std.ub
    m, ncols = A.shape

    art_rows = [i for i in range(m) if i not in std.slack_basic]
    n_art = len(art_rows)
    flipped = np.zeros(ncols + n_art, dtype=bool)

    if n_art:
        T = np.hstack([A, np.zeros((m, n_art)), b.reshape(-1, 1)])
        ub_w = np.concatenate([ub, np.full(n_art, INF)])
        basis = [0] * m
        for kk, i in enumerate(art_rows):
            T[i, ncols + kk] = 1.0
            basis[i] = ncols + kk
        for i, col in std.slack_basic.items():
            basis[i] = col
        cost1 = np.zeros(ncols + n_art + 1)
        cost1[ncols:ncols + n_art] = 1.0
        for i in art_rows:
            cost1 -= T[i]
        status = _bounded_simplex(T, cost1, basis, ub_w, flipped, ncols + n_art)
        if status != OPTIMAL or -cost1[-1] > 1e-7 * max(1.0, float(np.abs(b).sum())):
            return Solution(status=INFEASIBLE)
        for i in range(m):
            if basis[i] >= ncols:
                for j in range(ncols):
                    if abs(T[i, j]) > 1e-8:
                        piv = T[i, j]
                        T[i] /= piv
                        factors = T[:, j].copy()
                        factors[i] = 0.0
                        T -= np.outer(factors, T[i])
                        basis[i] = j
                        break
        T = np.hstack([T[:, :ncols], T[:, -1:]])
        flipped = flipped[:ncols]
    else:
        T = np.hstack([A, b.reshape(-1, 1)])
        basis = [std.slack_basic[i] for i in range(m)]

    # phase-2 cost row in the working representation: flipped columns
    # stand for (ub - x), so their sign inverts and the constant moves
    # into the objective cell; then eliminate the basic contributions.
    cost = np.concatenate([c, [0.0]])
    for j in range(ncols):
        if flipped[j]:
            cost[-1] -= cost[j] * ub[j]
            cost[j] = -cost[j]
    for i, bi in enumerate(basis):
        if bi < ncols and abs(cost[bi]) > 0.0:
            cost -= cost[bi] * T[i]
    status = _bounded_simplex(T, cost, basis, ub, flipped, ncols)
    if status == UNBOUNDED:
        return Solution(status=UNBOUNDED)

    # working values: nonbasic at 0, basic from the rhs; flips map back
    x_work = np.zeros(ncols)
    for i, bi in enumerate(basis):
        if bi < ncols:
            x_work[bi] = T[i, -1]
    x_std = np.where(flipped[:ncols], ub - x_work, x_work)

    n = std.n_orig
    x = std.shift.copy()
    for j in range(n):
        x[j] += x_std[j]
        if std.split[j]:
            x[j] -= x_std[std.neg_col[j]]

    internal_obj = float(c @ x_std) + std.const
    objective = -internal_obj if lp.maximize else internal_obj

    max_res = 0.0
    if len(lp.b):
        r = lp.A @ x - lp.b
        for i, s in enumerate(lp.senses):
            if s == LE:
                max_res = max(max_res, float(r[i]))
            elif s == GE:
                max_res = max(max_res, float(-r[i]))
            else:
                max_res = max(max_res, abs(float(r[i])))
    if max_res > 1e-4 * max(1.0, float(np.abs(lp.b).sum()) if len(lp.b) else 1.0):
        raise NumericalInstability(f"optimal point violates constraints, residual {max_res:.3e}")

    # dual recovery from the final basis: y solves B^T y = c_B over the
    # unflipped standard-form columns, plus reduced-cost terms for
    # nonbasic variables resting at their upper bounds
    dual_obj = None
    basic = [bi for bi in basis if bi < ncols]
    basic_set = set(basic)
    if len(basic) == m:
        B = A[:, basic]
        try:
            yv = np.linalg.solve(B.T, c[basic])
            d = float(yv @ b) + std.const
            red = c - yv @ A
            for j in range(ncols):
                if j not in basic_set and flipped[j] and ub[j] < INF:
                    d += red[j] * ub[j]
            dual_obj = -d if lp.maximize else d
        except np.linalg.LinAlgError:
            dual_obj = None

    return Solution(
        status=OPTIMAL,
        values=x,
        objective=objective,
        certificate=True,
        dual_objective=dual_obj,
        max_residual=max_res,
    )
