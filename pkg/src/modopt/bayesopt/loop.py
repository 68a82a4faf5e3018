"""Sequential optimization loops: surrogate-driven, random, and grid.

Decision variables are normalized to the unit box for the surrogate;
raw values are only materialized when the objective is called. All
loops maximize and record their full evaluation history.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .acquisition import (
    ACQUISITIONS,
    GP_UCB,
    SweepConfig,
    gp_ucb_kappa,
    maximize_acquisition,
)
from .gp import gp_fit
from .kernels import KernelSpec


@dataclass
class BoConfig:
    bounds: Sequence[Tuple[float, float]]
    budget: int = 60
    n_init: int = 10
    acquisition: str = GP_UCB
    delta: float = 0.1              # confidence parameter of the kappa schedule
    kappa: float = 2.0              # fixed weight when acquisition == "ucb"
    seed: int = 0
    lengthscale: float = 0.2
    signal_variance: float = 1.0
    noise_variance: float = 1e-4
    smoothness: float = 2.5
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def __post_init__(self):
        if self.acquisition not in ACQUISITIONS:
            raise ValueError(f"unknown acquisition {self.acquisition!r}")
        if not (self.budget >= self.n_init >= 1):
            raise ValueError("need budget >= n_init >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        for lo, hi in self.bounds:
            if not hi > lo:
                raise ValueError("bounds must have hi > lo")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def to_raw(self, x_norm: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo + np.asarray(x_norm) * (hi - lo)

    def to_norm(self, x_raw: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return (np.asarray(x_raw) - lo) / (hi - lo)

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(
            smoothness=self.smoothness,
            lengthscale=self.lengthscale,
            signal_variance=self.signal_variance,
        )


@dataclass
class Evaluation:
    index: int
    x_raw: np.ndarray
    x_norm: np.ndarray
    y: Optional[float]
    kappa: Optional[float]
    acquisition: str            # "init", acquisition name, "random", or "grid"
    failed: bool = False
    error: Optional[str] = None


@dataclass
class SearchResult:
    best_x: Optional[np.ndarray]
    best_y: Optional[float]
    history: List[Evaluation]

    def best_so_far(self) -> List[float]:
        """Running maximum over successful evaluations."""
        out, best = [], -np.inf
        for ev in self.history:
            if not ev.failed:
                best = max(best, ev.y)
            out.append(best)
        return out


def _call_objective(objective, x_raw):
    try:
        return float(objective(np.asarray(x_raw, dtype=float))), None
    except Exception as exc:  # recorded, not propagated: one bad point should not kill a run
        return None, f"{type(exc).__name__}: {exc}"


def _update_best(best, ev: Evaluation):
    best_x, best_y = best
    if not ev.failed and (best_y is None or ev.y > best_y):
        return ev.x_raw, ev.y
    return best_x, best_y


def bo_loop(objective: Callable[[np.ndarray], float], cfg: BoConfig) -> SearchResult:
    """Surrogate-guided maximization of a black-box objective.

    Runs `n_init` scrambled-Sobol evaluations, then proposes the
    acquisition argmax until the evaluation budget is spent. History
    records every evaluation with the exploration weight used.
    """
    d = cfg.dim
    history: List[Evaluation] = []
    best: Tuple[Optional[np.ndarray], Optional[float]] = (None, None)

    sob = qmc.Sobol(d=d, scramble=True, seed=cfg.seed)
    n_pow2 = 1 << (cfg.n_init - 1).bit_length()
    init_points = sob.random(n_pow2)[: cfg.n_init]
    for i, x_norm in enumerate(init_points):
        x_raw = cfg.to_raw(x_norm)
        y, err = _call_objective(objective, x_raw)
        ev = Evaluation(i, x_raw, np.asarray(x_norm), y, None, "init",
                        failed=err is not None, error=err)
        history.append(ev)
        best = _update_best(best, ev)

    spec = cfg.kernel_spec()
    for i in range(cfg.n_init, cfg.budget):
        good = [(ev.x_norm, ev.y) for ev in history if not ev.failed]
        if not good:
            # nothing fit-able yet; fall back to more quasi-random probing
            x_norm = np.asarray(sob.random(1)[0])
            kappa = None
        else:
            X = np.array([g[0] for g in good])
            y = np.array([g[1] for g in good])
            model = gp_fit(X, y, spec, cfg.noise_variance)
            if cfg.acquisition == GP_UCB:
                kappa = gp_ucb_kappa(len(y), d, cfg.delta)
            else:
                kappa = cfg.kappa
            x_norm = maximize_acquisition(
                model, cfg.acquisition, kappa, seed=cfg.seed + 7919 * (i + 1),
                dim=d, sweep=cfg.sweep,
                evaluated=np.array([ev.x_norm for ev in history]),
            )
        x_raw = cfg.to_raw(x_norm)
        yv, err = _call_objective(objective, x_raw)
        ev = Evaluation(i, x_raw, np.asarray(x_norm), yv, kappa, cfg.acquisition,
                        failed=err is not None, error=err)
        history.append(ev)
        best = _update_best(best, ev)

    return SearchResult(best_x=best[0], best_y=best[1], history=history)


def random_search(
    objective: Callable[[np.ndarray], float],
    bounds: Sequence[Tuple[float, float]],
    budget: int,
    seed: int,
) -> SearchResult:
    """Uniform independent sampling baseline at the same budget."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    history: List[Evaluation] = []
    best: Tuple[Optional[np.ndarray], Optional[float]] = (None, None)
    for i in range(budget):
        x_norm = rng.random(len(bounds))
        x_raw = lo + x_norm * (hi - lo)
        y, err = _call_objective(objective, x_raw)
        ev = Evaluation(i, x_raw, x_norm, y, None, "random",
                        failed=err is not None, error=err)
        history.append(ev)
        best = _update_best(best, ev)
    return SearchResult(best_x=best[0], best_y=best[1], history=history)


def grid_search(
    objective: Callable[[np.ndarray], float],
    grid: Sequence[Sequence[float]],
) -> SearchResult:
    """Exhaustive evaluation of a full factorial grid; the history is the
    complete table in row-major order of the per-dimension value lists."""
    history: List[Evaluation] = []
    best: Tuple[Optional[np.ndarray], Optional[float]] = (None, None)
    axes = [list(a) for a in grid]
    if any(not a for a in axes):
        raise ValueError("empty grid axis")
    lo = np.array([min(a) for a in axes])
    hi = np.array([max(a) for a in axes])
    span = np.where(hi > lo, hi - lo, 1.0)
    for i, combo in enumerate(itertools.product(*axes)):
        x_raw = np.asarray(combo, dtype=float)
        y, err = _call_objective(objective, x_raw)
        ev = Evaluation(i, x_raw, (x_raw - lo) / span, y, None, "grid",
                        failed=err is not None, error=err)
        history.append(ev)
        best = _update_best(best, ev)
    return SearchResult(best_x=best[0], best_y=best[1], history=history)
