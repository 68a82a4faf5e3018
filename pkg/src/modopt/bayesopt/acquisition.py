"""Acquisition functions and the candidate-sweep maximizer.

The maximizer is a seeded quasi-random sweep (scrambled Sobol points over
the unit box) followed by a deterministic pattern-search refinement
around the best candidates, so a fixed seed always proposes the same
point. Proposals are kept a minimum distance away from already-evaluated
inputs to protect the kernel matrix from exact duplicates.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm, qmc

from .gp import GpModel, gp_predict_batch

UCB = "ucb"
GP_UCB = "gp-ucb"
EI = "ei"
PI = "pi"
ACQUISITIONS = (UCB, GP_UCB, EI, PI)


def acq_value(kind: str, mean: float, stddev: float, incumbent: float, kappa: float) -> float:
    """Score of one candidate under the chosen rule (maximization).

    ucb / gp-ucb: mean + kappa * stddev. ei / pi use the standard normal
    improvement forms over the incumbent; the stddev -> 0 limits are
    max(0, mean - incumbent) and an indicator, respectively.
    """
    if stddev < 0:
        raise ValueError("negative stddev")
    if kind in (UCB, GP_UCB):
        return mean + kappa * stddev
    improvement = mean - incumbent
    if stddev == 0.0:
        if kind == EI:
            return max(0.0, improvement)
        return 1.0 if improvement > 0 else 0.0
    z = improvement / stddev
    if kind == EI:
        return improvement * norm.cdf(z) + stddev * norm.pdf(z)
    if kind == PI:
        return float(norm.cdf(z))
    raise ValueError(f"unknown acquisition {kind!r}")


def _acq_batch(kind, mean, std, incumbent, kappa):
    if kind in (UCB, GP_UCB):
        return mean + kappa * std
    imp = mean - incumbent
    out = np.where(imp > 0, np.maximum(imp, 0.0), 0.0).astype(float)
    pos = std > 0
    z = np.zeros_like(mean)
    z[pos] = imp[pos] / std[pos]
    if kind == EI:
        out[pos] = imp[pos] * norm.cdf(z[pos]) + std[pos] * norm.pdf(z[pos])
        out[~pos] = np.maximum(imp[~pos], 0.0)
    else:
        out[pos] = norm.cdf(z[pos])
        out[~pos] = (imp[~pos] > 0).astype(float)
    return out


def gp_ucb_kappa(n: int, d: int, delta: float = 0.1) -> float:
    """Exploration weight schedule of the bandit-style confidence rule:
    sqrt(2 * log(n^(d/2 + 2) * pi^2 / (3 * delta)))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return math.sqrt(2.0 * math.log(n ** (d / 2.0 + 2.0) * math.pi ** 2 / (3.0 * delta)))


@dataclass
class SweepConfig:
    n_candidates: int = 1024
    refine_top: int = 5
    refine_rounds: int = 6
    refine_step: float = 0.08
    min_separation: float = 1e-6


def maximize_acquisition(
    model: GpModel,
    kind: str,
    kappa: float,
    seed: int,
    dim: int,
    sweep: Optional[SweepConfig] = None,
    evaluated: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Best point of a seeded candidate sweep over the unit box [0,1]^d."""
    sweep = sweep or SweepConfig()
    incumbent = float(np.max(model.y))
    sob = qmc.Sobol(d=dim, scramble=True, seed=seed)
    cands = sob.random(sweep.n_candidates)

    mean, std = gp_predict_batch(model, cands)
    scores = _acq_batch(kind, mean, std, incumbent, kappa)
    order = np.lexsort((np.arange(len(scores)), -scores))  # stable: lowest index wins ties

    def score_one(x: np.ndarray) -> float:
        m, s = gp_predict_batch(model, x[None, :])
        return float(_acq_batch(kind, m, s, incumbent, kappa)[0])

    best_x = cands[order[0]].copy()
    best_v = float(scores[order[0]])
    for idx in order[: sweep.refine_top]:
        x = cands[idx].copy()
        v = float(scores[idx])
        step = sweep.refine_step
        for _ in range(sweep.refine_rounds):
            improved = False
            for j in range(dim):
                for sgn in (+1.0, -1.0):
                    trial = x.copy()
                    trial[j] = min(1.0, max(0.0, trial[j] + sgn * step))
                    tv = score_one(trial)
                    if tv > v + 1e-12:
                        x, v = trial, tv
                        improved = True
            if not improved:
                step /= 2.0
        if v > best_v + 1e-12:
            best_x, best_v = x, v

    if evaluated is not None and len(evaluated):
        evaluated = np.atleast_2d(evaluated)
        ranked = [best_x] + [cands[i] for i in order]
        for x in ranked:
            if np.min(np.linalg.norm(evaluated - x[None, :], axis=1)) >= sweep.min_separation:
                return np.asarray(x, dtype=float)
        # every candidate collides; nudge the best deterministically
        bump = np.full(dim, 2.0 * sweep.min_separation)
        return np.clip(best_x + bump, 0.0, 1.0)
    return np.asarray(best_x, dtype=float)
