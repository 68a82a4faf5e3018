"""Gaussian-process regression surrogate with a cached Cholesky factor.

The prior mean is zero after standardizing targets to zero mean and unit
variance over the observation history; predictions are de-standardized
on the way out. The kernel matrix gets escalating jitter until it
factorizes, and SingularKernel is raised past the jitter cap.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..errors import SingularKernel
from .kernels import KernelSpec, matern_matrix

MAX_JITTER = 1e-2


@dataclass
class GpModel:
    X: np.ndarray                 # (n, d) inputs
    y: np.ndarray                 # (n,) raw targets
    spec: KernelSpec
    noise_variance: float
    y_mean: float
    y_scale: float
    chol: Tuple[np.ndarray, bool]
    alpha: np.ndarray             # solves (K + noise I) alpha = y_standardized

    @property
    def n(self) -> int:
        return len(self.y)


def gp_fit(
    X: Sequence[Sequence[float]],
    y: Sequence[float],
    spec: KernelSpec = KernelSpec(),
    noise_variance: float = 1e-4,
) -> GpModel:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if len(y) == 0:
        raise ValueError("need at least one observation")
    if X.shape[0] != len(y):
        raise ValueError("X and y lengths differ")

    y_mean = float(np.mean(y))
    y_scale = float(np.std(y))
    if y_scale < 1e-12:
        y_scale = 1.0
    y_std = (y - y_mean) / y_scale

    K = matern_matrix(X, X, spec)
    jitter = 0.0
    while True:
        try:
            chol = cho_factor(
                K + (noise_variance + jitter) * np.eye(len(y)), lower=True)
            break
        except np.linalg.LinAlgError:
            jitter = 1e-10 if jitter == 0.0 else jitter * 10.0
            if jitter > MAX_JITTER * spec.signal_variance:
                raise SingularKernel(
                    f"kernel matrix not positive definite at jitter {jitter:.1e}")
    alpha = cho_solve(chol, y_std)
    return GpModel(
        X=X, y=y, spec=spec, noise_variance=noise_variance,
        y_mean=y_mean, y_scale=y_scale, chol=chol, alpha=alpha,
    )


def gp_predict(model: GpModel, x) -> Tuple[float, float]:
    """Posterior (mean, stddev) at a single point, in raw target units."""
    mean, std = gp_predict_batch(model, np.atleast_2d(np.asarray(x, dtype=float)))
    return float(mean[0]), float(std[0])


def gp_predict_batch(model: GpModel, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior means and stddevs at many points (m, d), raw units."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    k_star = matern_matrix(model.X, X, model.spec)       # (n, m)
    mean_std = k_star.T @ model.alpha
    v = cho_solve(model.chol, k_star)                    # (K + noise I)^-1 k*
    var = model.spec.signal_variance - np.einsum("ij,ij->j", k_star, v)
    var = np.maximum(var, 0.0)                           # clamp numerical negatives
    mean = mean_std * model.y_scale + model.y_mean
    std = np.sqrt(var) * model.y_scale
    return mean, std
