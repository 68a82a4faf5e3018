"""Matern covariance in its closed forms for smoothness 1/2, 3/2, 5/2."""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import UnsupportedSmoothness

SUPPORTED_SMOOTHNESS = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class KernelSpec:
    smoothness: float = 2.5
    lengthscale: Union[float, np.ndarray] = 0.2
    signal_variance: float = 1.0

    def __post_init__(self):
        if self.smoothness not in SUPPORTED_SMOOTHNESS:
            raise UnsupportedSmoothness(
                f"smoothness {self.smoothness} not in {SUPPORTED_SMOOTHNESS}")
        if np.any(np.asarray(self.lengthscale) <= 0):
            raise ValueError("lengthscale must be positive")
        if self.signal_variance <= 0:
            raise ValueError("signal variance must be positive")


def _scaled_r(x1: np.ndarray, x2: np.ndarray, spec: KernelSpec) -> float:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape:
        raise ValueError("kernel inputs have different dimensions")
    return float(np.linalg.norm((x1 - x2) / spec.lengthscale))


def _matern_of_r(r: np.ndarray, smoothness: float) -> np.ndarray:
    if smoothness == 0.5:
        return np.exp(-r)
    if smoothness == 1.5:
        s = math.sqrt(3.0) * r
        return (1.0 + s) * np.exp(-s)
    s = math.sqrt(5.0) * r
    return (1.0 + s + 5.0 * r * r / 3.0) * np.exp(-s)


def matern_kernel(x1, x2, spec: KernelSpec) -> float:
    """k(x1, x2); equals the signal variance at zero distance."""
    r = _scaled_r(x1, x2, spec)
    return spec.signal_variance * float(_matern_of_r(np.asarray(r), spec.smoothness))


def matern_matrix(X1: np.ndarray, X2: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Cross-covariance matrix between two point sets (n1, d) x (n2, d)."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float)) / spec.lengthscale
    X2 = np.atleast_2d(np.asarray(X2, dtype=float)) / spec.lengthscale
    d2 = np.maximum(
        np.sum(X1 ** 2, axis=1)[:, None] + np.sum(X2 ** 2, axis=1)[None, :]
        - 2.0 * X1 @ X2.T,
        0.0,
    )
    return spec.signal_variance * _matern_of_r(np.sqrt(d2), spec.smoothness)
