"""Entropy objective and gradients for tanh-InfoMax separation.

The objective is the joint output entropy of the squashed network outputs,
up to an additive constant that does not depend on the separating matrix:

    J(W) = ln|det W| + (1/B) * sum_samples sum_i ln(1 - y_i^2),

with u = W x and y = tanh(u) over a block of B mixture samples.  The
data-dependent term is averaged over the block so the gradient magnitude is
block-size-invariant; at B = 1 the classical per-sample rules are recovered.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

__all__ = [
    "SingularMatrixError",
    "activation",
    "entropy_objective",
    "gradient_natural",
    "gradient_standard",
    "score",
]

# Relative pivot threshold below which a matrix is treated as singular.
PIVOT_RTOL = 1e-12


class SingularMatrixError(np.linalg.LinAlgError):
    """Separating matrix is singular or numerically non-invertible."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


def activation(u: np.ndarray) -> np.ndarray:
    """Elementwise tanh squashing, output strictly inside (-1, 1)."""
    return np.tanh(u)


def score(y: np.ndarray) -> np.ndarray:
    """Ratio h''/h' of the tanh activation, evaluated at y = tanh(u): -2 y."""
    return -2.0 * y


def _log_sech2(u: np.ndarray) -> np.ndarray:
    # ln(1 - tanh(u)^2) = 2 ln(sech u), free of cancellation for large |u|.
    au = np.abs(u)
    return 2.0 * (np.log(2.0) - au - np.log1p(np.exp(-2.0 * au)))


def _check_block(w: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"separating matrix must be square, got shape {w.shape}")
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != w.shape[0]:
        raise ValueError(f"block shape {x.shape} does not match separating matrix {w.shape}")
    if x.shape[1] < 1:
        raise ValueError("block must contain at least one sample")
    return w, x


def _inverse_transpose(w: np.ndarray) -> np.ndarray:
    """W^{-T} via LU with partial pivoting; raises when any pivot falls
    below PIVOT_RTOL times the largest entry of W."""
    scale = np.abs(w).max()
    if scale == 0.0:
        raise SingularMatrixError("separating matrix is zero")
    lu, piv = lu_factor(w, check_finite=False)
    if np.abs(np.diag(lu)).min() < PIVOT_RTOL * scale:
        raise SingularMatrixError("separating matrix is numerically singular")
    return lu_solve((lu, piv), np.eye(w.shape[0]), trans=1, check_finite=False)


def entropy_objective(w: np.ndarray, x: np.ndarray) -> float:
    """Block-averaged output-entropy objective J(W); see module docstring."""
    w, x = _check_block(w, x)
    sign, logdet = np.linalg.slogdet(w)
    if sign == 0:
        raise SingularMatrixError("separating matrix is singular")
    u = w @ x
    return float(logdet + _log_sech2(u).sum(axis=0).mean())


def gradient_standard(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ascent gradient of the entropy objective:

        W^{-T} + (1/B) * sum_n score(y[n]) x[n]^T
    """
    w, x = _check_block(w, x)
    wit = _inverse_transpose(w)
    y = np.tanh(w @ x)
    return wit + (score(y) @ x.T) / x.shape[1]


def gradient_natural(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Natural-gradient form, equal to gradient_standard @ (W^T W) but
    requiring no inversion:

        (I + (1/B) * sum_n score(y[n]) u[n]^T) W
    """
    w, x = _check_block(w, x)
    u = w @ x
    y = np.tanh(u)
    core = np.eye(w.shape[0]) + (score(y) @ u.T) / x.shape[1]
    return core @ w
