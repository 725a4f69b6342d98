"""Block-cyclic separation driver with pluggable first-order optimizers.

One run executes ``floor(L / B) * epochs`` iterations.  Per iteration the
gradient of the entropy objective (standard or natural form) is evaluated on
the current block, vectorized by column stacking, fed to the configured
optimizer as an ascent step, and the resulting delta is added to the
vectorized separating matrix, which is then reshaped back.  Blocks cycle in
their natural order across epochs; trailing samples shorter than one block
are never visited during adaptation but are included in the final
separation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .infomax import SingularMatrixError, gradient_natural, gradient_standard
from .metrics import MetricTrace, amari_pi, grad_norm
from .optimizers import AdamHyper, adam_init, adam_step, momentum_init, momentum_step, sgd_step
from .signals import SignalMatrix

__all__ = [
    "ALGORITHMS",
    "DivergenceError",
    "GRADIENT_VARIANTS",
    "RunConfig",
    "RunResult",
    "block_at",
    "matricize",
    "run",
    "separate",
    "vectorize",
]

ALGORITHMS = ("adam", "sgd", "momentum")
GRADIENT_VARIANTS = ("standard", "natural")

# Any |W| entry beyond this aborts the run; a diagnostic beats a NaN trace.
DIVERGENCE_LIMIT = 1e12


class DivergenceError(RuntimeError):
    """Separating matrix left the representable range during adaptation."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one separation run.

    ``eta``/``beta1``/``beta2``/``epsilon`` drive Adam; ``mu`` drives the
    SGD and momentum baselines; ``alpha`` is the momentum weight.  ``w0`` of
    None means the identity start.
    """

    algorithm: str = "adam"
    gradient_variant: str = "natural"
    block_size: int = 30
    epochs: int = 100
    eta: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    mu: float = 0.001
    alpha: float = 0.5
    seed: int = 0
    w0: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.gradient_variant not in GRADIENT_VARIANTS:
            raise ValueError(
                f"gradient_variant must be one of {GRADIENT_VARIANTS}, got {self.gradient_variant!r}"
            )
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        self.adam_hyper()  # validates eta, beta1, beta2, epsilon
        if self.w0 is not None:
            w0 = np.asarray(self.w0, dtype=np.float64)
            if w0.ndim != 2 or w0.shape[0] != w0.shape[1]:
                raise ValueError(f"w0 must be a square matrix, got shape {w0.shape}")
            if not np.isfinite(w0).all():
                raise ValueError("w0 contains NaN or Inf")
            object.__setattr__(self, "w0", w0)

    def adam_hyper(self) -> AdamHyper:
        return AdamHyper(self.eta, self.beta1, self.beta2, self.epsilon)


@dataclass(frozen=True)
class RunResult:
    """Final separating matrix, per-iteration metric trace, separated record."""

    w_final: np.ndarray
    trace: MetricTrace
    separated: SignalMatrix


def vectorize(g: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix into a length-N^2 vector."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    return g.flatten(order="F")


def matricize(v: np.ndarray, n: int) -> np.ndarray:
    """Unstack a length-N^2 vector back into an N x N matrix (inverse of vectorize)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size != n * n:
        raise ValueError(f"expected a flat vector of length {n * n}, got shape {v.shape}")
    return v.reshape((n, n), order="F").copy()


def block_at(x: SignalMatrix | np.ndarray, t: int, block_size: int) -> np.ndarray:
    """Contiguous block for iteration ``t`` (1-based), cycling across epochs."""
    data = x.data if isinstance(x, SignalMatrix) else np.asarray(x, dtype=np.float64)
    if t < 1:
        raise ValueError(f"iteration index must be >= 1, got {t}")
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    n_blocks = data.shape[1] // block_size
    if n_blocks < 1:
        raise ValueError(f"block size {block_size} exceeds record length {data.shape[1]}")
    k = (t - 1) % n_blocks
    return data[:, k * block_size : (k + 1) * block_size]


def separate(x: SignalMatrix, w: np.ndarray) -> SignalMatrix:
    """Apply a separating matrix to the full record: u = W x."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (x.n_channels, x.n_channels):
        raise ValueError(f"separating matrix shape {w.shape} does not match {x.n_channels} channels")
    return SignalMatrix(w @ x.data, x.sample_rate_hz)


def run(
    x: SignalMatrix,
    config: RunConfig,
    observer: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
    mixing_matrix: np.ndarray | None = None,
    pi_interval: int | None = None,
) -> RunResult:
    """Run the full adaptation loop and separate the record with the final W.

    The trace records the gradient Frobenius norm every iteration.  When
    ``mixing_matrix`` is given, the Amari index of the current W against it
    is additionally recorded every ``pi_interval`` iterations (default: at
    epoch ends).  ``observer``, if given, is called after every update as
    ``observer(t, w, gradient)``.

    Raises SingularMatrixError (standard gradient, non-invertible W) or
    DivergenceError (W overflow / NaN), both carrying the iteration index.
    """
    data = x.data
    n = x.n_channels
    n_blocks = data.shape[1] // config.block_size
    if n_blocks < 1:
        raise ValueError(
            f"block size {config.block_size} exceeds record length {data.shape[1]}"
        )
    if config.w0 is not None and config.w0.shape != (n, n):
        raise ValueError(f"w0 shape {config.w0.shape} does not match {n} channels")

    w = np.eye(n) if config.w0 is None else config.w0.copy()
    grad_fn = gradient_standard if config.gradient_variant == "standard" else gradient_natural

    hyper = config.adam_hyper()
    adam_state = adam_init(n * n)
    momentum_state = momentum_init(n * n, config.alpha)
    algorithm = config.algorithm

    a = None
    if mixing_matrix is not None:
        a = np.asarray(mixing_matrix, dtype=np.float64)
        if a.shape != (n, n):
            raise ValueError(f"mixing matrix shape {a.shape} does not match {n} channels")
        if pi_interval is None:
            pi_interval = n_blocks
        if pi_interval < 1:
            raise ValueError(f"pi_interval must be >= 1, got {pi_interval}")

    blocks = [
        data[:, k * config.block_size : (k + 1) * config.block_size] for k in range(n_blocks)
    ]
    total = n_blocks * config.epochs
    trace = MetricTrace()
    w_vec = vectorize(w)

    for t in range(1, total + 1):
        xb = blocks[(t - 1) % n_blocks]
        try:
            g = grad_fn(w, xb)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"separating matrix became singular at iteration {t}: {exc}", iteration=t
            ) from exc
        g_vec = vectorize(g)
        if algorithm == "adam":
            update, adam_state = adam_step(adam_state, g_vec, hyper, "ascent")
        elif algorithm == "sgd":
            update = sgd_step(g_vec, config.mu, "ascent")
        else:
            update, momentum_state = momentum_step(momentum_state, g_vec, config.mu, "ascent")
        w_vec = w_vec + update
        w = matricize(w_vec, n)
        if not np.isfinite(w).all() or np.abs(w).max() > DIVERGENCE_LIMIT:
            raise DivergenceError(f"separating matrix diverged at iteration {t}", iteration=t)
        epoch = (t - 1) // n_blocks + 1
        pi = amari_pi(w, a) if a is not None and t % pi_interval == 0 else None
        trace.append(t, epoch, pi=pi, grad_norm=grad_norm(g))
        if observer is not None:
            observer(t, w, g)

    return RunResult(w_final=w, trace=trace, separated=separate(x, w))
