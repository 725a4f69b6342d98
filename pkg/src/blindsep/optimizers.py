"""First-order stochastic updaters over flat parameter vectors.

All three updaters return the additive delta to apply to the parameters,
plus (where stateful) the successor state.  States are values: inputs are
never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AdamHyper",
    "AdamState",
    "MomentumState",
    "adam_init",
    "adam_step",
    "momentum_init",
    "momentum_step",
    "sgd_step",
]


def _check_direction(direction: str) -> float:
    if direction == "ascent":
        return 1.0
    if direction == "descent":
        return -1.0
    raise ValueError(f"direction must be 'ascent' or 'descent', got {direction!r}")


def _check_gradient(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if not np.isfinite(g).all():
        raise ValueError("gradient contains NaN or Inf")
    return g


@dataclass(frozen=True)
class AdamHyper:
    """Step size, moment decay rates and the division guard."""

    eta: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ValueError(f"beta1 and beta2 must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class AdamState:
    """Exponential moment estimates plus the step counter.

    ``beta1_power`` and ``beta2_power`` cache beta^t as running products so
    the bias correction avoids a pow() call per step.
    """

    m: np.ndarray
    second_moment: np.ndarray
    t: int = 0
    beta1_power: float = 1.0
    beta2_power: float = 1.0


def adam_init(dim: int) -> AdamState:
    """Zero moments, step counter at zero."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return AdamState(np.zeros(dim), np.zeros(dim))


def adam_step(
    state: AdamState,
    g: np.ndarray,
    hyper: AdamHyper,
    direction: str = "descent",
) -> tuple[np.ndarray, AdamState]:
    """One Adam update: decay the moments, bias-correct, scale by eta.

    Returns ``(update, new_state)`` where ``update`` is the signed additive
    delta eta * m_hat / (sqrt(v_hat) + epsilon).
    """
    sign = _check_direction(direction)
    g = _check_gradient(g)
    if g.shape != state.m.shape:
        raise ValueError(f"gradient shape {g.shape} does not match state {state.m.shape}")
    b1, b2 = hyper.beta1, hyper.beta2
    m = b1 * state.m + (1.0 - b1) * g
    sm = b2 * state.second_moment + (1.0 - b2) * (g * g)
    p1 = state.beta1_power * b1
    p2 = state.beta2_power * b2
    m_hat = m / (1.0 - p1)
    v_hat = sm / (1.0 - p2)
    update = sign * hyper.eta * m_hat / (np.sqrt(v_hat) + hyper.epsilon)
    return update, AdamState(m, sm, state.t + 1, p1, p2)


def sgd_step(g: np.ndarray, mu: float, direction: str = "descent") -> np.ndarray:
    """Plain stochastic step: +/- mu * g."""
    sign = _check_direction(direction)
    g = _check_gradient(g)
    if not np.isfinite(mu) or mu < 0:
        raise ValueError(f"mu must be finite and non-negative, got {mu}")
    return sign * mu * g


@dataclass(frozen=True)
class MomentumState:
    """Previous signed update and the fixed momentum weight."""

    previous_update: np.ndarray
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")


def momentum_init(dim: int, alpha: float = 0.5) -> MomentumState:
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return MomentumState(np.zeros(dim), alpha)


def momentum_step(
    state: MomentumState,
    g: np.ndarray,
    mu: float,
    direction: str = "descent",
) -> tuple[np.ndarray, MomentumState]:
    """Heavy-ball update: +/- mu * g + alpha * previous update."""
    sign = _check_direction(direction)
    g = _check_gradient(g)
    if g.shape != state.previous_update.shape:
        raise ValueError(f"gradient shape {g.shape} does not match state {state.previous_update.shape}")
    if not np.isfinite(mu) or mu < 0:
        raise ValueError(f"mu must be finite and non-negative, got {mu}")
    update = sign * mu * g + state.alpha * state.previous_update
    return update, MomentumState(update, state.alpha)
