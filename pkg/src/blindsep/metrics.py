"""Separation-quality and convergence metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "DegenerateMatrixError",
    "MetricTrace",
    "TraceEntry",
    "amari_pi",
    "epoch_reduce",
    "grad_norm",
]


class DegenerateMatrixError(ValueError):
    """A row or column of the combined system W A is entirely zero."""


@dataclass(slots=True)
class TraceEntry:
    """One metric record; ``pi`` and ``grad_norm`` may each be absent."""

    iteration: int
    epoch: int
    pi: float | None = None
    grad_norm: float | None = None


class MetricTrace:
    """Append-only sequence of per-iteration (or per-epoch) metric records."""

    def __init__(self, entries: Iterable[TraceEntry] = ()):
        self.entries: list[TraceEntry] = list(entries)

    def append(
        self,
        iteration: int,
        epoch: int,
        pi: float | None = None,
        grad_norm: float | None = None,
    ) -> None:
        self.entries.append(TraceEntry(iteration, epoch, pi, grad_norm))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricTrace):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self) -> str:
        return f"MetricTrace({len(self.entries)} entries)"


def amari_pi(w: np.ndarray, a: np.ndarray) -> float:
    """Amari performance index of the combined system Q = W A.

    Every row and column of |Q| is normalized by its largest entry, the
    off-maximum mass is summed, and the result is averaged over 2 N (N - 1)
    terms.  Zero iff Q is a permutation times a nonsingular diagonal matrix,
    which makes the index invariant to the inherent ordering and scaling
    ambiguity of the separation problem.
    """
    w = np.asarray(w, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"separating matrix must be square, got shape {w.shape}")
    if a.shape != w.shape:
        raise ValueError(f"mixing matrix shape {a.shape} does not match separating matrix {w.shape}")
    n = w.shape[0]
    if n < 2:
        raise ValueError("performance index requires at least 2 channels")
    q = np.abs(w @ a)
    row_max = q.max(axis=1)
    col_max = q.max(axis=0)
    if row_max.min() == 0.0 or col_max.min() == 0.0:
        raise DegenerateMatrixError("combined system W A has an all-zero row or column")
    total = (q / row_max[:, None]).sum() + (q / col_max[None, :]).sum() - 2.0 * n
    return float(total / (n * (n - 1)))


def grad_norm(g: np.ndarray) -> float:
    """Frobenius norm of a gradient matrix (the 2-norm of its vectorization)."""
    return float(np.linalg.norm(np.asarray(g, dtype=np.float64)))


def epoch_reduce(trace: MetricTrace, n_blocks: int) -> MetricTrace:
    """Collapse a per-iteration trace to one entry per epoch.

    The reduced ``pi`` is that of the epoch's last iteration (the epoch-end
    separating matrix); ``grad_norm`` is the mean over the epoch's
    iterations.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    if len(trace) % n_blocks != 0:
        raise ValueError(f"trace length {len(trace)} is not a multiple of {n_blocks} blocks per epoch")
    reduced = MetricTrace()
    for start in range(0, len(trace), n_blocks):
        chunk = trace.entries[start : start + n_blocks]
        last = chunk[-1]
        norms = [e.grad_norm for e in chunk if e.grad_norm is not None]
        reduced.append(
            iteration=last.iteration,
            epoch=last.epoch,
            pi=last.pi,
            grad_norm=float(np.mean(norms)) if norms else None,
        )
    return reduced
