"""Synthetic sources, mixing matrices and the linear instantaneous mixing model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SignalMatrix",
    "bad_scaled_sources",
    "hilbert_matrix",
    "mix",
    "random_mixing_matrix",
    "triangle_wave",
]


@dataclass(frozen=True)
class SignalMatrix:
    """Multichannel signal record, one row per channel.

    ``sample_rate_hz`` is informational: 8000 for speech-style material,
    1.0 for synthetic signals indexed by raw sample number.
    """

    data: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"signal data must be 2-D (channels x samples), got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"signal data must be non-empty, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("signal data contains NaN or Inf")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "data", data)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


def triangle_wave(x: np.ndarray | float) -> np.ndarray:
    """Odd triangle wave with period 2*pi and unit amplitude.

    Rises through zero with slope 2/pi and peaks at pi/2, i.e. the
    triangle-wave analogue of the sine function.
    """
    return (2.0 / np.pi) * np.arcsin(np.sin(x))


def bad_scaled_sources(length: int, seed: int = 0) -> SignalMatrix:
    """Five independent sources whose amplitudes span six orders of magnitude.

    Rows 1-4 are deterministic narrowband waveforms at scales 1e-6 to 1e-5;
    row 5 is uniform noise on [-1, 1] drawn from ``seed``.  Arguments of the
    trigonometric terms are the raw integer sample index, in radians.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    n = np.arange(length, dtype=np.float64)
    rng = np.random.default_rng(seed)
    rows = np.empty((5, length))
    rows[0] = 1e-6 * np.sin(350.0 * n) * np.sin(60.0 * n)
    rows[1] = 1e-5 * triangle_wave(70.0 * n)
    rows[2] = 1e-4 * np.sin(800.0 * n) * np.sin(80.0 * n)
    rows[3] = 1e-5 * np.cos(400.0 * n + 4.0 * np.cos(60.0 * n))
    rows[4] = rng.uniform(-1.0, 1.0, size=length)
    return SignalMatrix(rows)


def hilbert_matrix(n: int) -> np.ndarray:
    """Square Hilbert matrix, entry (i, j) = 1 / (i + j - 1) for 1-based indices.

    Severely ill-conditioned already at modest sizes; used as a stress-test
    mixing matrix.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    i = np.arange(n, dtype=np.float64)
    return 1.0 / (i[:, None] + i[None, :] + 1.0)


def random_mixing_matrix(n: int, seed: int = 0) -> np.ndarray:
    """Square matrix with entries i.i.d. uniform on [-1, 1], deterministic per seed."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(n, n))


def mix(
    sources: SignalMatrix,
    a: np.ndarray,
    snr_db: float | None = None,
    seed: int = 0,
) -> SignalMatrix:
    """Form mixtures x = A s, optionally adding white Gaussian sensor noise.

    When ``snr_db`` is given, the noise is scaled per channel so that the
    ratio of clean-mixture power to noise power over the record equals
    ``snr_db`` decibels exactly.
    """
    a = np.asarray(a, dtype=np.float64)
    n = sources.n_channels
    if a.shape != (n, n):
        raise ValueError(f"mixing matrix shape {a.shape} does not match {n} source channels")
    clean = a @ sources.data
    if snr_db is None:
        return SignalMatrix(clean, sources.sample_rate_hz)
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(clean.shape)
    clean_power = np.mean(clean**2, axis=1)
    noise_power = np.mean(noise**2, axis=1)
    target_power = clean_power * 10.0 ** (-snr_db / 10.0)
    scale = np.sqrt(np.where(noise_power > 0, target_power / noise_power, 0.0))
    return SignalMatrix(clean + scale[:, None] * noise, sources.sample_rate_hz)
