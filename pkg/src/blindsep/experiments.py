"""Benchmark scenarios: data synthesis presets and per-scenario hyperparameters.

Three stock scenarios are provided:

* ``exp1`` - five bad-scaled synthetic sources mixed by a 5x5 Hilbert
  matrix, noiseless, adapted with the standard gradient.
* ``exp2`` - two speech(-like) channels mixed by a random 2x2 matrix with
  30 dB additive noise, natural gradient.
* ``exp3`` - four speech(-like) channels mixed by a 4x4 Hilbert matrix with
  30 dB additive noise, natural gradient.

Speech scenarios accept user-supplied recordings or seeded surrogates
(band-limited noise under a slow log-normal envelope, which reproduces the
heavy-tailed amplitude statistics separation relies on).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Mapping

import numpy as np
from scipy import signal as sps

from .separator import RunConfig
from .signals import SignalMatrix, bad_scaled_sources, hilbert_matrix, mix, random_mixing_matrix

__all__ = [
    "EXPERIMENTS",
    "ExperimentData",
    "config_from_mapping",
    "config_to_mapping",
    "default_config",
    "surrogate_speech",
    "synthesize",
]

EXPERIMENTS = ("exp1", "exp2", "exp3")

_PRESETS: dict[str, dict] = {
    "exp1": dict(
        channels=5,
        gradient_variant="standard",
        eta=0.001,
        beta1=0.5,
        beta2=0.75,
        epsilon=1e-8,
        mu=5e-5,
        alpha=0.5,
        block_size=30,
        epochs=200,
        snr_db=None,
    ),
    "exp2": dict(
        channels=2,
        gradient_variant="natural",
        eta=0.001,
        beta1=0.9,
        beta2=0.999,
        epsilon=1e-8,
        mu=0.001,
        alpha=0.5,
        block_size=30,
        epochs=100,
        snr_db=30.0,
    ),
    "exp3": dict(
        channels=4,
        gradient_variant="natural",
        eta=0.001,
        beta1=0.9,
        beta2=0.999,
        epsilon=1e-8,
        mu=0.001,
        alpha=0.5,
        block_size=30,
        epochs=100,
        snr_db=30.0,
    ),
}

_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}

# Sentinel for "use the scenario's own noise level".
_DEFAULT = object()


@dataclass(frozen=True)
class ExperimentData:
    """Everything one scenario run consumes: sources, mixing matrix, mixtures."""

    experiment: str
    sources: SignalMatrix
    mixing: np.ndarray
    mixtures: SignalMatrix
    snr_db: float | None
    seed: int


def experiment_channels(experiment: str) -> int:
    return _preset(experiment)["channels"]


def _preset(experiment: str) -> dict:
    if experiment not in _PRESETS:
        raise ValueError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    return _PRESETS[experiment]


def default_config(experiment: str, algorithm: str = "adam", seed: int = 0, **overrides) -> RunConfig:
    """Scenario hyperparameter defaults as a RunConfig, with optional overrides."""
    preset = _preset(experiment)
    values = {k: v for k, v in preset.items() if k in _CONFIG_FIELDS}
    values.update(algorithm=algorithm, seed=seed)
    unknown = set(overrides) - _CONFIG_FIELDS
    if unknown:
        raise ValueError(f"unknown config field(s): {sorted(unknown)}")
    values.update(overrides)
    return RunConfig(**values)


def surrogate_speech(
    n_channels: int,
    length: int,
    seed: int = 0,
    sample_rate_hz: float = 8000.0,
) -> SignalMatrix:
    """Speech-shaped stand-in signals, mutually independent by construction.

    Each channel is Gaussian noise band-limited to 300-3400 Hz, modulated by
    a slow log-normal envelope (syllable-rate dynamics), zero-meaned and
    peak-normalized to 0.95.
    """
    if n_channels < 1:
        raise ValueError(f"n_channels must be >= 1, got {n_channels}")
    if length < 16:
        raise ValueError(f"length must be >= 16, got {length}")
    rng = np.random.default_rng(seed)
    nyquist = sample_rate_hz / 2.0
    band = sps.butter(4, [300.0 / nyquist, 3400.0 / nyquist], btype="band", output="sos")
    slow = sps.butter(2, 4.0 / nyquist, btype="low", output="sos")
    rows = np.empty((n_channels, length))
    for i in range(n_channels):
        carrier = sps.sosfilt(band, rng.standard_normal(length))
        drift = sps.sosfilt(slow, rng.standard_normal(length))
        std = drift.std()
        envelope = np.exp(1.5 * drift / std) if std > 0 else np.ones(length)
        row = carrier * envelope
        row -= row.mean()
        rows[i] = 0.95 * row / np.abs(row).max()
    return SignalMatrix(rows, sample_rate_hz)


def synthesize(
    experiment: str,
    seed: int = 0,
    length: int = 30000,
    speech: SignalMatrix | None = None,
    use_surrogate_speech: bool = False,
    snr_db: object = _DEFAULT,
) -> ExperimentData:
    """Build one scenario's sources, mixing matrix and mixtures.

    Speech scenarios require either ``speech`` (a record with the scenario's
    channel count) or ``use_surrogate_speech=True``.  Child seeds for the
    sources, the mixing matrix and the sensor noise are derived from
    ``seed`` so every part is independently reproducible.
    """
    preset = _preset(experiment)
    n = preset["channels"]
    seed_sources, seed_mixing, seed_noise = (
        int(s) for s in np.random.SeedSequence(seed).generate_state(3)
    )

    if experiment == "exp1":
        sources = bad_scaled_sources(length, seed_sources)
        mixing = hilbert_matrix(n)
    else:
        if speech is not None:
            if speech.n_channels != n:
                raise ValueError(f"{experiment} needs {n} speech channels, got {speech.n_channels}")
            data = speech.data[:, :length]
            if data.shape[1] < length:
                length = data.shape[1]
            sources = SignalMatrix(data, speech.sample_rate_hz)
        elif use_surrogate_speech:
            sources = surrogate_speech(n, length, seed_sources)
        else:
            raise ValueError(
                f"{experiment} needs speech recordings; supply them or enable surrogate speech"
            )
        mixing = random_mixing_matrix(n, seed_mixing) if experiment == "exp2" else hilbert_matrix(n)

    noise = preset["snr_db"] if snr_db is _DEFAULT else snr_db
    mixtures = mix(sources, mixing, noise, seed=seed_noise)
    return ExperimentData(
        experiment=experiment,
        sources=sources,
        mixing=mixing,
        mixtures=mixtures,
        snr_db=noise,
        seed=seed,
    )


def config_to_mapping(config: RunConfig) -> dict[str, str]:
    """Flatten a RunConfig for key=value persistence (w0 arrays not supported)."""
    if config.w0 is not None:
        raise ValueError("explicit w0 matrices are persisted separately; store a CSV path instead")
    out: dict[str, str] = {}
    for f in fields(RunConfig):
        if f.name == "w0":
            out["w0"] = "identity"
        else:
            out[f.name] = repr(getattr(config, f.name))
    return out


def config_from_mapping(mapping: Mapping[str, str], base_dir=None) -> RunConfig:
    """Build a RunConfig from key=value text; unknown keys are errors.

    ``w0`` may be the literal ``identity`` or a CSV path (resolved against
    ``base_dir`` when given).
    """
    from pathlib import Path

    from .fileio import read_matrix_csv

    unknown = set(mapping) - _CONFIG_FIELDS
    if unknown:
        raise ValueError(f"unknown config field(s): {sorted(unknown)}")
    kwargs: dict[str, object] = {}
    for key, raw in mapping.items():
        if key == "w0":
            if raw == "identity":
                continue
            path = Path(raw)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            kwargs["w0"] = read_matrix_csv(path)
        elif key in ("algorithm", "gradient_variant"):
            kwargs[key] = raw
        elif key in ("block_size", "epochs", "seed"):
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    return RunConfig(**kwargs)
