"""CSV and 16-bit PCM WAV persistence for signals, matrices and metric traces."""

from __future__ import annotations

import csv
import logging
import wave
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .metrics import MetricTrace, TraceEntry
from .signals import SignalMatrix

__all__ = [
    "read_key_values",
    "read_matrix_csv",
    "read_signals",
    "read_trace",
    "write_key_values",
    "write_matrix_csv",
    "write_signals",
    "write_trace",
]

log = logging.getLogger(__name__)

# Symmetric normalization: -32768 maps to exactly -1.0, +1.0 is not reachable.
PCM_SCALE = 32768.0

_TRACE_HEADER = ["iteration", "epoch", "pi", "grad_norm"]
# 17 significant digits round-trip any double exactly.
_FLOAT_FMT = "%.17g"


def _fmt(value: float) -> str:
    return _FLOAT_FMT % value


def _read_wav(path: Path) -> tuple[np.ndarray, float]:
    with wave.open(str(path), "rb") as wav:
        if wav.getsampwidth() != 2:
            raise ValueError(f"{path}: only 16-bit PCM WAV is supported")
        n_channels = wav.getnchannels()
        rate = float(wav.getframerate())
        frames = wav.readframes(wav.getnframes())
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float64) / PCM_SCALE
    return samples.reshape(-1, n_channels).T, rate


def _write_wav(data: np.ndarray, path: Path, sample_rate_hz: float) -> None:
    clipped = int(np.count_nonzero(np.abs(data) > 1.0))
    if clipped:
        log.warning("%s: clipped %d sample(s) outside [-1, 1]", path, clipped)
    quantized = np.clip(np.rint(np.clip(data, -1.0, 1.0) * PCM_SCALE), -32768, 32767)
    interleaved = quantized.astype("<i2").T.reshape(-1)
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(data.shape[0])
        wav.setsampwidth(2)
        wav.setframerate(int(round(sample_rate_hz)))
        wav.writeframes(interleaved.tobytes())


def _read_signal_csv(path: Path) -> np.ndarray:
    with open(path) as f:
        first = f.readline()
    if not first.strip():
        raise ValueError(f"{path}: empty signal file")
    try:
        [float(tok) for tok in first.strip().split(",")]
        skiprows = 0
    except ValueError:
        skiprows = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skiprows, ndmin=2)
    return data.T


def _write_signal_csv(data: np.ndarray, path: Path) -> None:
    header = ",".join(f"ch{i + 1}" for i in range(data.shape[0]))
    np.savetxt(path, data.T, delimiter=",", fmt=_FLOAT_FMT, header=header, comments="")


def read_signals(paths: Sequence[str | Path], truncate: bool = False) -> SignalMatrix:
    """Stack the channels of one or more WAV/CSV files into one record.

    Lengths must agree unless ``truncate`` is set, in which case all files
    are cut to the shortest and a warning is logged.  WAV samples are
    normalized to [-1, 1).
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise ValueError("no input files given")
    blocks: list[np.ndarray] = []
    rates: list[float] = []
    for path in paths:
        suffix = path.suffix.lower()
        if suffix == ".wav":
            data, rate = _read_wav(path)
            rates.append(rate)
        elif suffix == ".csv":
            data = _read_signal_csv(path)
        else:
            raise ValueError(f"{path}: unsupported signal format {suffix!r} (expected .wav or .csv)")
        blocks.append(data)
    lengths = {b.shape[1] for b in blocks}
    if len(lengths) > 1:
        if not truncate:
            raise ValueError(f"input lengths differ ({sorted(lengths)}); pass truncate=True to cut to the shortest")
        shortest = min(lengths)
        log.warning("truncating inputs to the shortest record (%d samples)", shortest)
        blocks = [b[:, :shortest] for b in blocks]
    if rates and len(set(rates)) > 1:
        raise ValueError(f"WAV sample rates differ: {sorted(set(rates))}")
    return SignalMatrix(np.vstack(blocks), rates[0] if rates else 1.0)


def write_signals(x: SignalMatrix, path: str | Path) -> None:
    """Persist a record as WAV (16-bit PCM, clipped to [-1, 1]) or CSV (exact)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".wav":
        _write_wav(x.data, path, x.sample_rate_hz)
    elif suffix == ".csv":
        _write_signal_csv(x.data, path)
    else:
        raise ValueError(f"{path}: unsupported signal format {suffix!r} (expected .wav or .csv)")


def write_trace(trace: MetricTrace, path: str | Path) -> None:
    """Write a metric trace as CSV with header iteration,epoch,pi,grad_norm."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(_TRACE_HEADER)
        for entry in trace:
            writer.writerow(
                [
                    entry.iteration,
                    entry.epoch,
                    "" if entry.pi is None else _fmt(entry.pi),
                    "" if entry.grad_norm is None else _fmt(entry.grad_norm),
                ]
            )


def read_trace(path: str | Path) -> MetricTrace:
    """Inverse of write_trace; raises ValueError on malformed rows."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != _TRACE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(_TRACE_HEADER)}")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(_TRACE_HEADER):
            raise ValueError(f"{path}:{lineno}: expected {len(_TRACE_HEADER)} fields, got {len(row)}")
        try:
            entries.append(
                TraceEntry(
                    iteration=int(row[0]),
                    epoch=int(row[1]),
                    pi=float(row[2]) if row[2] else None,
                    grad_norm=float(row[3]) if row[3] else None,
                )
            )
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: malformed row: {exc}") from exc
    return MetricTrace(entries)


def write_matrix_csv(a: np.ndarray, path: str | Path) -> None:
    """Plain CSV of reals, one matrix row per line, exact round trip."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    np.savetxt(path, a, delimiter=",", fmt=_FLOAT_FMT)


def read_matrix_csv(path: str | Path) -> np.ndarray:
    """Inverse of write_matrix_csv; ragged rows raise ValueError."""
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_key_values(path: str | Path, mapping: Mapping[str, object]) -> None:
    """Flat key=value text file (manifests and run configs)."""
    lines = [f"{key}={value}" for key, value in mapping.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_key_values(path: str | Path) -> dict[str, str]:
    """Inverse of write_key_values; blank lines and #-comments are skipped."""
    result: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        result[key.strip()] = value.strip()
    return result
