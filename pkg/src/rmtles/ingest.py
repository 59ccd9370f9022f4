"""Recording I/O and blocking of long recordings into window matrices.

A recording is an ``N x T`` matrix (channels by samples).  It is cut into
``L = floor(T / delta_t)`` disjoint blocks of ``delta_t`` consecutive samples;
each block is one random matrix for the spectral pipeline.

File formats
------------
CSV
    First row holds the channel names, each following row holds one channel's
    ``T`` samples.  The sample rate is not stored and must be supplied on load.
Binary (``.rmts``)
    32-byte little-endian header: magic ``b"RMTS"``, ``u32`` N, ``u64`` T,
    ``f64`` sample rate, 8 reserved zero bytes.  The body is ``N*T`` ``f64``
    values, row-major.
"""

from __future__ import annotations

import csv
import io
import os
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import FormatError, NonFiniteError, RmtlesError

MAGIC = b"RMTS"
_HEADER = struct.Struct("<4sIQd8x")
HEADER_SIZE = _HEADER.size  # 32

RECOMMENDED_DELTA_T = (150, 500)


class WindowSizeWarning(UserWarning):
    """delta_t outside the range where sample size is 3-8x the dimension."""


def _first_nonfinite(data):
    bad = np.argwhere(~np.isfinite(data))
    if len(bad):
        return int(bad[0][0]), int(bad[0][1])
    return None


def _frozen(data):
    arr = np.array(data, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Recording:
    """Multichannel recording, channels as rows."""

    data: np.ndarray
    channel_names: tuple
    sample_rate_hz: float
    label: Optional[str] = None
    subject_id: str = ""

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2:
            raise RmtlesError(f"recording must be 2-D, got shape {data.shape}")
        n, t = data.shape
        if n < 2:
            raise RmtlesError(f"need at least 2 channels, got {n}")
        if t < n:
            raise RmtlesError(f"need T >= N, got N={n}, T={t}")
        pos = _first_nonfinite(data)
        if pos is not None:
            raise NonFiniteError(*pos)
        names = tuple(str(c) for c in self.channel_names)
        if len(names) != n:
            raise RmtlesError(f"{len(names)} channel names for {n} channels")
        if not (self.sample_rate_hz > 0 and np.isfinite(self.sample_rate_hz)):
            raise RmtlesError(f"sample rate must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "channel_names", names)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def with_data(self, data: np.ndarray) -> "Recording":
        return Recording(data, self.channel_names, self.sample_rate_hz, self.label, self.subject_id)


@dataclass(frozen=True)
class WindowConfig:
    delta_t: int
    drop_partial: bool = True

    def __post_init__(self):
        if int(self.delta_t) != self.delta_t or self.delta_t < 2:
            raise RmtlesError(f"delta_t must be an integer >= 2, got {self.delta_t}")
        lo, hi = RECOMMENDED_DELTA_T
        if not lo <= self.delta_t <= hi:
            warnings.warn(
                f"delta_t={self.delta_t} outside recommended range {lo}-{hi}",
                WindowSizeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class WindowMatrix:
    """One ``N x delta_t`` block of a recording."""

    data: np.ndarray
    window_index: int = 0
    subject_id: str = ""
    label: Optional[str] = None
    channel_names: tuple = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def delta_t(self) -> int:
        return self.data.shape[1]

    def replace_data(self, data: np.ndarray) -> "WindowMatrix":
        return WindowMatrix(data, self.window_index, self.subject_id, self.label, self.channel_names)


def n_windows(n_samples: int, cfg: WindowConfig) -> int:
    if cfg.drop_partial:
        return n_samples // cfg.delta_t
    return -(-n_samples // cfg.delta_t)


def iter_windows(rec: Recording, cfg: WindowConfig) -> Iterator[WindowMatrix]:
    """Lazily yield the disjoint windows of ``rec``.

    Windows are views into the recording's (read-only) data, unstandardized.
    """
    if cfg.delta_t > rec.n_samples:
        raise RmtlesError(f"delta_t={cfg.delta_t} exceeds recording length T={rec.n_samples}")
    dt = cfg.delta_t
    for i in range(n_windows(rec.n_samples, cfg)):
        block = rec.data[:, i * dt:(i + 1) * dt]
        yield WindowMatrix(block, i, rec.subject_id, rec.label, rec.channel_names)


def block_windows(rec: Recording, cfg: WindowConfig) -> list:
    return list(iter_windows(rec, cfg))


def _infer_format(path: Path, fmt):
    if fmt is not None:
        if fmt not in ("csv", "binary"):
            raise RmtlesError(f"unknown format {fmt!r}")
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "binary"


def load_recording(
    path,
    fmt: Optional[str] = None,
    *,
    sample_rate_hz: float = 1000.0,
    label: Optional[str] = None,
    subject_id: Optional[str] = None,
) -> Recording:
    """Read a recording from CSV or the binary format.

    ``sample_rate_hz`` is only used for CSV input (the binary header carries its
    own rate).  ``subject_id`` defaults to the file stem.
    """
    path = Path(path)
    fmt = _infer_format(path, fmt)
    sid = path.stem if subject_id is None else subject_id
    if fmt == "csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise FormatError(f"{path}: empty CSV")
        names, body = rows[0], [r for r in rows[1:] if r]
        if len(body) != len(names):
            raise FormatError(f"{path}: header names {len(names)} channels, body has {len(body)} rows")
        widths = {len(r) for r in body}
        if len(widths) != 1:
            raise FormatError(f"{path}: ragged rows (lengths {sorted(widths)})")
        try:
            data = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from None
        return Recording(data, names, sample_rate_hz, label, sid)

    raw = path.read_bytes()
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"{path}: truncated header")
    magic, n, t, rate = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    body = raw[HEADER_SIZE:]
    if len(body) != 8 * n * t:
        raise FormatError(f"{path}: header says {n}x{t} values, body holds {len(body) // 8}")
    data = np.frombuffer(body, dtype="<f8").reshape(n, t)
    names = [f"ch{i}" for i in range(n)]
    return Recording(data, names, rate, label, sid)


def _atomic_write(path: Path, payload: bytes):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def save_recording(rec: Recording, path, fmt: Optional[str] = None) -> Path:
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rec.channel_names)
        writer.writerows([repr(float(v)) for v in row] for row in rec.data)
        _atomic_write(path, buf.getvalue().encode())
    else:
        header = _HEADER.pack(MAGIC, rec.n_channels, rec.n_samples, rec.sample_rate_hz)
        _atomic_write(path, header + np.ascontiguousarray(rec.data, dtype="<f8").tobytes())
    return path


def concat_windows(windows: Sequence[WindowMatrix]) -> np.ndarray:
    return np.concatenate([w.data for w in windows], axis=1)
