"""Window-level feature extraction: block, standardize, covariance, spectrum, LES.

The feature table has one row per window with ``subject_id``, ``label``,
``window_index`` followed by ``les_<function>`` columns and, optionally, the
``<channel>_<statistic>`` columns of :func:`rmtles.features.stat_features`.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classify.dataset import Dataset
from .errors import RmtlesError
from .features import stat_features
from .ingest import Recording, WindowConfig, iter_windows
from .linalg import PER_SAMPLE, trace_normalize, window_spectrum
from .rmt import get_test_function, les

META_COLUMNS = ("subject_id", "label", "window_index")


def window_les(window, test_fns, normalization=PER_SAMPLE, normalized_by_n=False) -> list:
    spec = window_spectrum(window, normalization)
    values = []
    for fn in test_fns:
        phi = get_test_function(fn)
        s = trace_normalize(spec) if phi.needs_trace_normalized else spec
        values.append(les(s, phi, normalized_by_n).value)
    return values


@dataclass
class FeatureTable:
    columns: tuple
    meta: list  # (subject_id, label, window_index)
    values: np.ndarray

    def __len__(self):
        return len(self.meta)

    @property
    def les_columns(self) -> tuple:
        return tuple(c for c in self.columns if c.startswith("les_"))

    def select(self, columns: Optional[Sequence[str]] = None, drop_nan: bool = True):
        cols = list(self.columns if columns is None else columns)
        missing = [c for c in cols if c not in self.columns]
        if missing:
            raise RmtlesError(f"unknown feature columns {missing}")
        idx = [self.columns.index(c) for c in cols]
        x = self.values[:, idx]
        if drop_nan:
            keep = ~np.any(np.isnan(x), axis=0)
            x = x[:, keep]
            cols = [c for c, k in zip(cols, keep) if k]
        return x, tuple(cols)

    def to_dataset(self, columns=None, aggregate: str = "window") -> Dataset:
        """Dataset with one row per window, or per subject (column means) when ``aggregate="subject"``."""
        x, cols = self.select(columns)
        subjects = np.array([m[0] for m in self.meta], dtype=str)
        labels = np.array(["" if m[1] is None else m[1] for m in self.meta], dtype=str)
        if aggregate == "window":
            return Dataset(x, labels, subjects, cols)
        if aggregate != "subject":
            raise RmtlesError(f"unknown aggregation {aggregate!r}")
        uniq = list(dict.fromkeys(subjects.tolist()))
        rows = np.array([x[subjects == s].mean(axis=0) for s in uniq])
        labs = [labels[subjects == s][0] for s in uniq]
        return Dataset(rows, labs, uniq, cols)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(META_COLUMNS + tuple(self.columns))
        for (sid, lab, wi), row in zip(self.meta, self.values):
            w.writerow([sid, "" if lab is None else lab, wi] + [repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FeatureTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0][:3]) != META_COLUMNS:
            raise RmtlesError(f"feature table must start with columns {META_COLUMNS}")
        columns = tuple(rows[0][3:])
        meta, values = [], []
        for r in rows[1:]:
            if not r:
                continue
            if len(r) != len(rows[0]):
                raise RmtlesError(f"feature row has {len(r)} fields, header has {len(rows[0])}")
            meta.append((r[0], r[1] or None, int(r[2])))
            values.append([float(v) for v in r[3:]])
        return cls(columns, meta, np.array(values, dtype=float).reshape(len(meta), len(columns)))


def extract_features(
    recordings: Sequence[Recording],
    delta_t: int,
    test_fns: Sequence[str] = ("vnentropy",),
    *,
    stats: bool = False,
    normalization: str = PER_SAMPLE,
    normalized_by_n: bool = False,
    workers: int = 1,
) -> FeatureTable:
    cfg = WindowConfig(delta_t)
    fns = [get_test_function(f).name for f in test_fns]
    windows = [w for rec in recordings for w in iter_windows(rec, cfg)]
    if not windows:
        raise RmtlesError("no windows to extract")

    def row(w):
        vals = window_les(w, fns, normalization, normalized_by_n)
        if stats:
            vals = vals + stat_features(w).values.tolist()
        return vals

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, windows))
    else:
        rows = [row(w) for w in windows]
    columns = [f"les_{f}" for f in fns]
    if stats:
        columns += list(stat_features(windows[0]).names)
    meta = [(w.subject_id, w.label, w.window_index) for w in windows]
    return FeatureTable(tuple(columns), meta, np.array(rows, dtype=float))
