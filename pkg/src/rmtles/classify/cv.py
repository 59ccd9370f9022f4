"""Repeated train/test splitting (80/20 by default) with per-split standardization.

Randomness: ``SeedSequence(seed).spawn(n_repeats)`` gives every repeat its own
PCG64 stream, so reports are identical however the repeats are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import RmtlesError
from .bayes import train_gnb
from .dataset import Dataset, Standardizer, majority_label
from .knn import train_knn
from .svm import train_svm_rbf
from .tree import train_forest, train_tree

KINDS = ("svm", "knn", "gnb", "tree", "forest")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RmtlesError(f"unknown classifier {self.kind!r}; choose from {KINDS}")


def train_model(spec: ModelSpec, ds: Dataset, seed: int = 0):
    p = dict(spec.params)
    if spec.kind == "svm":
        if p.get("gamma") in (None, "scale"):
            p["gamma"] = 1.0 / (ds.n_features * max(float(ds.rows.var()), 1e-12))
        return train_svm_rbf(ds, **p)
    if spec.kind == "knn":
        return train_knn(ds, **p)
    if spec.kind == "gnb":
        return train_gnb(ds, **p)
    if spec.kind == "tree":
        return train_tree(ds, **p)
    return train_forest(ds, seed=seed, **p)


@dataclass
class CVReport:
    mean_accuracy: float
    std_accuracy: float
    n_repeats: int
    per_fold: list
    confusion: np.ndarray
    classes: tuple
    model: dict
    stratified: bool = True
    grouping: str = "window"

    def to_dict(self) -> dict:
        return {
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "n_repeats": self.n_repeats,
            "per_fold": list(self.per_fold),
            "confusion": self.confusion.astype(int).tolist(),
            "classes": list(self.classes),
            "model": self.model,
            "stratified": self.stratified,
            "grouping": self.grouping,
        }


def _n_train(n: int, frac: float) -> int:
    return min(max(int(round(frac * n)), 1), n - 1)


def _split_units(unit_labels, rng, train_frac, stratified):
    """Pick training units (rows or subjects); returns a boolean mask over units."""
    unit_labels = np.asarray(unit_labels)
    train = np.zeros(len(unit_labels), dtype=bool)
    if stratified:
        for c in np.unique(unit_labels):
            members = np.flatnonzero(unit_labels == c)
            chosen = rng.permutation(members)[: _n_train(len(members), train_frac)]
            train[chosen] = True
    else:
        train[rng.permutation(len(unit_labels))[: _n_train(len(unit_labels), train_frac)]] = True
    return train


def split_indices(ds: Dataset, rng, train_frac=0.8, stratified=True, group_by_subject=False):
    if group_by_subject:
        if ds.group_key is None:
            raise RmtlesError("group_by_subject needs a group_key on the dataset")
        groups = np.unique(ds.group_key)
        glabels = [majority_label(ds.labels[ds.group_key == g]) for g in groups]
        train_groups = set(groups[_split_units(glabels, rng, train_frac, stratified)].tolist())
        mask = np.isin(ds.group_key, list(train_groups))
    else:
        mask = _split_units(ds.labels, rng, train_frac, stratified)
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def _check_sizes(ds: Dataset, group_by_subject: bool):
    for c in ds.classes:
        sel = ds.labels == c
        units = len(np.unique(ds.group_key[sel])) if group_by_subject else int(sel.sum())
        if units < 2:
            what = "subjects" if group_by_subject else "rows"
            raise RmtlesError(f"class {c!r} has {units} {what}; need at least 2")


def cross_validate(
    ds: Dataset,
    model_spec: ModelSpec,
    train_frac: float = 0.8,
    n_repeats: int = 10,
    seed: int = 0,
    *,
    stratified: bool = True,
    group_by_subject: bool = False,
    standardize: bool = True,
    workers: Optional[int] = None,
) -> CVReport:
    if n_repeats < 1:
        raise RmtlesError("n_repeats must be >= 1")
    if not 0 < train_frac < 1:
        raise RmtlesError("train_frac must lie in (0, 1)")
    if len(ds.classes) < 2:
        raise RmtlesError("cross-validation needs at least two classes")
    _check_sizes(ds, group_by_subject)
    classes = ds.classes
    index = {c: i for i, c in enumerate(classes)}

    def one_repeat(ss):
        rng = np.random.default_rng(ss)
        tr, te = split_indices(ds, rng, train_frac, stratified, group_by_subject)
        train, test = ds.subset(tr), ds.subset(te)
        if standardize:
            scaler = Standardizer.fit(train.rows)
            train, test = train.with_rows(scaler.transform(train.rows)), test.with_rows(scaler.transform(test.rows))
        model = train_model(model_spec, train, seed=int(rng.integers(2**63)))
        pred = model.predict(test.rows)
        conf = np.zeros((len(classes), len(classes)), dtype=int)
        for t, p in zip(test.labels, pred):
            conf[index[t], index[p]] += 1
        return float(np.mean(pred == test.labels)), conf

    streams = np.random.SeedSequence(seed).spawn(n_repeats)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_repeat, streams))
    else:
        results = [one_repeat(ss) for ss in streams]
    acc = np.array([r[0] for r in results])
    conf = sum(r[1] for r in results)
    std = float(acc.std(ddof=1)) if n_repeats > 1 else 0.0
    return CVReport(
        float(acc.mean()),
        std,
        n_repeats,
        acc.tolist(),
        conf,
        classes,
        {"kind": model_spec.kind, "params": dict(model_spec.params)},
        stratified,
        "subject" if group_by_subject else "window",
    )
