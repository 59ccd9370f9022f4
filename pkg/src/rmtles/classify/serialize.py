"""Versioned JSON documents for trained models."""

from __future__ import annotations

import json
from typing import Optional

from ..errors import RmtlesError
from .bayes import GaussianNBModel
from .dataset import Standardizer
from .knn import KNNModel
from .svm import SVMModel
from .tree import ForestModel, TreeModel

FORMAT = "rmtles-model"
VERSION = 1

_MODELS = {cls.kind: cls for cls in (SVMModel, KNNModel, GaussianNBModel, TreeModel, ForestModel)}


def model_to_dict(model, scaler: Optional[Standardizer] = None, feature_names=()) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "feature_names": list(feature_names),
        "scaler": None if scaler is None else scaler.to_params(),
        "params": model.to_params(),
    }


def model_from_dict(doc: dict):
    """Inverse of :func:`model_to_dict`; returns ``(model, scaler, feature_names)``."""
    if doc.get("format") != FORMAT:
        raise RmtlesError(f"not a model document (format={doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise RmtlesError(f"unsupported model version {doc.get('version')!r}")
    try:
        cls = _MODELS[doc["kind"]]
    except KeyError:
        raise RmtlesError(f"unknown model kind {doc.get('kind')!r}") from None
    scaler = None if doc.get("scaler") is None else Standardizer.from_params(doc["scaler"])
    return cls.from_params(doc["params"]), scaler, tuple(doc.get("feature_names", ()))


def dumps(model, scaler=None, feature_names=()) -> str:
    return json.dumps(model_to_dict(model, scaler, feature_names), sort_keys=True)


def loads(text: str):
    return model_from_dict(json.loads(text))
