"""Shared pieces for the ternary classifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..lexicon import PolarityLabel

N_CLASSES = 3
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LabelConfidence:
    p_neg: float
    p_obj: float
    p_pos: float

    def __post_init__(self):
        vals = (self.p_neg, self.p_obj, self.p_pos)
        if min(vals) < 0 or abs(sum(vals) - 1.0) > 1e-9:
            raise ValueError(f"not a probability triple: {vals}")

    @property
    def label(self) -> PolarityLabel:
        vals = (self.p_neg, self.p_obj, self.p_pos)
        return PolarityLabel.from_index(int(np.argmax(vals)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_neg, self.p_obj, self.p_pos)


@dataclass
class TrainConfig:
    seed: int = 0
    train_fraction: float = 0.6
    meta_folds: int = 5
    # logistic
    learning_rate: float = 0.1
    l2: float = 1e-3
    epochs: int = 500
    # mlp
    mlp_learning_rate: float = 0.01
    hidden_widths: tuple[int, ...] = (16,)
    batch_size: int = 32
    # smo
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 50
    kernel: str = "linear"
    gamma: float = 0.5
    literal_stacking: bool = False

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.meta_folds < 2:
            raise ValueError("meta_folds must be at least 2")
        if self.kernel not in ("linear", "rbf"):
            raise ValueError("kernel must be 'linear' or 'rbf'")
        self.hidden_widths = tuple(self.hidden_widths)


def as_labels(y) -> np.ndarray:
    """Class indices 0/1/2 from indices, PolarityLabels or label strings."""
    out = []
    for v in y:
        if isinstance(v, PolarityLabel):
            out.append(v.index)
        elif isinstance(v, str):
            out.append(PolarityLabel.parse(v).index)
        else:
            iv = int(v)
            if iv not in (0, 1, 2):
                raise ValueError(f"class index {v} not in 0..2")
            out.append(iv)
    return np.asarray(out, dtype=np.int64)


def check_xy(X, y=None, min_classes: int = 2):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D array")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if y is None:
        return X
    y = as_labels(y)
    if len(y) != len(X):
        raise ValueError("X and y lengths differ")
    if len(np.unique(y)) < min_classes:
        raise ValueError(f"need at least {min_classes} classes to train")
    return X, y


def one_hot(y: np.ndarray, k: int = N_CLASSES) -> np.ndarray:
    Y = np.zeros((len(y), k))
    Y[np.arange(len(y)), y] = 1.0
    return Y


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def normalize_rows(P: np.ndarray) -> np.ndarray:
    P = np.clip(P, 0.0, None)
    s = P.sum(axis=1, keepdims=True)
    return P / s


@dataclass
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray  # 0 for constant columns, which are then mapped to 0

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        scale = np.where(std > 0, 1.0 / np.where(std > 0, std, 1.0), 0.0)
        return cls(mean, scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != len(self.mean):
            raise ValueError(f"expected {len(self.mean)} features, got {X.shape[1]}")
        return (X - self.mean) * self.scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["scale"], dtype=np.float64))


class Model:
    """Interface shared by every classifier: batch probabilities and a
    JSON-friendly dict form."""

    kind = "model"
    n_features: int

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        raise NotImplementedError


def predict_confidence(model: Model, x) -> LabelConfidence:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, got {x.shape[1]}")
    p = model.predict_proba(x)[0]
    return LabelConfidence(*(float(v) for v in p))


_REGISTRY: dict[str, type] = {}


def register(cls):
    _REGISTRY[cls.kind] = cls
    return cls


def model_from_dict(d: dict) -> Model:
    try:
        cls = _REGISTRY[d["kind"]]
    except KeyError:
        raise ModelFormatError(f"unknown model kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def dumps_model(model: Model, meta: Optional[dict] = None) -> str:
    doc = {"format_version": FORMAT_VERSION, "model": model.to_dict(), "meta": meta or {}}
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def save_model(model: Model, path, meta: Optional[dict] = None) -> None:
    Path(path).write_text(dumps_model(model, meta), encoding="utf-8")


def load_model(path) -> tuple[Model, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a model file ({exc})") from None
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format version {doc.get('format_version')!r}, this build reads {FORMAT_VERSION}")
    return model_from_dict(doc["model"]), doc.get("meta", {})


def split_train_test(y, fraction: float = 0.6, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Stratified split of row indices; returns sorted (train, test) index arrays."""
    y = as_labels(y)
    if len(y) < 5:
        raise ValueError("need at least 5 items to split")
    missing = [PolarityLabel.from_index(c).value for c in range(N_CLASSES) if not np.any(y == c)]
    if missing:
        raise ValueError(f"classes absent from data: {missing}")
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train = []
    for c in range(N_CLASSES):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        k = int(np.floor(fraction * len(idx) + 0.5))
        train.extend(idx[:k].tolist())
    train_arr = np.array(sorted(train), dtype=np.int64)
    test_arr = np.setdiff1d(np.arange(len(y)), train_arr)
    return train_arr, test_arr


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint index folds, each class dealt round-robin after a shuffle."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for c in range(N_CLASSES):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            folds[(j + offset) % k].append(int(i))
        offset += len(idx)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]
