"""Stacked combiner: a logistic meta classifier over the three base confidences."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .base import N_CLASSES, Model, TrainConfig, check_xy, model_from_dict, register, stratified_folds
from .logistic import LogisticModel, train_logistic
from .mlp import train_mlp
from .smo import train_svm_smo

Trainer = Callable[[np.ndarray, np.ndarray, TrainConfig], Model]
DEFAULT_BASES: tuple[tuple[str, Trainer], ...] = (
    ("logistic", train_logistic),
    ("mlp", train_mlp),
    ("svm", train_svm_smo),
)


def meta_features(bases: Sequence[Model], X) -> np.ndarray:
    """Concatenated (p_neg, p_obj, p_pos) of every base, shape (n, 3 * len(bases))."""
    return np.hstack([m.predict_proba(X) for m in bases])


@register
class StackedModel(Model):
    kind = "stack"

    def __init__(self, bases: list[Model], meta: LogisticModel, names: Sequence[str] = ()):
        if meta.n_features != N_CLASSES * len(bases):
            raise ValueError("meta model width does not match the base models")
        self.bases = list(bases)
        self.meta = meta
        self.names = list(names) or [m.kind for m in bases]
        self.n_features = bases[0].n_features

    def meta_features(self, X) -> np.ndarray:
        return meta_features(self.bases, X)

    def predict_proba(self, X) -> np.ndarray:
        return self.meta.predict_proba(self.meta_features(X))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "names": self.names, "bases": [m.to_dict() for m in self.bases],
                "meta": self.meta.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "StackedModel":
        return cls([model_from_dict(m) for m in d["bases"]], LogisticModel.from_dict(d["meta"]), d["names"])


def out_of_fold(X: np.ndarray, y: np.ndarray, cfg: TrainConfig,
                trainers: Sequence[Trainer]) -> np.ndarray:
    """Meta matrix where each row comes from base models that never saw it."""
    Z = np.zeros((len(X), N_CLASSES * len(trainers)))
    for k, fold in enumerate(stratified_folds(y, cfg.meta_folds, cfg.seed)):
        if len(fold) == 0:
            continue
        rest = np.setdiff1d(np.arange(len(X)), fold)
        for b, train in enumerate(trainers):
            m = train(X[rest], y[rest], cfg)
            Z[fold, N_CLASSES * b:N_CLASSES * (b + 1)] = m.predict_proba(X[fold])
    return Z


def train_stack(X, y, cfg: TrainConfig = TrainConfig(),
                bases: Optional[Sequence[tuple[str, Trainer]]] = None) -> StackedModel:
    X, y = check_xy(X, y)
    bases = tuple(bases or DEFAULT_BASES)
    names = [n for n, _ in bases]
    trainers = [t for _, t in bases]
    fitted = [t(X, y, cfg) for t in trainers]
    if cfg.literal_stacking or not np.any(X != X[0]):
        # meta trained on the bases' own training predictions. Constant inputs
        # also land here: their out-of-fold confidences track fold composition
        # alone and anti-correlate with the held-out labels.
        Z = meta_features(fitted, X)
    else:
        Z = out_of_fold(X, y, cfg, trainers)
    meta = train_logistic(Z, y, cfg)
    return StackedModel(fitted, meta, names)
