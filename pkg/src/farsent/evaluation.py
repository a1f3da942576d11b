"""Corpus loading, ternary metrics and the feature-subset ablation harness."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .classify.base import Model, TrainConfig, as_labels, split_train_test
from .classify.stack import train_stack
from .features import N_FEATURES
from .lexicon import LABELS, PolarityLabel
from .preprocess import Level


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledReview:
    id: str
    text: str
    label: PolarityLabel
    level: Level


REQUIRED = ("id", "text", "label", "level")
LABEL_NAMES = tuple(lab.value for lab in LABELS)


def parse_corpus(lines: Iterable[str], source: str = "<corpus>") -> list[LabeledReview]:
    out: list[LabeledReview] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{where}: invalid record ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise CorpusError(f"{where}: record must be an object")
        missing = [k for k in REQUIRED if k not in rec]
        if missing:
            raise CorpusError(f"{where}: missing field(s) {', '.join(missing)}")
        rid = str(rec["id"])
        if rid in seen:
            raise CorpusError(f"{where}: duplicate id {rid!r}")
        seen.add(rid)
        try:
            label = PolarityLabel.parse(rec["label"])
        except ValueError:
            raise CorpusError(f"{where}: unknown label {rec['label']!r}") from None
        try:
            level = Level.parse(rec["level"])
        except ValueError:
            raise CorpusError(f"{where}: unknown level {rec['level']!r}") from None
        if not isinstance(rec["text"], str):
            raise CorpusError(f"{where}: text must be a string")
        out.append(LabeledReview(rid, rec["text"], label, level))
    return out


def load_corpus(path) -> list[LabeledReview]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, str(path))


# --- metrics ----------------------------------------------------------------

def f1_score(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows gold, columns predicted, order neg/obj/pos

    @classmethod
    def from_labels(cls, preds, golds) -> "ConfusionMatrix":
        p, g = as_labels(preds), as_labels(golds)
        if len(p) != len(g):
            raise ValueError(f"{len(p)} predictions for {len(g)} gold labels")
        if len(p) == 0:
            raise ValueError("nothing to score")
        M = np.zeros((3, 3), dtype=np.int64)
        np.add.at(M, (g, p), 1)
        return cls(M)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricsReport:
    precision: tuple[float, float, float]
    recall: tuple[float, float, float]
    f1: tuple[float, float, float]
    support: tuple[int, int, int]
    accuracy: float
    macro_f1: float

    @classmethod
    def from_confusion(cls, cm: ConfusionMatrix) -> "MetricsReport":
        M = cm.counts
        P, R, F = [], [], []
        for c in range(3):
            col, row = M[:, c].sum(), M[c, :].sum()
            p = M[c, c] / col if col else 0.0
            r = M[c, c] / row if row else 0.0
            P.append(float(p))
            R.append(float(r))
            F.append(f1_score(float(p), float(r)))
        return cls(tuple(P), tuple(R), tuple(F), tuple(int(x) for x in M.sum(axis=1)),
                   float(np.trace(M) / M.sum()), float(sum(F) / 3.0))

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "classes": {lab: {"precision": self.precision[i], "recall": self.recall[i], "f1": self.f1[i],
                              "support": self.support[i]} for i, lab in enumerate(LABEL_NAMES)},
        }

    def table(self) -> str:
        lines = [f"{'class':<6} {'P':>7} {'R':>7} {'F1':>7} {'n':>5}"]
        for i, lab in enumerate(LABEL_NAMES):
            lines.append(f"{lab:<6} {self.precision[i]:7.4f} {self.recall[i]:7.4f} {self.f1[i]:7.4f} "
                         f"{self.support[i]:5d}")
        lines.append(f"accuracy {self.accuracy:.4f}  macro-F1 {self.macro_f1:.4f}")
        return "\n".join(lines)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "precision", "recall", "f1", "support"])
        for i, lab in enumerate(LABEL_NAMES):
            w.writerow([lab, repr(self.precision[i]), repr(self.recall[i]), repr(self.f1[i]), self.support[i]])
        w.writerow(["accuracy", repr(self.accuracy), "", "", sum(self.support)])
        w.writerow(["macro_f1", "", "", repr(self.macro_f1), ""])
        return buf.getvalue()


def score(preds, golds) -> tuple[ConfusionMatrix, MetricsReport]:
    cm = ConfusionMatrix.from_labels(preds, golds)
    return cm, MetricsReport.from_confusion(cm)


# --- ablation ---------------------------------------------------------------

def _span(a: int, b: int) -> tuple[int, ...]:
    return tuple(range(a, b + 1))


# (name, 1-based feature indices, document level only)
ABLATION_GRID: tuple[tuple[str, tuple[int, ...], bool], ...] = (
    ("F1-F2", _span(1, 2), False),
    ("F3-F4", _span(3, 4), False),
    ("F1-F4", _span(1, 4), False),
    ("F5-F6", _span(5, 6), False),
    ("F1-F6", _span(1, 6), False),
    ("F7-F8", _span(7, 8), False),
    ("F1-F8", _span(1, 8), False),
    ("F9-F14", _span(9, 14), False),
    ("F15-F16", _span(15, 16), True),
    ("All", _span(1, N_FEATURES), False),
)


def subset_columns(indices: Iterable[int]) -> list[int]:
    cols = sorted(set(indices))
    bad = [i for i in cols if not 1 <= i <= N_FEATURES]
    if bad:
        raise ValueError(f"feature indices out of range 1..{N_FEATURES}: {bad}")
    return [i - 1 for i in cols]


def restrict(X: np.ndarray, indices: Iterable[int], drop: bool = False) -> np.ndarray:
    """Zero every column outside ``indices`` (or remove it when ``drop``)."""
    cols = subset_columns(indices)
    if drop:
        return X[:, cols]
    out = np.zeros_like(X)
    out[:, cols] = X[:, cols]
    return out


@dataclass(frozen=True)
class AblationRow:
    subset: str
    level: str
    accuracy: float
    n_train: int
    n_test: int


def holdout_accuracy(X: np.ndarray, y: np.ndarray, cfg: TrainConfig,
                     trainer: Callable[..., Model] = train_stack) -> tuple[float, int, int]:
    train, test = split_train_test(y, cfg.train_fraction, cfg.seed)
    model = trainer(X[train], y[train], cfg)
    acc = float(np.mean(model.predict(X[test]) == y[test]))
    return acc, len(train), len(test)


def ablate(X, y, level: Level | str, subsets: Optional[Sequence[tuple]] = None,
           cfg: TrainConfig = TrainConfig(), trainer: Callable[..., Model] = train_stack,
           drop: bool = False) -> list[AblationRow]:
    """Held-out accuracy per feature subset on one level's feature matrix.

    Subsets are (name, indices) or (name, indices, document_only) tuples; the
    default is the ten-row ABLATION_GRID. Every row shares the split and seed.
    """
    level = Level.parse(level)
    X = np.asarray(X, dtype=np.float64)
    y = as_labels(y)
    rows = []
    for entry in (ABLATION_GRID if subsets is None else subsets):
        name, idx = entry[0], entry[1]
        doc_only = entry[2] if len(entry) > 2 else False
        cols = subset_columns(idx)  # validate before any training
        if doc_only and level is not Level.DOCUMENT:
            continue
        if drop and not cols:
            raise ValueError("drop mode needs a non-empty subset")
        acc, ntr, nte = holdout_accuracy(restrict(X, idx, drop), y, cfg, trainer)
        rows.append(AblationRow(name, level.value, acc, ntr, nte))
    return rows


def majority_accuracy(y, cfg: TrainConfig = TrainConfig()) -> float:
    """Test accuracy of always predicting the most frequent training class."""
    y = as_labels(y)
    train, test = split_train_test(y, cfg.train_fraction, cfg.seed)
    major = int(np.argmax(np.bincount(y[train], minlength=3)))
    return float(np.mean(y[test] == major))


def ablation_table(rows: Sequence[AblationRow]) -> str:
    """Plain-text layout with one (subset, accuracy) column pair per level."""
    levels = [lv.value for lv in (Level.DOCUMENT, Level.SENTENCE) if any(r.level == lv.value for r in rows)]
    cols = {lv: [r for r in rows if r.level == lv] for lv in levels}
    header = "  ".join(f"{lv + ' subset':<18}{'acc %':>8}" for lv in levels)
    lines = [header]
    for k in range(max((len(c) for c in cols.values()), default=0)):
        cells = []
        for lv in levels:
            if k < len(cols[lv]):
                r = cols[lv][k]
                cells.append(f"{r.subset:<18}{100 * r.accuracy:8.2f}")
            else:
                cells.append(" " * 26)
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def write_ablation_csv(path, rows: Sequence[AblationRow]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subset", "level", "accuracy", "n_train", "n_test"])
        for r in rows:
            w.writerow([r.subset, r.level, repr(r.accuracy), r.n_train, r.n_test])
