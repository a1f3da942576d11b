"""Pre-trained word vectors: loading, review pooling, a feed-forward
classifier, the analogy query and a 2-D PCA projection."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .classify.base import N_CLASSES, Model, check_xy, one_hot, register
from .classify.mlp import Network
from .preprocess import Token

log = logging.getLogger(__name__)


class VectorLoadError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    skipped: int = 0
    count_mismatch: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        for tok, v in self.vectors.items():
            if len(v) != self.dim:
                raise ValueError(f"vector for {tok!r} has length {len(v)}, expected {self.dim}")

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, token):
        return token in self.vectors

    def get(self, token: str) -> Optional[np.ndarray]:
        return self.vectors.get(token)

    def matrix(self) -> tuple[list[str], np.ndarray]:
        toks = list(self.vectors)
        return toks, np.array([self.vectors[t] for t in toks]).reshape(len(toks), self.dim)


def load_vectors(path) -> EmbeddingTable:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        try:
            if len(header) != 2:
                raise ValueError
            count, dim = int(header[0]), int(header[1])
            if count < 0 or dim < 1:
                raise ValueError
        except ValueError:
            raise VectorLoadError(f"{path}:1: expected '<count> <dim>' header") from None
        table = EmbeddingTable(dim)
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            try:
                if len(parts) != dim + 1:
                    raise ValueError
                vec = np.array([float(x) for x in parts[1:]])
                if not np.all(np.isfinite(vec)):
                    raise ValueError
            except ValueError:
                table.skipped += 1
                log.warning("%s:%d: skipped row with %d values", path, lineno, len(parts) - 1)
                continue
            table.vectors[parts[0]] = vec
    if len(table.vectors) + table.skipped != count:
        table.count_mismatch = True
        log.warning("%s: header declares %d rows, found %d", path, count, len(table.vectors) + table.skipped)
    return table


def embed_review(tokens: Iterable[Token | str], table: EmbeddingTable) -> np.ndarray:
    """Mean vector over in-vocabulary tokens (normalized form first, then surface)."""
    hits = []
    for tok in tokens:
        if isinstance(tok, str):
            v = table.get(tok)
        else:
            v = table.get(tok.normalized)
            if v is None:
                v = table.get(tok.surface)
        if v is not None:
            hits.append(v)
    if not hits:
        return np.zeros(table.dim)
    return np.mean(hits, axis=0)


# --- classifier -------------------------------------------------------------

@dataclass
class FeedForwardConfig:
    hidden_layers: int = 5
    layer_width: int = 32
    output_units: int = 3
    loss: str = "cross_entropy"  # or "mse"
    learning_rate: float = 0.05
    epochs: int = 200
    batch_size: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.hidden_layers < 1:
            raise ValueError("hidden_layers must be at least 1")
        if self.output_units not in (1, 3):
            raise ValueError("output_units must be 1 or 3")
        if self.loss not in ("cross_entropy", "mse"):
            raise ValueError("loss must be 'cross_entropy' or 'mse'")
        if (self.output_units == 1) != (self.loss == "mse"):
            raise ValueError("a 1-unit head needs mse and a 3-unit head needs cross_entropy")

    @classmethod
    def compatibility(cls, **kw) -> "FeedForwardConfig":
        """Single linear output regressed onto -1/0/+1."""
        return cls(output_units=1, loss="mse", **kw)


THRESHOLD = 0.5


@register
class FFNModel(Model):
    kind = "ffn"

    def __init__(self, net: Network, n_features: int, losses=None):
        self.net = net
        self.n_features = n_features
        self.losses = list(losses or [])

    @property
    def compatibility(self) -> bool:
        return self.net.head == "mse"

    def raw_output(self, X) -> np.ndarray:
        return self.net.output(np.asarray(X, dtype=np.float64))

    def predict_proba(self, X) -> np.ndarray:
        out = self.raw_output(X)
        if not self.compatibility:
            return out
        # thresholded regression: all mass on the chosen class
        o = out[:, 0]
        idx = np.where(o <= -THRESHOLD, 0, np.where(o >= THRESHOLD, 2, 1))
        return one_hot(idx)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "net": self.net.to_dict(), "n_features": self.n_features}

    @classmethod
    def from_dict(cls, d: dict) -> "FFNModel":
        return cls(Network.from_dict(d["net"]), int(d["n_features"]))


def ffn_targets(y: np.ndarray, output_units: int) -> np.ndarray:
    if output_units == 3:
        return one_hot(y)
    return (y.astype(np.float64) - 1.0)[:, None]  # neg -1, obj 0, pos +1


def train_ffn(X, y, cfg: FeedForwardConfig = FeedForwardConfig()) -> FFNModel:
    X, y = check_xy(X, y)
    rng = np.random.default_rng(cfg.seed)
    head = "softmax" if cfg.output_units == N_CLASSES else "mse"
    net = Network.init(X.shape[1], [cfg.layer_width] * cfg.hidden_layers, cfg.output_units, rng, head=head)
    losses = net.sgd(X, ffn_targets(y, cfg.output_units), lr=cfg.learning_rate, epochs=cfg.epochs,
                     batch_size=cfg.batch_size, rng=rng)
    return FFNModel(net, X.shape[1], losses)


# --- demos ------------------------------------------------------------------

def analogy(table: EmbeddingTable, a: str, b: str, c: str) -> str:
    """Token closest by cosine to vec(a) - vec(b) + vec(c), excluding the query words."""
    missing = [t for t in (a, b, c) if t not in table]
    if missing:
        raise ValueError(f"not in vocabulary: {missing}")
    target = table.vectors[a] - table.vectors[b] + table.vectors[c]
    tn = np.linalg.norm(target)
    best, best_cos = None, -np.inf
    for tok, v in table.vectors.items():
        if tok in (a, b, c):
            continue
        vn = np.linalg.norm(v)
        cos = float(v @ target / (vn * tn)) if vn > 0 and tn > 0 else 0.0
        if cos > best_cos:
            best, best_cos = tok, cos
    if best is None:
        raise DegenerateInputError("no candidate tokens outside the query")
    return best


def principal_axes(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector columns of the sample covariance.
    Each eigenvector is signed so its largest-magnitude component is positive."""
    C = np.cov(X, rowvar=False)
    vals, vecs = np.linalg.eigh(np.atleast_2d(C))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    for k in range(vecs.shape[1]):
        if vecs[np.argmax(np.abs(vecs[:, k])), k] < 0:
            vecs[:, k] = -vecs[:, k]
    return vals, vecs


def project_2d(vectors: Sequence[Sequence[float]]) -> np.ndarray:
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise DegenerateInputError("need at least 2 vectors of dimension at least 2")
    if len(np.unique(X, axis=0)) < 2:
        raise DegenerateInputError("need at least 2 distinct vectors")
    _, vecs = principal_axes(X)
    return (X - X.mean(axis=0)) @ vecs[:, :2]


def write_projection_csv(path, tokens: Sequence[str], coords: np.ndarray) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["token", "x", "y"])
        for tok, (x, y) in zip(tokens, coords):
            w.writerow([tok, repr(float(x)), repr(float(y))])
