"""Multinomial logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES, Model, Standardizer, TrainConfig, check_xy, one_hot, register, softmax


def loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float):
    """Mean cross-entropy plus 0.5 * l2 * ||W||^2, with gradients wrt W and b."""
    n = len(X)
    P = softmax(X @ W + b)
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None))) / n + 0.5 * l2 * np.sum(W * W)
    D = (P - Y) / n
    return loss, X.T @ D + l2 * W, D.sum(axis=0)


@register
class LogisticModel(Model):
    kind = "logistic"

    def __init__(self, W, b, standardizer: Standardizer, losses=None):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.standardizer = standardizer
        self.n_features = self.W.shape[0]
        self.losses = list(losses or [])

    def decision(self, X) -> np.ndarray:
        return self.standardizer.transform(X) @ self.W + self.b

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision(np.asarray(X, dtype=np.float64)))

    @classmethod
    def zeros(cls, n_features: int) -> "LogisticModel":
        std = Standardizer(np.zeros(n_features), np.ones(n_features))
        return cls(np.zeros((n_features, N_CLASSES)), np.zeros(N_CLASSES), std)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "W": self.W.tolist(), "b": self.b.tolist(),
                "standardizer": self.standardizer.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(np.asarray(d["W"]).reshape(-1, N_CLASSES), d["b"], Standardizer.from_dict(d["standardizer"]))


def train_logistic(X, y, cfg: TrainConfig = TrainConfig()) -> LogisticModel:
    """Gradient descent with step halving: a step that raises the loss is
    rejected and retried at half the rate, so accepted losses never increase."""
    X, y = check_xy(X, y)
    std = Standardizer.fit(X)
    Xs = std.transform(X)
    Y = one_hot(y)
    freq = Y.mean(axis=0)
    W = np.zeros((X.shape[1], N_CLASSES))
    b = np.log(np.maximum(freq, 1e-6))
    b -= b.mean()
    lr = cfg.learning_rate
    loss, gW, gb = loss_and_grad(W, b, Xs, Y, cfg.l2)
    losses = [loss]
    for _ in range(cfg.epochs):
        for _halving in range(40):
            W_new, b_new = W - lr * gW, b - lr * gb
            new_loss, new_gW, new_gb = loss_and_grad(W_new, b_new, Xs, Y, cfg.l2)
            if new_loss <= loss:
                break
            lr *= 0.5
        else:
            break  # no descent possible at any tried step
        W, b, loss, gW, gb = W_new, b_new, new_loss, new_gW, new_gb
        losses.append(loss)
    return LogisticModel(W, b, std, losses)
