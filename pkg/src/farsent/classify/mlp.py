"""Feed-forward network with tanh hidden layers, trained by minibatch SGD.

The same Network backs the MLP base classifier and the embedding classifier.
Two heads are supported: softmax with cross-entropy over k units, and a single
linear unit with mean squared error.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .base import N_CLASSES, Model, Standardizer, TrainConfig, check_xy, one_hot, register, softmax

HEADS = ("softmax", "mse")


class Network:
    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray], head: str = "softmax"):
        if head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}")
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.head = head

    @classmethod
    def init(cls, n_in: int, widths: Sequence[int], n_out: int, rng: np.random.Generator,
             head: str = "softmax") -> "Network":
        """Glorot-uniform hidden layers and a zero output layer, so an
        untrained softmax network predicts the uniform distribution."""
        sizes = [n_in, *widths]
        W, B = [], []
        for a, b in zip(sizes[:-1], sizes[1:]):
            lim = np.sqrt(6.0 / (a + b))
            W.append(rng.uniform(-lim, lim, size=(a, b)))
            B.append(np.zeros(b))
        W.append(np.zeros((sizes[-1], n_out)))
        B.append(np.zeros(n_out))
        return cls(W, B, head)

    @property
    def params(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def forward(self, X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        acts = [X]
        h = X
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.tanh(h @ W + b)
            acts.append(h)
        out = h @ self.weights[-1] + self.biases[-1]
        return out, acts

    def output(self, X: np.ndarray) -> np.ndarray:
        out, _ = self.forward(X)
        return softmax(out) if self.head == "softmax" else out

    def loss_and_grads(self, X: np.ndarray, T: np.ndarray, l2: float = 0.0):
        """Mean loss over the batch and gradients for every weight then every bias.

        T is one-hot for the softmax head and an (n, 1) target column for mse.
        """
        n = len(X)
        out, acts = self.forward(X)
        if self.head == "softmax":
            P = softmax(out)
            loss = -np.sum(T * np.log(np.clip(P, 1e-300, None))) / n
            delta = (P - T) / n
        else:
            r = out - T
            loss = 0.5 * np.sum(r * r) / n
            delta = r / n
        loss += 0.5 * l2 * sum(np.sum(W * W) for W in self.weights)
        gW = [None] * len(self.weights)
        gB = [None] * len(self.biases)
        for layer in range(len(self.weights) - 1, -1, -1):
            gW[layer] = acts[layer].T @ delta + l2 * self.weights[layer]
            gB[layer] = delta.sum(axis=0)
            if layer:
                delta = (delta @ self.weights[layer].T) * (1.0 - acts[layer] ** 2)
        return loss, [*gW, *gB]

    def sgd(self, X: np.ndarray, T: np.ndarray, *, lr: float, epochs: int, batch_size: int,
            rng: np.random.Generator, l2: float = 0.0) -> list[float]:
        """Train in place; returns full-data loss before training and after each epoch."""
        losses = [self.loss_and_grads(X, T, l2)[0]]
        n = len(X)
        for _ in range(epochs):
            order = rng.permutation(n)
            for s in range(0, n, batch_size):
                idx = order[s:s + batch_size]
                _, grads = self.loss_and_grads(X[idx], T[idx], l2)
                for p, g in zip(self.params, grads):
                    p -= lr * g
            losses.append(self.loss_and_grads(X, T, l2)[0])
        return losses

    def to_dict(self) -> dict:
        return {"head": self.head, "weights": [w.tolist() for w in self.weights],
                "biases": [b.tolist() for b in self.biases]}

    @classmethod
    def from_dict(cls, d: dict) -> "Network":
        return cls([np.asarray(w, dtype=np.float64) for w in d["weights"]],
                   [np.asarray(b, dtype=np.float64) for b in d["biases"]], d["head"])


@register
class MLPModel(Model):
    kind = "mlp"

    def __init__(self, net: Network, standardizer: Standardizer, losses: Optional[list] = None):
        self.net = net
        self.standardizer = standardizer
        self.n_features = len(standardizer.mean)
        self.losses = list(losses or [])

    def predict_proba(self, X) -> np.ndarray:
        return self.net.output(self.standardizer.transform(X))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "net": self.net.to_dict(), "standardizer": self.standardizer.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "MLPModel":
        return cls(Network.from_dict(d["net"]), Standardizer.from_dict(d["standardizer"]))


def train_mlp(X, y, cfg: TrainConfig = TrainConfig()) -> MLPModel:
    X, y = check_xy(X, y)
    std = Standardizer.fit(X)
    Xs = std.transform(X)
    rng = np.random.default_rng(cfg.seed)
    net = Network.init(X.shape[1], cfg.hidden_widths, N_CLASSES, rng)
    losses = net.sgd(Xs, one_hot(y), lr=cfg.mlp_learning_rate, epochs=cfg.epochs,
                     batch_size=cfg.batch_size, rng=rng, l2=cfg.l2)
    return MLPModel(net, std, losses)
