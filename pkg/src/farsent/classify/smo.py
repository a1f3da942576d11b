"""Soft-margin SVM trained by sequential minimal optimization.

Each step picks the maximal violating pair of the dual, solves the two-variable
subproblem in closed form and clips it to the box [0, C]. Three binary machines
(one per class pair) are combined by margin-weighted voting.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .base import N_CLASSES, Model, Standardizer, TrainConfig, check_xy, register

PAIRS = tuple(combinations(range(N_CLASSES), 2))  # (neg,obj) (neg,pos) (obj,pos)
_TAU = 1e-12


def kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str = "linear", gamma: float = 0.5) -> np.ndarray:
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass
class BinarySVM:
    """Binary machine over targets y in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    b: float
    C: float
    kernel: str = "linear"
    gamma: float = 0.5
    iterations: int = 0
    converged: bool = True

    def decision(self, Z: np.ndarray) -> np.ndarray:
        if len(self.alpha) == 0:
            return np.full(len(Z), self.b)
        K = kernel_matrix(np.asarray(Z, dtype=np.float64), self.X, self.kernel, self.gamma)
        return K @ (self.alpha * self.y) + self.b

    def dual_objective(self) -> float:
        return dual_objective(self.alpha, self.y, kernel_matrix(self.X, self.X, self.kernel, self.gamma))

    def kkt_violations(self, tol: float = 1e-3) -> int:
        yf = self.y * self.decision(self.X)
        lo = self.alpha <= 0.0
        hi = self.alpha >= self.C
        free = ~lo & ~hi
        bad = (lo & (yf < 1 - tol)) | (hi & (yf > 1 + tol)) | (free & (np.abs(yf - 1) > tol))
        return int(bad.sum())

    def compact(self) -> "BinarySVM":
        """Keep support vectors only."""
        keep = self.alpha > 0
        return BinarySVM(self.X[keep], self.y[keep], self.alpha[keep], self.b, self.C,
                         self.kernel, self.gamma, self.iterations, self.converged)

    def to_dict(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist(), "alpha": self.alpha.tolist(), "b": self.b,
                "C": self.C, "kernel": self.kernel, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, d: dict) -> "BinarySVM":
        X = np.asarray(d["X"], dtype=np.float64)
        return cls(X.reshape(len(d["alpha"]), -1), np.asarray(d["y"], dtype=np.float64),
                   np.asarray(d["alpha"], dtype=np.float64), float(d["b"]), float(d["C"]),
                   d["kernel"], float(d["gamma"]))


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij, to be maximized."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def smo_binary(X: np.ndarray, y: np.ndarray, C: float = 1.0, tol: float = 1e-3, max_passes: int = 50,
               kernel: str = "linear", gamma: float = 0.5) -> BinarySVM:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("binary targets must be -1 or +1")
    if len(np.unique(y)) < 2:
        # one-sided data: a constant machine
        return BinarySVM(X[:0], y[:0], np.zeros(0), float(y[0]), C, kernel, gamma)
    K = kernel_matrix(X, X, kernel, gamma)
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 1/2 a'Qa - e'a
    it = 0
    converged = False
    while it < max_passes * n:
        v = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        i = int(np.argmax(np.where(up, v, -np.inf)))
        j = int(np.argmin(np.where(low, v, np.inf)))
        m, M = v[i], v[j]
        if m - M < tol:
            converged = True
            break
        a = max(K[i, i] + K[j, j] - 2.0 * K[i, j], _TAU)
        t = (m - M) / a
        t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
        di, dj = y[i] * t, -y[j] * t
        alpha[i] += di
        alpha[j] += dj
        for k in (i, j):
            if alpha[k] < 1e-12 * C:
                alpha[k] = 0.0
            elif alpha[k] > C * (1 - 1e-12):
                alpha[k] = C
        G += Q[:, i] * di + Q[:, j] * dj
        it += 1

    v = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(v[free].mean())
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        m = v[up].max() if up.any() else 0.0
        M = v[low].min() if low.any() else 0.0
        b = float((m + M) / 2.0)
    return BinarySVM(X, y, alpha, b, C, kernel, gamma, it, converged)


@register
class SVMModel(Model):
    kind = "svm"

    def __init__(self, machines: list[BinarySVM], standardizer: Standardizer):
        self.machines = machines
        self.standardizer = standardizer
        self.n_features = len(standardizer.mean)

    def votes(self, X) -> np.ndarray:
        Xs = self.standardizer.transform(X)
        V = np.zeros((len(Xs), N_CLASSES))
        for (a, b), svm in zip(PAIRS, self.machines):
            d = svm.decision(Xs)
            rows = np.arange(len(Xs))
            V[rows, np.where(d > 0, a, b)] += np.abs(d)
        return V

    def predict_proba(self, X) -> np.ndarray:
        V = self.votes(X)
        s = V.sum(axis=1, keepdims=True)
        return np.where(s > 0, V / np.where(s > 0, s, 1.0), 1.0 / N_CLASSES)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "machines": [m.to_dict() for m in self.machines],
                "standardizer": self.standardizer.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "SVMModel":
        return cls([BinarySVM.from_dict(m) for m in d["machines"]], Standardizer.from_dict(d["standardizer"]))


def train_svm_smo(X, y, cfg: TrainConfig = TrainConfig(), keep_all: bool = False) -> SVMModel:
    """One machine per class pair; the first class of a pair is the +1 side.

    ``keep_all`` retains every training point in the machines (for auditing)
    instead of the support vectors only.
    """
    X, y = check_xy(X, y)
    std = Standardizer.fit(X)
    Xs = std.transform(X)
    machines = []
    for a, b in PAIRS:
        mask = (y == a) | (y == b)
        if not mask.any():
            machines.append(BinarySVM(Xs[:0], np.zeros(0), np.zeros(0), 0.0, cfg.C, cfg.kernel, cfg.gamma))
            continue
        t = np.where(y[mask] == a, 1.0, -1.0)
        svm = smo_binary(Xs[mask], t, cfg.C, cfg.tol, cfg.max_passes, cfg.kernel, cfg.gamma)
        machines.append(svm if keep_all else svm.compact())
    return SVMModel(machines, std)


def binary_machine(model: SVMModel, pair: tuple[int, int]) -> Optional[BinarySVM]:
    return model.machines[PAIRS.index(tuple(pair))]
