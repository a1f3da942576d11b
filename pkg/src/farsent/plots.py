"""Report figures written straight to files (Agg backend, no display)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .evaluation import LABEL_NAMES, AblationRow, ConfusionMatrix  # noqa: E402
from .features import MAX_I, ProbabilityTable  # noqa: E402
from .preprocess import Level  # noqa: E402

# keep rendered files stable across runs
plt.rcParams["svg.hashsalt"] = "farsent"
_SAVE = {"dpi": 100, "metadata": {"Software": None}}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def ablation_bars(rows: Sequence[AblationRow], path) -> Path:
    levels = sorted({r.level for r in rows})
    fig, axes = plt.subplots(1, len(levels), figsize=(5 * len(levels), 3.5), squeeze=False)
    for ax, lv in zip(axes[0], levels):
        sub = [r for r in rows if r.level == lv]
        ax.barh([r.subset for r in sub][::-1], [100 * r.accuracy for r in sub][::-1], color="0.4")
        ax.set_xlim(0, 100)
        ax.set_xlabel("accuracy (%)")
        ax.set_title(f"{lv} level")
    return _save(fig, path)


def confusion_heatmap(cm: ConfusionMatrix, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(3.6, 3.2))
    M = cm.counts
    ax.imshow(M, cmap="Greys")
    ax.set_xticks(range(3), LABEL_NAMES)
    ax.set_yticks(range(3), LABEL_NAMES)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    hi = M.max() if M.size else 0
    for i in range(3):
        for j in range(3):
            ax.text(j, i, str(M[i, j]), ha="center", va="center",
                    color="white" if hi and M[i, j] > hi / 2 else "black")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def projection_scatter(tokens: Sequence[str], coords: np.ndarray, path) -> Path:
    fig, ax = plt.subplots(figsize=(4.5, 4))
    ax.scatter(coords[:, 0], coords[:, 1], s=12, color="0.2")
    for tok, (x, y) in zip(tokens, coords):
        ax.annotate(tok, (x, y), fontsize=7, xytext=(2, 2), textcoords="offset points")
    ax.set_xlabel("PC1")
    ax.set_ylabel("PC2")
    return _save(fig, path)


def probability_curves(table: ProbabilityTable, path) -> Path:
    i = np.arange(1, MAX_I + 1)
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    for pol, mk in (("pos", "o"), ("neg", "s")):
        for lv, ls in ((Level.DOCUMENT, "-"), (Level.SENTENCE, "--")):
            ax.plot(i, table.series(pol, lv), ls, marker=mk, color="0.2", label=f"{pol} {lv.value}")
    ax.set_xlabel("i (polar words)")
    ax.set_ylabel("P(i)")
    ax.legend(fontsize=7)
    return _save(fig, path)
