import numpy as np

from farsent.evaluation import AblationRow, ConfusionMatrix
from farsent.features import ProbabilityTable
from farsent.plots import ablation_bars, confusion_heatmap, probability_curves, projection_scatter

PNG = b"\x89PNG\r\n\x1a\n"


def test_every_figure_renders(tmp_path):
    rows = [AblationRow("F1-F2", "document", 0.6, 30, 20), AblationRow("All", "sentence", 0.7, 30, 20)]
    paths = [
        ablation_bars(rows, tmp_path / "a.png"),
        confusion_heatmap(ConfusionMatrix(np.array([[3, 1, 0], [0, 2, 0], [1, 0, 5]])), tmp_path / "c.png", "t"),
        projection_scatter(["x", "y", "z"], np.array([[0.0, 1], [1, 0], [-1, -1]]), tmp_path / "s.png"),
        probability_curves(ProbabilityTable.default(), tmp_path / "sub" / "p.png"),
    ]
    for p in paths:
        assert p.read_bytes()[:8] == PNG


def test_rendering_is_stable(tmp_path):
    a = probability_curves(ProbabilityTable.default(), tmp_path / "a.png").read_bytes()
    b = probability_curves(ProbabilityTable.default(), tmp_path / "b.png").read_bytes()
    assert a == b


def test_empty_confusion_matrix(tmp_path):
    p = confusion_heatmap(ConfusionMatrix(np.zeros((3, 3), dtype=int)), tmp_path / "z.png")
    assert p.stat().st_size > 0
