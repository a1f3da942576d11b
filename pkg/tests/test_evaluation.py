import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from farsent.classify import TrainConfig
from farsent.evaluation import (
    ABLATION_GRID, AblationRow, ConfusionMatrix, CorpusError, MetricsReport, ablate, ablation_table, f1_score,
    load_corpus, majority_accuracy, parse_corpus, restrict, score, write_ablation_csv,
)
from farsent.lexicon import PolarityLabel
from farsent.pipeline import Level

# --- corpus ---------------------------------------------------------------------

GOOD = [
    '{"id": "a", "text": "خوب", "label": "pos", "level": "sentence"}',
    '{"id": "b", "text": "بد", "label": "negative", "level": "document"}',
    '{"id": "c", "text": "هتل", "label": "obj", "level": "doc"}',
]


def test_parse_three_records():
    recs = parse_corpus(GOOD)
    assert [r.id for r in recs] == ["a", "b", "c"]
    assert recs[1].label is PolarityLabel.NEGATIVE
    assert recs[2].level is Level.DOCUMENT


@pytest.mark.parametrize("bad,msg", [
    ('{"id": "a", "text": "x", "label": "pos", "level": "sentence"}', "duplicate id"),
    ('{"id": "d", "text": "x", "label": "great", "level": "sentence"}', "unknown label"),
    ('{"id": "d", "text": "x", "label": "pos"}', "missing field"),
    ('{"id": "d", "text": "x", "label": "pos", "level": "paragraph"}', "unknown level"),
    ('{"id": "d", "text": 3, "label": "pos", "level": "doc"}', "text"),
    ("[1, 2]", "object"),
    ("{oops", "invalid"),
])
def test_corpus_errors_name_the_line(bad, msg):
    with pytest.raises(CorpusError, match=f"src:4: .*{msg}"):
        parse_corpus(GOOD + [bad], "src")


def test_fixture_corpus(fixtures):
    corpus = load_corpus(fixtures / "corpus.jsonl")
    assert len(corpus) >= 50
    assert {r.label for r in corpus} == set(PolarityLabel)
    assert len({r.id for r in corpus}) == len(corpus)


# --- metrics --------------------------------------------------------------------

def test_f1_of_reported_row():
    assert f1_score(0.8299, 0.7305) == pytest.approx(0.7770, abs=5e-4)
    assert f1_score(0.0, 0.0) == 0.0


def test_perfect_predictions():
    y = [0, 1, 2, 2, 1]
    cm, rep = score(y, y)
    assert rep.accuracy == 1.0 and rep.f1 == (1.0, 1.0, 1.0) and rep.macro_f1 == 1.0
    assert cm.total == 5


def test_score_errors():
    with pytest.raises(ValueError):
        score([0, 1], [0])
    with pytest.raises(ValueError):
        score([], [])


def test_empty_column_convention():
    _, rep = score(["pos", "pos"], ["pos", "neg"])
    assert rep.precision[0] == 0.0 and rep.recall[0] == 0.0 and rep.f1[0] == 0.0
    assert rep.precision[1] == rep.recall[1] == 0.0


def brute_metrics(preds, golds):
    """Counts by scanning pairs, nothing shared with the library."""
    out = {}
    n = len(golds)
    correct = 0
    for c in range(3):
        tp = sum(1 for p, g in zip(preds, golds) if p == c and g == c)
        predicted = sum(1 for p in preds if p == c)
        actual = sum(1 for g in golds if g == c)
        prec = tp / predicted if predicted else 0.0
        rec = tp / actual if actual else 0.0
        f = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        out[c] = (prec, rec, f, actual)
        correct += tp
    return out, correct / n, (out[0][2] + out[1][2] + out[2][2]) / 3


def test_metrics_match_brute_force():
    rng = random.Random(0)
    for _ in range(1000):
        n = rng.randint(1, 40)
        golds = [rng.randrange(3) for _ in range(n)]
        preds = [rng.randrange(3) for _ in range(n)]
        _, rep = score(preds, golds)
        per, acc, macro = brute_metrics(preds, golds)
        for c in range(3):
            assert (rep.precision[c], rep.recall[c], rep.f1[c], rep.support[c]) == per[c]
        assert rep.accuracy == acc
        assert abs(rep.macro_f1 - macro) <= 1e-12


labels = st.lists(st.integers(0, 2), min_size=1, max_size=60)


@given(labels, st.integers(0, 10**6))
def test_recall_weighted_sum_is_accuracy(golds, seed):
    rng = random.Random(seed)
    preds = [rng.randrange(3) for _ in golds]
    cm, rep = score(preds, golds)
    weighted = sum(rep.recall[c] * rep.support[c] for c in range(3)) / cm.total
    assert weighted == pytest.approx(rep.accuracy, abs=1e-12)
    assert all(0 <= v <= 1 for v in rep.precision + rep.recall + rep.f1)


@given(labels, st.randoms(use_true_random=False))
def test_metrics_permutation_invariant(golds, rnd):
    preds = [(g + rnd.randrange(2)) % 3 for g in golds]
    pairs = list(zip(preds, golds))
    rnd.shuffle(pairs)
    a = score(preds, golds)
    b = score([p for p, _ in pairs], [g for _, g in pairs])
    assert np.array_equal(a[0].counts, b[0].counts)
    assert a[1] == b[1]


def test_report_outputs():
    cm = ConfusionMatrix(np.array([[2, 1, 0], [0, 0, 0], [1, 0, 3]]))
    rep = MetricsReport.from_confusion(cm)
    assert rep.precision == (2 / 3, 0.0, 1.0)
    assert rep.recall == (2 / 3, 0.0, 0.75)
    assert rep.to_dict()["classes"]["obj"]["support"] == 0
    assert rep.csv().splitlines()[0] == "class,precision,recall,f1,support"
    assert "macro-F1" in rep.table()


# --- ablation -------------------------------------------------------------------

def test_restrict():
    X = np.arange(34, dtype=float).reshape(2, 17)
    assert restrict(X, [1, 17]).tolist()[0] == [0.0] + [0.0] * 15 + [16.0]
    assert restrict(X, [2, 3], drop=True).tolist() == [[1.0, 2.0], [18.0, 19.0]]


def doc_matrix(fs):
    d = fs.level(Level.DOCUMENT)
    return d.X, d.labels


def test_invalid_index(feature_set):
    with pytest.raises(ValueError, match="18"):
        ablate(*doc_matrix(feature_set), Level.DOCUMENT, [("bad", (1, 18))])
    with pytest.raises(ValueError):
        ablate(*doc_matrix(feature_set), Level.DOCUMENT, [("bad", (0,))])


def test_empty_subset_is_majority(feature_set):
    X, y = doc_matrix(feature_set)
    cfg = TrainConfig()
    row, = ablate(X, y, Level.DOCUMENT, [("none", ())], cfg)
    assert abs(row.accuracy - majority_accuracy(y, cfg)) <= 1e-9


def test_golden_ablation(feature_set, golden):
    X, y = doc_matrix(feature_set)
    rows = ablate(X, y, Level.DOCUMENT, [("All", range(1, 18)), ("F1-F2", (1, 2))], TrainConfig())
    got = {r.subset: r.accuracy for r in rows}
    assert got == golden["ablation_document"]
    assert got["All"] >= got["F1-F2"]


def test_edge_subset_skipped_at_sentence_level():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(30, 17)), np.repeat([0, 1, 2], 10)
    rows = ablate(X, y, "sentence", [s for s in ABLATION_GRID if s[0] in ("F15-F16", "F1-F2")],
                  TrainConfig(epochs=20))
    assert [r.subset for r in rows] == ["F1-F2"]


def test_ablation_grid_shape():
    assert [s[0] for s in ABLATION_GRID] == ["F1-F2", "F3-F4", "F1-F4", "F5-F6", "F1-F6", "F7-F8", "F1-F8",
                                     "F9-F14", "F15-F16", "All"]
    rows = [AblationRow(n, "document", 0.5, 6, 4) for n, *_ in ABLATION_GRID] + \
        [AblationRow(n, "sentence", 0.25, 6, 4) for n, _, d in ABLATION_GRID if not d]
    text = ablation_table(rows).splitlines()
    assert len(text) == 1 + len(ABLATION_GRID)
    assert "F15-F16" in text[-2] and "All" in text[-1]


def test_ablation_csv(tmp_path):
    p = tmp_path / "a.csv"
    write_ablation_csv(p, [AblationRow("All", "document", 0.75, 30, 20)])
    assert p.read_text() == "subset,level,accuracy,n_train,n_test\nAll,document,0.75,30,20\n"
