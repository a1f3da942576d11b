import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import oracle_diffs
from farsent.features import (
    FEATURE_NAMES, EstimationError, FeatureVector, ProbabilityTable, average_scores, extract_features,
    prob_feature, probability_table_from_counts, read_feature_csv, write_feature_csv,
)
from farsent.lexicon import Label, PolarityLabel, Scalar, Scheme, Triple
from farsent.preprocess import Document, Level

# reference P(i) series, i = 1..6
TABLE = {
    "p_pos_doc": (0.98, 0.57, 0.38, 0.29, 0.20, 0.03),
    "p_pos_sent": (0.89, 0.42, 0.17, 0.09, 0.01, 0.0),
    "p_neg_doc": (0.89, 0.52, 0.25, 0.18, 0.10, 0.05),
    "p_neg_sent": (0.8, 0.29, 0.17, 0.08, 0.03, 0.0),
}


@pytest.mark.parametrize("series", sorted(TABLE))
def test_default_table_cells(series):
    assert getattr(ProbabilityTable.default(), series) == TABLE[series]


@pytest.mark.parametrize("series", sorted(TABLE))
def test_prob_feature_cells(series):
    vals = getattr(ProbabilityTable.default(), series)
    for i in range(1, 7):
        assert prob_feature(i, vals) == i * TABLE[series][i - 1]


def test_prob_feature_examples():
    t = ProbabilityTable.default()
    assert prob_feature(2, t.series("pos", Level.DOCUMENT)) == pytest.approx(1.14, abs=1e-15)
    assert prob_feature(5, t.series("neg", Level.SENTENCE)) == pytest.approx(0.15, abs=1e-15)
    assert prob_feature(0, t.p_pos_doc) == 0.0
    assert prob_feature(7, t.p_pos_doc) == 0.0
    with pytest.raises(ValueError):
        prob_feature(-1, t.p_pos_doc)


def test_table_tsv_round_trip(tmp_path):
    t = ProbabilityTable.default()
    p = tmp_path / "t.tsv"
    p.write_text(t.to_tsv(), encoding="utf-8")
    assert ProbabilityTable.load(p) == t


def test_average_scores_examples():
    assert average_scores([Triple(0.8, 0.1, 0.1), Triple(0.4, 0.3, 0.3)], Scheme.TRIPLE, 5) == \
        pytest.approx((0.6, 0.2))
    assert average_scores([], Scheme.SCALAR, 3) == (0.0, 0.0)
    labels = [Label(PolarityLabel.POSITIVE)] * 3 + [Label(PolarityLabel.NEGATIVE)]
    assert average_scores(labels, Scheme.LABEL, 8) == (0.375, 0.125)
    assert average_scores([Scalar(0.5), Scalar(-0.2), Scalar(0.3)], Scheme.SCALAR, 3) == pytest.approx((0.4, 0.2))


L_DOC = Level.DOCUMENT


def test_estimate_exactly_i():
    rows = [(L_DOC, PolarityLabel.POSITIVE, 1, 0)] * 3 + [(L_DOC, PolarityLabel.NEGATIVE, 0, 2)]
    t = probability_table_from_counts(rows)
    assert t.p_pos_doc == (1.0, 0, 0, 0, 0, 0)
    assert t.p_neg_doc == (0, 1.0, 0, 0, 0, 0)
    assert t.p_pos_sent == TABLE["p_pos_sent"]  # absent level keeps the default


def test_estimate_counting_oracle():
    rows = [(L_DOC, PolarityLabel.POSITIVE, 2, 0), (L_DOC, PolarityLabel.POSITIVE, 3, 1),
            (L_DOC, PolarityLabel.NEGATIVE, 0, 9)]
    t = probability_table_from_counts(rows)
    assert t.p_pos_doc == (0, 0.5, 0.5, 0, 0, 0)
    assert t.p_neg_doc == (0, 0, 0, 0, 0, 1.0)  # capped at 6
    assert probability_table_from_counts(rows, at_least=True).p_pos_doc == (1.0, 1.0, 0.5, 0, 0, 0)


def test_estimate_missing_class():
    with pytest.raises(EstimationError, match="negative"):
        probability_table_from_counts([(L_DOC, PolarityLabel.POSITIVE, 1, 0)])


# --- extraction ---------------------------------------------------------------

def test_empty_review_is_zero(resources):
    assert resources.featurizer.extract(Document("x", [])) == FeatureVector()
    doc = resources.preprocessor.document("", "x")
    assert tuple(resources.featurizer.extract(doc)) == (0.0,) * 17


def test_review_small_hand_vector(resources, fixtures):
    text = (fixtures / "review_small.txt").read_text(encoding="utf-8").strip()
    expected = json.loads((fixtures / "review_small.expected.json").read_text(encoding="utf-8"))
    doc = resources.preprocessor.document(text, "small", expected["level"])
    got = resources.featurizer.extract(doc)
    assert list(got) == pytest.approx(expected["features"], abs=1e-12)


def test_review_small_via_extract_features(resources, fixtures):
    text = (fixtures / "review_small.txt").read_text(encoding="utf-8").strip()
    doc = resources.preprocessor.document(text, "small")
    fz = resources.featurizer
    assert extract_features(doc, fz.lexicons, shifters=fz.shifters) == fz.extract(doc)


def test_matches_reference_on_fixture_corpus(corpus, resources):
    assert len(corpus) >= 50
    worst = max(d for _, _, d in oracle_diffs(corpus, resources))
    assert worst <= 1e-9


def test_single_sentence_edges_equal(resources):
    doc = resources.preprocessor.document("اتاق تمیز و راحت بود", "s", "document")
    f = resources.featurizer.extract(doc)
    assert f.f15 == f.f16 != 0


def test_sentence_level_has_no_edge_features(resources, corpus):
    for rec in corpus[:20]:
        f = resources.featurizer.extract(resources.preprocessor.document(rec.text, rec.id, "sentence"))
        assert f.f15 == f.f16 == 0.0


def test_invariants_on_corpus(resources, corpus):
    for rec in corpus:
        f = resources.featurizer.extract(resources.preprocessor.document(rec.text, rec.id, rec.level))
        assert {f.f9, f.f10, f.f11, f.f12} <= {0.0, 1.0}
        assert f.f17 >= 0 and f.f17 == int(f.f17)
        assert 0 <= f.f13 <= 1 and 0 <= f.f14 <= 1
        assert f == resources.featurizer.extract(resources.preprocessor.document(rec.text, rec.id, rec.level))


BAG = (0, 1, 2, 3, 4, 5, 6, 7, 12, 13, 16)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 85), st.randoms(use_true_random=False))
def test_sentence_permutation_keeps_bag_features(resources, corpus, k, rnd):
    rec = corpus[k]
    doc = resources.preprocessor.document(rec.text, rec.id, "document")
    shuffled = list(doc.sentences)
    rnd.shuffle(shuffled)
    a = resources.featurizer.extract(doc)
    b = resources.featurizer.extract(Document(doc.id, shuffled, doc.level))
    for i in BAG:
        assert a[i] == pytest.approx(b[i], abs=1e-12)


def test_feature_csv_round_trip(tmp_path):
    rows = [("b", "pos", [0.1] * 17), ("a", "neg", [random.Random(1).random() for _ in range(17)])]
    p = tmp_path / "f.csv"
    write_feature_csv(p, rows)
    ids, labels, vals = read_feature_csv(p)
    assert ids == ["a", "b"] and labels == ["neg", "pos"]
    assert vals[0] == rows[1][2]
    assert p.read_text().splitlines()[0].split(",") == ["id", "label", *FEATURE_NAMES]
