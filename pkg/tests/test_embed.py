import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from farsent.classify import dumps_model, predict_confidence, split_train_test
from farsent.embed import (
    DegenerateInputError, EmbeddingTable, FeedForwardConfig, VectorLoadError, analogy, embed_review,
    load_vectors, principal_axes, project_2d, train_ffn, write_projection_csv,
)
from farsent.preprocess import Preprocessor


def write(tmp_path, text):
    p = tmp_path / "v.vec"
    p.write_text(text, encoding="utf-8")
    return p


# --- loading and pooling -----------------------------------------------------

def test_load_two_rows(tmp_path):
    t = load_vectors(write(tmp_path, "2 4\nالف 1 2 3 4\nب 0.5 0 0 -1\n"))
    assert t.dim == 4 and len(t) == 2
    assert t.get("ب").tolist() == [0.5, 0, 0, -1]
    assert not t.count_mismatch


def test_short_row_skipped(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        t = load_vectors(write(tmp_path, "2 4\na 1 2 3\nb 1 2 3 4\n"))
    assert t.skipped == 1 and list(t.vectors) == ["b"]
    assert ":2:" in caplog.text


def test_count_mismatch_tolerated(tmp_path):
    t = load_vectors(write(tmp_path, "5 2\na 1 2\n"))
    assert t.count_mismatch and len(t) == 1


@pytest.mark.parametrize("header", ["a b", "3", "2 0", ""])
def test_bad_header(tmp_path, header):
    with pytest.raises(VectorLoadError):
        load_vectors(write(tmp_path, header + "\nx 1 2\n"))


def test_table_checks_dim():
    with pytest.raises(ValueError):
        EmbeddingTable(2, {"a": np.zeros(3)})


TABLE = EmbeddingTable(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})


def test_embed_review_examples():
    assert embed_review(["a", "b"], TABLE).tolist() == [0.5, 0.5]
    assert embed_review(["x", "y"], TABLE).tolist() == [0.0, 0.0]
    assert embed_review([], TABLE).tolist() == [0.0, 0.0]
    # duplicates weigh by multiplicity: (1,0),(1,0),(0,1)
    assert embed_review(["a", "a", "b", "oov"], TABLE) == pytest.approx([2 / 3, 1 / 3], abs=1e-15)


def test_embed_review_uses_normalized_form():
    pre = Preprocessor()
    tok = pre.token("خوووب")
    t = EmbeddingTable(2, {tok.normalized: np.array([3.0, 4.0])})
    assert embed_review([tok], t).tolist() == [3.0, 4.0]


@given(st.lists(arrays(np.float64, 3, elements=st.floats(-100, 100)), min_size=1, max_size=8))
def test_pooled_norm_bounded(vecs):
    t = EmbeddingTable(3, {f"t{k}": v for k, v in enumerate(vecs)})
    out = embed_review(list(t.vectors), t)
    assert np.linalg.norm(out) <= max(np.linalg.norm(v) for v in vecs) + 1e-9


# --- feed-forward classifier --------------------------------------------------

def clusters(seed=0, dim=8, per=100):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0, 4, (3, dim))
    y = np.repeat([0, 1, 2], per)
    return centers[y] + rng.normal(0, 1, (3 * per, dim)), y


SMALL = dict(hidden_layers=2, layer_width=16, epochs=60)


def test_ffn_separates_clusters():
    X, y = clusters()
    train, test = split_train_test(y, 0.6, 0)
    m = train_ffn(X[train], y[train], FeedForwardConfig(**SMALL))
    assert np.mean(m.predict(X[test]) == y[test]) >= 0.95
    assert m.losses[-1] < m.losses[0]


def test_ffn_default_depth_trains():
    X, y = clusters(1)
    m = train_ffn(X, y, FeedForwardConfig(epochs=40))
    assert len(m.net.weights) == 6
    assert m.losses[-1] < m.losses[0]


def test_ffn_compatibility_mode():
    X, y = clusters(2)
    m = train_ffn(X, y, FeedForwardConfig.compatibility(**SMALL))
    assert m.compatibility
    assert m.raw_output(X).shape == (len(X), 1)
    P = m.predict_proba(X)
    assert set(P.ravel().tolist()) <= {0.0, 1.0}
    assert np.mean(m.predict(X) == y) >= 0.9
    c = predict_confidence(m, X[0])
    assert sum(c.as_tuple()) == 1.0


def test_ffn_config_checks():
    with pytest.raises(ValueError):
        FeedForwardConfig(hidden_layers=0)
    with pytest.raises(ValueError):
        FeedForwardConfig(output_units=2)
    with pytest.raises(ValueError):
        FeedForwardConfig(output_units=1)


def test_ffn_rejects_non_finite():
    X, y = clusters(per=5)
    X[0, 0] = np.inf
    with pytest.raises(ValueError):
        train_ffn(X, y)


def test_ffn_deterministic():
    X, y = clusters(3, per=30)
    cfg = FeedForwardConfig(**SMALL, seed=9)
    assert dumps_model(train_ffn(X, y, cfg)) == dumps_model(train_ffn(X, y, cfg))


# --- analogy ----------------------------------------------------------------

def test_analogy_queen(fixtures):
    t = load_vectors(fixtures / "analogy.vec")
    assert np.array_equal(t.get("king") - t.get("man") + t.get("woman"), t.get("queen"))
    assert analogy(t, "king", "man", "woman") == "queen"


def test_analogy_orthogonal():
    eye = np.eye(4)
    t = EmbeddingTable(4, {w: eye[k] for k, w in enumerate("pqrs")})
    assert analogy(t, "p", "q", "r") == "s"  # the only token left
    t.vectors["u"] = np.array([0.0, 0.0, 1.0, 0.2])
    # target (1,-1,0,1): cos(r) = 0, cos(u) = 0.2 / sqrt(3 * 1.04) > 0
    assert analogy(t, "p", "q", "s") == "u"


def test_analogy_oov():
    with pytest.raises(ValueError, match="zz"):
        analogy(TABLE, "a", "zz", "b")


@settings(max_examples=40)
@given(st.floats(1e-3, 1e3))
def test_analogy_scale_invariant(fixtures, k):
    t = load_vectors(fixtures / "analogy.vec")
    scaled = EmbeddingTable(t.dim, {w: v * k for w, v in t.vectors.items()})
    for q in [("king", "man", "woman"), ("woman", "queen", "king"), ("apple", "man", "prince")]:
        assert analogy(scaled, *q) == analogy(t, *q)


# --- projection -------------------------------------------------------------

def pairwise(P):
    return np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)


def test_2d_projection_is_rigid():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(20, 2)) * [3, 1]
    P = project_2d(X)
    assert np.max(np.abs(pairwise(P) - pairwise(X))) <= 1e-9


def test_rank_one_second_coordinate_zero():
    t = np.linspace(-2, 5, 9)[:, None]
    X = t * np.array([1.0, -2.0, 0.5]) + np.array([4.0, 1.0, 0.0])
    assert np.max(np.abs(project_2d(X)[:, 1])) <= 1e-9


def test_sign_convention():
    X = np.array([[0.0, 0], [-2, 0], [0, 1], [0, -1], [4, 0]])
    _, vecs = principal_axes(X)
    for k in range(2):
        assert vecs[np.argmax(np.abs(vecs[:, k])), k] > 0


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(2, 6)), elements=st.floats(-10, 10)))
def test_projection_variance(X):
    if len(np.unique(X, axis=0)) < 2:
        with pytest.raises(DegenerateInputError):
            project_2d(X)
        return
    P = project_2d(X)
    v = P.var(axis=0, ddof=1)
    assert v[0] >= v[1] - 1e-9
    top = np.sort(np.linalg.eigvalsh(np.cov(X, rowvar=False)))[::-1][:2]
    assert abs(v.sum() - top.sum()) <= 1e-8


@pytest.mark.parametrize("X", [[[1, 2]], [[1, 2], [1, 2], [1, 2]], [[1], [2]]])
def test_projection_degenerate(X):
    with pytest.raises(DegenerateInputError):
        project_2d(X)


def test_projection_csv(tmp_path):
    p = tmp_path / "p.csv"
    write_projection_csv(p, ["a", "b"], np.array([[0.5, -1.0], [2.0, 0.0]]))
    assert p.read_text(encoding="utf-8") == "token,x,y\na,0.5,-1.0\nb,2.0,0.0\n"
