import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference_features as ref
from farsent.lexicon import Label, PolarityLabel, Scalar, Triple
from farsent.preprocess import Preprocessor
from farsent.shift import (
    EMPTY, IntensifierKind, SchemeError, Scope, ShiftConstants, Shifters, annotate_shift_scopes,
    apply_elongation, double, emphasize, intensify, negate,
)

C = ShiftConstants()
ADD, RED = IntensifierKind.ADDITIVE, IntensifierKind.REDUCER
PRE = Preprocessor()
SHIFTERS = Shifters.default()


def words(text):
    return PRE.sentence(text).words


def approx_triple(t, expected):
    assert (t.pos, t.obj, t.neg) == pytest.approx(expected, abs=1e-12)


# --- annotation ---------------------------------------------------------------

def test_verb_negation_is_sentence_wide():
    ann = annotate_shift_scopes(words("غذا خوب نیست"), SHIFTERS)
    assert all(a.negated and a.scope is Scope.SENTENCE_WIDE for a in ann)


def test_local_negation_hits_following_noun():
    ann = annotate_shift_scopes(words("بدون منظره خوب بود"), SHIFTERS)
    assert [a.negated for a in ann] == [False, True, False, False]
    assert ann[1].scope is Scope.LOCAL


def test_no_shifters_gives_empty_annotations():
    assert annotate_shift_scopes(words("هتل خوب بود"), SHIFTERS) == [EMPTY] * 3


def test_intensifier_marks_adjacent_adjective():
    ann = annotate_shift_scopes(words("غذا بسیار خوب بود"), SHIFTERS)
    assert ann[2].intensifier_kind is ADD
    ann = annotate_shift_scopes(words("پذیرش یک ذره خوب بود"), SHIFTERS)
    assert ann[3].intensifier_kind is RED


def test_shifter_sets_disjoint():
    with pytest.raises(ValueError):
        Shifters(frozenset({"نیست"}), {"نیست": ADD})


VOCAB = ["غذا", "خوب", "نیست", "بدون", "منظره", "بود", "خیلی", "کمی", "هتل", "بد", "است", "یک ذره", "بی"]


@settings(max_examples=300)
@given(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8))
def test_annotation_matches_window_scan(seq):
    ws = words(" ".join(seq))
    ann = annotate_shift_scopes(ws, SHIFTERS)
    negated, kinds = ref.annotate(ws)
    assert [a.negated for a in ann] == negated
    assert [a.intensifier_kind.value if a.intensifier_kind else None for a in ann] == kinds
    wide = [a.scope is Scope.SENTENCE_WIDE for a in ann]
    assert all(wide) or not any(wide)


# --- negation -----------------------------------------------------------------

def test_negate_examples():
    approx_triple(negate(Triple(0.7, 0.2, 0.1)), (0.4, 0.2, 0.4))
    assert negate(Scalar(0.5)).value == pytest.approx(0.3, abs=1e-15)
    assert negate(Label(PolarityLabel.NEGATIVE)) == Label(PolarityLabel.OBJECTIVE)
    assert negate(Scalar(0.0)) == Scalar(0.0)
    tie = Triple(0.4, 0.2, 0.4)
    assert negate(tie) == tie


def test_label_double_negation():
    pos = Label(PolarityLabel.POSITIVE)
    assert negate(negate(pos)) == Label(PolarityLabel.OBJECTIVE)
    obj = Label(PolarityLabel.OBJECTIVE)
    assert negate(obj) == obj


unit = st.floats(0, 1)
band = st.floats(C.const1, 1 - C.const1)


@given(band, band, unit)
def test_triple_negation_conserves_pos_plus_neg(p, n, o):
    t = Triple(p, o, n)
    r = negate(t)
    assert r.obj == t.obj
    assert r.pos + r.neg == pytest.approx(p + n, abs=1e-12)


@given(st.floats(-1, 1).filter(lambda s: s != 0))
def test_scalar_negation_exact(s):
    sign = 1 if s > 0 else -1
    assert negate(Scalar(s)).value == s - C.const2 * sign


# --- intensification ---------------------------------------------------------

def test_intensify_examples():
    approx_triple(intensify(Triple(0.7, 0.2, 0.1), ADD), (0.95, 0.2, 0.0))
    assert intensify(Scalar(0.4), ADD).value == pytest.approx(0.55, abs=1e-15)
    assert intensify(Scalar(0.1), RED).value == 0.0
    with pytest.raises(SchemeError):
        intensify(Label(PolarityLabel.POSITIVE), ADD)


def test_literal_reducer_flag():
    assert intensify(Scalar(-0.4), RED).value == pytest.approx(-0.25)
    assert intensify(Scalar(-0.4), RED, literal_reducer=True).value == pytest.approx(-0.55)


@given(st.floats(-1, 1))
def test_reducer_never_flips_sign(s):
    r = intensify(Scalar(s), RED).value
    assert r * s >= 0
    assert abs(r) <= abs(s)


@given(st.floats(C.const4, 1 - C.const4), st.booleans())
def test_additive_then_reducer_inverts(a, neg):
    s = -a if neg else a
    assert intensify(intensify(Scalar(s), ADD), RED).value == pytest.approx(s, abs=1e-12)


triples = st.tuples(unit, unit, unit).filter(lambda t: sum(t) > 0).map(
    lambda t: Triple(t[0] / sum(t), t[1] / sum(t), t[2] / sum(t)))


@given(triples, st.sampled_from(["neg", "add", "red", "emph", "double"]))
def test_triple_outputs_stay_in_unit_box(t, op):
    r = {"neg": negate, "add": lambda v: intensify(v, ADD), "red": lambda v: intensify(v, RED),
         "emph": lambda v: emphasize(v, C.elongation_delta), "double": double}[op](t)
    assert all(0.0 <= x <= 1.0 for x in (r.pos, r.obj, r.neg))


@given(triples)
def test_triple_shifts_match_reference(t):
    tup = (t.pos, t.obj, t.neg)
    for mine, theirs in [(negate(t), ref.ref_negate(tup)),
                         (intensify(t, ADD), ref.ref_intensify(tup, "add")),
                         (intensify(t, RED), ref.ref_intensify(tup, "red")),
                         (emphasize(t, C.elongation_delta), ref.ref_emphasize(tup)),
                         (double(t), ref.ref_double(tup))]:
        assert (mine.pos, mine.obj, mine.neg) == theirs


# --- elongation ---------------------------------------------------------------

def test_elongation_examples():
    tok = PRE.token("خووووب")
    v, nb = apply_elongation(Scalar(0.5), tok)
    assert v.value == pytest.approx(0.7) and nb is None
    intens = PRE.token("خیییلی")
    prev = PRE.token("زیبا")
    v, nb = apply_elongation(None, intens, (prev, Scalar(0.4)), intensifier=True)
    assert v is None and nb.value == pytest.approx(0.8)
    v, nb = apply_elongation(None, intens, (prev, None), intensifier=True)
    assert nb is None


def test_elongation_ignores_plain_tokens():
    assert apply_elongation(Scalar(0.5), PRE.token("خوب")) == (Scalar(0.5), None)


def test_constants_validated():
    with pytest.raises(ValueError):
        ShiftConstants(const1=1.5)
