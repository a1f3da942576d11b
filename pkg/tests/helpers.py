"""Paths and small builders shared by the test modules."""

from pathlib import Path

import reference_features as ref
from farsent.pipeline import RunConfig

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
LEX_FILES = {k: str(FIXTURES / f"lex_{k}.tsv") for k in ("triple", "scalar", "label")}
LEX_ARGS = [a for k in ("triple", "scalar", "label") for a in (f"--lex-{k}", LEX_FILES[k])]

ABBR = ["ک.م.م."]

# Sentence-boundary decision tree: one case per branch
SEGMENTATION_SUITE = [
    ("الف. ب!", [], ["الف.", "ب!"]),  # period + blank, then exclamation
    ("من در ک.م.م. کار می کنم. خوب است.", ABBR, ["من در ک.م.م. کار می کنم.", "خوب است."]),
    ("سلام ک.م.م. است", ABBR, ["سلام ک.م.م. است"]),  # abbreviation period never splits
    ("عالی بود!خوب", [], ["عالی بود!", "خوب"]),  # ! splits with no blank after it
    ("چرا؟ نمی دانم", [], ["چرا؟", "نمی دانم"]),  # Persian question mark
    ("why? ok", [], ["why?", "ok"]),
    ("واقعا!!! خوب", [], ["واقعا!!!", "خوب"]),  # a run of terminals stays with its sentence
    ("قیمت 3.5 بود. خوب", [], ["قیمت 3.5 بود.", "خوب"]),  # period not followed by blank
    ("فقط یک جمله", [], ["فقط یک جمله"]),  # trailing text
    ("جمله اول. جمله دوم", [], ["جمله اول.", "جمله دوم"]),
    ("", [], []),
    ("   ", [], []),
]


def fixture_config(**kw) -> RunConfig:
    return RunConfig(lex_triple=LEX_FILES["triple"], lex_scalar=LEX_FILES["scalar"],
                     lex_label=LEX_FILES["label"], **kw)


def reference_lexicons():
    return tuple(ref.RefLexicon(LEX_FILES[k], k) for k in ("triple", "scalar", "label"))


def oracle_diffs(corpus, res, levels=("sentence", "document")):
    """(id, level, max abs difference) of library vs reference features per record."""
    triple, scalar, label = reference_lexicons()
    keywords = ref.read_keywords()
    out = []
    for rec in corpus:
        for lv in levels:
            doc = res.preprocessor.document(rec.text, rec.id, lv)
            mine = list(res.featurizer.extract(doc))
            theirs = ref.reference_features(doc, triple, scalar, label, keywords, lv)
            out.append((rec.id, lv, max(abs(a - b) for a, b in zip(mine, theirs))))
    return out
