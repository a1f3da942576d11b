"""The 17 review features used by the stacked classifiers.

=====  ================================================================
f1-2   triple lexicon: mean positive / negative component of matches
f3-4   scalar lexicon: mean positive score / mean |negative| score
f5-6   label lexicon: positive / negative match counts over f17
f7-8   i * P(i) for the number of positive / negative words
f9-10  exclamation / question mark present
f11-12 positive / negative emoticon present
f13-14 domain keyword counts over f17
f15-16 mean word polarity of the first / last sentence (documents only)
f17    number of word tokens
=====  ================================================================
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .lexicon import Lexicon, PolarityLabel, PolarityValue, Scheme
from .preprocess import Document, Level, Sentence, _read_pairs, data_path, make_ngrams
from .scoring import ScoredSentence, ScoringOptions, score_sentence, unit_polarities
from .shift import ShiftConstants, Shifters, annotate_shift_scopes

log = logging.getLogger(__name__)

N_FEATURES = 17
FEATURE_NAMES = tuple(f"f{i}" for i in range(1, N_FEATURES + 1))
MAX_I = 6


class EstimationError(ValueError):
    pass


class FeatureVector(NamedTuple):
    f1: float = 0.0
    f2: float = 0.0
    f3: float = 0.0
    f4: float = 0.0
    f5: float = 0.0
    f6: float = 0.0
    f7: float = 0.0
    f8: float = 0.0
    f9: float = 0.0
    f10: float = 0.0
    f11: float = 0.0
    f12: float = 0.0
    f13: float = 0.0
    f14: float = 0.0
    f15: float = 0.0
    f16: float = 0.0
    f17: float = 0.0


# --- probability table -----------------------------------------------------

SERIES = ("p_pos_doc", "p_pos_sent", "p_neg_doc", "p_neg_sent")


@dataclass(frozen=True)
class ProbabilityTable:
    """P(i), i = 1..6, for each polarity/level series."""

    p_pos_doc: tuple[float, ...]
    p_pos_sent: tuple[float, ...]
    p_neg_doc: tuple[float, ...]
    p_neg_sent: tuple[float, ...]

    def __post_init__(self):
        for name in SERIES:
            vals = getattr(self, name)
            if len(vals) != MAX_I:
                raise ValueError(f"{name} needs {MAX_I} values, got {len(vals)}")
            if not all(0.0 <= v <= 1.0 for v in vals):
                raise ValueError(f"{name} values must lie in [0, 1]")

    def series(self, polarity: str, level: Level) -> tuple[float, ...]:
        lvl = "doc" if level is Level.DOCUMENT else "sent"
        return getattr(self, f"p_{polarity}_{lvl}")

    @classmethod
    def load(cls, path) -> "ProbabilityTable":
        cols: dict[str, dict[int, float]] = {s: {} for s in SERIES}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if header != ["i", *SERIES]:
                raise ValueError(f"{path}: bad header {header}")
            for line in fh:
                if not line.strip():
                    continue
                parts = line.split()
                i = int(parts[0])
                for name, v in zip(SERIES, parts[1:]):
                    cols[name][i] = float(v)
        if any(sorted(c) != list(range(1, MAX_I + 1)) for c in cols.values()):
            raise ValueError(f"{path}: rows i=1..{MAX_I} required")
        return cls(*(tuple(cols[s][i] for i in range(1, MAX_I + 1)) for s in SERIES))

    @classmethod
    def default(cls) -> "ProbabilityTable":
        return cls.load(data_path("prob_table.tsv"))

    def to_tsv(self) -> str:
        lines = ["\t".join(["i", *SERIES])]
        for i in range(MAX_I):
            lines.append("\t".join([str(i + 1)] + [repr(getattr(self, s)[i]) for s in SERIES]))
        return "\n".join(lines) + "\n"


def prob_feature(i: int, series: Sequence[float]) -> float:
    """i * P(i) for 1 <= i <= 6, else 0."""
    if i < 0:
        raise ValueError("count must be non-negative")
    if 1 <= i <= MAX_I:
        return i * series[i - 1]
    return 0.0


def probability_table_from_counts(rows: Iterable[tuple[Level, PolarityLabel, int, int]],
                                  at_least: bool = False,
                                  fallback: Optional[ProbabilityTable] = None) -> ProbabilityTable:
    """Estimate P(i) from (level, label, n_pos, n_neg) rows.

    Positive series use only positive reviews and their positive-word
    counts, negative series only negative reviews. Counts above 6 are
    capped at 6. By default P(i) is the fraction with exactly i words; with
    ``at_least`` it is the fraction with at least i. Levels absent from
    ``rows`` keep the ``fallback`` (default table) values.
    """
    fallback = fallback or ProbabilityTable.default()
    buckets: dict[tuple[Level, str], list[int]] = {}
    for level, label, n_pos, n_neg in rows:
        if label is PolarityLabel.POSITIVE:
            buckets.setdefault((level, "pos"), []).append(min(n_pos, MAX_I))
        elif label is PolarityLabel.NEGATIVE:
            buckets.setdefault((level, "neg"), []).append(min(n_neg, MAX_I))
        else:
            buckets.setdefault((level, "obj"), [])
    levels = {lvl for lvl, _ in buckets}
    out = {}
    for level in Level:
        tag = "doc" if level is Level.DOCUMENT else "sent"
        for pol in ("pos", "neg"):
            name = f"p_{pol}_{tag}"
            if level not in levels:
                out[name] = getattr(fallback, name)
                continue
            counts = buckets.get((level, pol))
            if not counts:
                cls = "positive" if pol == "pos" else "negative"
                raise EstimationError(f"no {cls} reviews at {level.value} level")
            n = len(counts)
            if at_least:
                out[name] = tuple(sum(c >= i for c in counts) / n for i in range(1, MAX_I + 1))
            else:
                out[name] = tuple(sum(c == i for c in counts) / n for i in range(1, MAX_I + 1))
    return ProbabilityTable(**out)


# --- keywords --------------------------------------------------------------

@dataclass(frozen=True)
class DomainKeywords:
    positive: frozenset = frozenset()
    negative: frozenset = frozenset()

    def __post_init__(self):
        if self.positive & self.negative:
            raise ValueError(f"keywords listed as both polarities: {sorted(self.positive & self.negative)}")

    @classmethod
    def load(cls, path) -> "DomainKeywords":
        pos, neg = set(), set()
        for surface, pol in _read_pairs(path):
            {"pos": pos, "neg": neg}[pol].add(" ".join(surface.split()))
        return cls(frozenset(pos), frozenset(neg))

    @classmethod
    def default(cls) -> "DomainKeywords":
        return cls.load(data_path("keywords.tsv"))


# --- aggregation -----------------------------------------------------------

def average_scores(values: Sequence[PolarityValue], scheme: Scheme, length: int) -> tuple[float, float]:
    """(positive, negative) aggregate of matched values for one scheme."""
    if not values:
        return 0.0, 0.0
    if scheme is Scheme.TRIPLE:
        return (math.fsum(v.pos for v in values) / len(values),
                math.fsum(v.neg for v in values) / len(values))
    if scheme is Scheme.SCALAR:
        pos = [v.value for v in values if v.value > 0]
        neg = [-v.value for v in values if v.value < 0]
        return (math.fsum(pos) / len(pos) if pos else 0.0,
                math.fsum(neg) / len(neg) if neg else 0.0)
    if length <= 0:
        return 0.0, 0.0
    n_pos = sum(v.label is PolarityLabel.POSITIVE for v in values)
    n_neg = sum(v.label is PolarityLabel.NEGATIVE for v in values)
    return n_pos / length, n_neg / length


@dataclass
class Lexicons:
    triple: Optional[Lexicon] = None
    scalar: Optional[Lexicon] = None
    label: Optional[Lexicon] = None

    def ordered(self, names: Sequence[str] = ("triple", "scalar", "label")) -> list[Lexicon]:
        return [getattr(self, n) for n in names if getattr(self, n) is not None]


@dataclass
class Featurizer:
    """Bundles the resources needed to turn a preprocessed review into features."""

    lexicons: Lexicons
    probs: ProbabilityTable = field(default_factory=ProbabilityTable.default)
    keywords: DomainKeywords = field(default_factory=DomainKeywords.default)
    shifters: Shifters = field(default_factory=Shifters.default)
    constants: ShiftConstants = field(default_factory=ShiftConstants)
    options: ScoringOptions = field(default_factory=ScoringOptions)
    order: tuple[str, ...] = ("triple", "scalar", "label")

    def score(self, sentence: Sentence, lexicon: Lexicon) -> ScoredSentence:
        words = sentence.words
        ann = annotate_shift_scopes(words, self.shifters)
        return score_sentence(words, lexicon, self.shifters, self.constants, self.options, ann)

    def sentence_units(self, sentence: Sentence, names: Sequence[str]) -> list[tuple[int, float]]:
        lexes = self.lexicons.ordered(names)
        return unit_polarities([self.score(sentence, lex) for lex in lexes])

    def polar_counts(self, review: Document) -> tuple[int, int]:
        n_pos = n_neg = 0
        for s in review.sentences:
            for _, p in self.sentence_units(s, self.order):
                n_pos += p > 0
                n_neg += p < 0
        return n_pos, n_neg

    def avg_lexicon_scores(self, review: Document, lexicon: Lexicon) -> tuple[float, float]:
        values = [v for s in review.sentences for v in self.score(s, lexicon).matched()]
        length = sum(len(s.words) for s in review.sentences)
        return average_scores(values, lexicon.scheme, length)

    def _edge_polarity(self, sentence: Sentence) -> float:
        units = self.sentence_units(sentence, ("triple", "scalar"))
        if not units:
            return 0.0
        return math.fsum(p for _, p in units) / len(units)

    def extract(self, review: Document, level: Optional[Level | str] = None) -> FeatureVector:
        level = review.level if level is None else Level.parse(level)
        length = sum(len(s.words) for s in review.sentences)
        if length == 0 and not review.sentences:
            return FeatureVector()
        f = [0.0] * N_FEATURES
        for slot, lex in ((0, self.lexicons.triple), (2, self.lexicons.scalar), (4, self.lexicons.label)):
            if lex is not None:
                f[slot], f[slot + 1] = self.avg_lexicon_scores(review, lex)
        n_pos, n_neg = self.polar_counts(review)
        f[6] = prob_feature(n_pos, self.probs.series("pos", level))
        f[7] = prob_feature(n_neg, self.probs.series("neg", level))
        f[8] = float(any(s.has_exclamation for s in review.sentences))
        f[9] = float(any(s.has_question for s in review.sentences))
        f[10] = float(any(s.positive_emoticons for s in review.sentences))
        f[11] = float(any(s.negative_emoticons for s in review.sentences))
        if length:
            keys = [g.key for s in review.sentences for g in make_ngrams(s.words)]
            f[12] = sum(k in self.keywords.positive for k in keys) / length
            f[13] = sum(k in self.keywords.negative for k in keys) / length
        if level is Level.DOCUMENT and review.sentences:
            f[14] = self._edge_polarity(review.sentences[0])
            f[15] = self._edge_polarity(review.sentences[-1])
        f[16] = float(length)
        return FeatureVector(*f)


def extract_features(review: Document, lexicons: Lexicons, probs: Optional[ProbabilityTable] = None,
                     keywords: Optional[DomainKeywords] = None, level: Optional[Level | str] = None,
                     **kwargs) -> FeatureVector:
    fz = Featurizer(lexicons, probs or ProbabilityTable.default(), keywords or DomainKeywords.default(), **kwargs)
    return fz.extract(review, level)


def estimate_probability_table(reviews: Iterable[tuple[Document, PolarityLabel]], featurizer: Featurizer,
                               at_least: bool = False) -> ProbabilityTable:
    rows = []
    for doc, label in reviews:
        n_pos, n_neg = featurizer.polar_counts(doc)
        rows.append((doc.level, label, n_pos, n_neg))
    return probability_table_from_counts(rows, at_least=at_least, fallback=featurizer.probs)


def write_feature_csv(path, rows: Iterable[tuple[str, str, Sequence[float]]]) -> None:
    """rows: (id, label, 17 values); written sorted by id."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "label", *FEATURE_NAMES])
        for rid, label, vals in sorted(rows, key=lambda r: r[0]):
            w.writerow([rid, label, *(repr(float(v)) for v in vals)])


def read_feature_csv(path) -> tuple[list[str], list[str], list[list[float]]]:
    ids, labels, rows = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[:2] != ["id", "label"] or tuple(header[2:]) != FEATURE_NAMES:
            raise ValueError(f"{path}: unexpected header {header}")
        for rec in r:
            ids.append(rec[0])
            labels.append(rec[1])
            rows.append([float(x) for x in rec[2:]])
    return ids, labels, rows
