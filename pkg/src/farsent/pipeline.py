"""Run configuration and the glue from a labeled corpus to feature matrices."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classify.base import TrainConfig
from .evaluation import LabeledReview
from .features import DomainKeywords, Featurizer, Lexicons, ProbabilityTable
from .lexicon import POS, Scheme, load_lexicon
from .preprocess import Document, Level, PreprocessConfig, Preprocessor, _read_list, load_emoticons
from .scoring import ScoringOptions
from .shift import Shifters

CONFIG_ENV = "FARSENT_CONFIG"
CLASSIFIERS = ("logistic", "mlp", "svm", "stack", "ffn")


class ConfigError(ValueError):
    pass


_PATH_FIELDS = ("lex_triple", "lex_scalar", "lex_label", "shifters", "keywords", "stopwords",
                "abbreviations", "emoticons", "prob_table", "embeddings")
_BOOL_FIELDS = ("literal_stacking", "literal_reducer", "at_least", "scalar_ffn_head")


@dataclass
class RunConfig:
    lex_triple: Optional[str] = None
    lex_scalar: Optional[str] = None
    lex_label: Optional[str] = None
    shifters: Optional[str] = None
    keywords: Optional[str] = None
    stopwords: Optional[str] = None
    abbreviations: Optional[str] = None
    emoticons: Optional[str] = None
    prob_table: Optional[str] = None
    embeddings: Optional[str] = None
    seed: int = 0
    level: Optional[str] = None
    classifier: str = "stack"
    literal_stacking: bool = False
    literal_reducer: bool = False
    elongation_window: str = "preceding"
    at_least: bool = False
    scalar_ffn_head: bool = False

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ConfigError(f"classifier must be one of {CLASSIFIERS}")
        if self.elongation_window not in ("preceding", "following"):
            raise ConfigError("elongation_window must be 'preceding' or 'following'")
        if self.level is not None:
            self.level = Level.parse(self.level).value

    def check_paths(self) -> None:
        missing = [f"{k}={getattr(self, k)}" for k in _PATH_FIELDS
                   if getattr(self, k) and not Path(getattr(self, k)).is_file()]
        if missing:
            raise ConfigError("missing file(s): " + ", ".join(missing))

    def override(self, **kw) -> "RunConfig":
        """Copy with every non-None keyword applied (flags beat the file)."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def train_config(self, **kw) -> TrainConfig:
        return TrainConfig(seed=self.seed, literal_stacking=self.literal_stacking, **kw)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def read_config(path) -> RunConfig:
    """Plain key = value file; section headers only group keys. Relative
    paths resolve against the file's directory."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    base = Path(path).resolve().parent
    values: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            if name in _BOOL_FIELDS:
                try:
                    values[name] = parser.getboolean(section, key)
                except ValueError:
                    raise ConfigError(f"{path}: {key} must be a boolean") from None
            elif name == "seed":
                try:
                    values[name] = int(raw)
                except ValueError:
                    raise ConfigError(f"{path}: seed must be an integer") from None
            elif name in _PATH_FIELDS:
                p = Path(raw)
                values[name] = str(p if p.is_absolute() else base / p)
            else:
                values[name] = raw
    return RunConfig(**values)


def default_config(path: Optional[str] = None) -> RunConfig:
    path = path or os.environ.get(CONFIG_ENV)
    return read_config(path) if path else RunConfig()


# --- building resources -------------------------------------------------------

def load_lexicons(cfg: RunConfig) -> Lexicons:
    def one(path, scheme):
        return load_lexicon(path, scheme) if path else None
    return Lexicons(one(cfg.lex_triple, Scheme.TRIPLE), one(cfg.lex_scalar, Scheme.SCALAR),
                    one(cfg.lex_label, Scheme.LABEL))


def _lexicon_pos(lexicons: Lexicons) -> dict[str, POS]:
    tags: dict[str, POS] = {}
    for lex in reversed(lexicons.ordered()):  # earlier lexicons win
        for (surface, pos) in lex.entries:
            if pos is not None and " " not in surface:
                tags[surface] = pos
    return tags


@dataclass
class Resources:
    preprocessor: Preprocessor
    featurizer: Featurizer


def build(cfg: RunConfig, lexicons: Optional[Lexicons] = None) -> Resources:
    lexicons = lexicons if lexicons is not None else load_lexicons(cfg)
    shifters = Shifters.load(cfg.shifters) if cfg.shifters else Shifters.default()
    keywords = DomainKeywords.load(cfg.keywords) if cfg.keywords else DomainKeywords.default()
    pcfg = PreprocessConfig.default()
    rules = pcfg.rules
    if cfg.stopwords:
        rules = replace(rules, stopwords=frozenset(_read_list(cfg.stopwords)))
    # shifter and keyword words must reach lookup with their surface intact
    protect = set(shifters.surfaces())
    for k in keywords.positive | keywords.negative:
        protect.update(k.split())
    rules = rules.with_protected(protect).with_pos(_lexicon_pos(lexicons))
    pcfg = PreprocessConfig(
        rules=rules,
        abbreviations=_read_list(cfg.abbreviations) if cfg.abbreviations else pcfg.abbreviations,
        emoticons=load_emoticons(cfg.emoticons) if cfg.emoticons else pcfg.emoticons,
    )
    probs = ProbabilityTable.load(cfg.prob_table) if cfg.prob_table else ProbabilityTable.default()
    options = ScoringOptions(literal_reducer=cfg.literal_reducer, elongation_neighbour=cfg.elongation_window)
    fz = Featurizer(lexicons, probs, keywords, shifters, options=options)
    return Resources(Preprocessor(pcfg), fz)


# --- corpus -> features ---------------------------------------------------------

@dataclass
class FeatureSet:
    ids: list[str]
    labels: np.ndarray  # class indices
    levels: list[str]
    X: np.ndarray

    def select(self, mask) -> "FeatureSet":
        idx = np.flatnonzero(mask)
        return FeatureSet([self.ids[i] for i in idx], self.labels[idx], [self.levels[i] for i in idx], self.X[idx])

    def level(self, level: Level | str) -> "FeatureSet":
        lv = Level.parse(level).value
        return self.select([x == lv for x in self.levels])


def preprocess_corpus(corpus: Sequence[LabeledReview], res: Resources) -> list[Document]:
    return [res.preprocessor.document(r.text, r.id, r.level) for r in corpus]


def featurize(corpus: Sequence[LabeledReview], res: Resources,
              level: Optional[Level | str] = None) -> FeatureSet:
    """Feature matrix with rows sorted by review id. ``level`` overrides the
    per-record level for feature selection and filters nothing."""
    rows = sorted(corpus, key=lambda r: r.id)
    docs = preprocess_corpus(rows, res)
    X = np.array([res.featurizer.extract(d, level) for d in docs], dtype=np.float64).reshape(len(rows), -1)
    lv = [Level.parse(level).value if level is not None else r.level.value for r in rows]
    return FeatureSet([r.id for r in rows], np.array([r.label.index for r in rows], dtype=np.int64), lv, X)


__all__ = ["RunConfig", "ConfigError", "read_config", "default_config", "build", "Resources",
           "FeatureSet", "featurize", "preprocess_corpus", "load_lexicons", "CONFIG_ENV", "CLASSIFIERS"]
