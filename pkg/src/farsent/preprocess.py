"""Coreference pass, sentence segmentation, tokenization and partial normalization."""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Optional

from .lexicon import POS

log = logging.getLogger(__name__)

ZWNJ = "‌"
TERMINALS = "!?؟"  # ! ? and the Arabic-script question mark
ELONGATION_RUN = 3

_CHAR_MAP = str.maketrans({
    "ي": "ی",  # Arabic yeh -> Persian yeh
    "ى": "ی",
    "ك": "ک",  # Arabic kaf -> Persian kaf
    "ة": "ه",
})
_DROP = re.compile("[ً-ْـ]")  # harakat and tatweel


class Level(Enum):
    SENTENCE = "sentence"
    DOCUMENT = "document"

    @classmethod
    def parse(cls, token) -> "Level":
        if isinstance(token, Level):
            return token
        key = str(token).strip().lower()
        if key in ("s", "sent", "sentence", "sentencelevel"):
            return cls.SENTENCE
        if key in ("d", "doc", "document", "documentlevel"):
            return cls.DOCUMENT
        raise ValueError(f"unknown level {token!r}")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    pos_hint: POS = POS.NOUN
    elongated: bool = False
    elongation_runs: int = 0
    is_stopword: bool = False
    cleaned: str = ""
    kind: str = "word"  # word | punct | emoticon

    @property
    def is_word(self) -> bool:
        return self.kind == "word"


@dataclass
class Sentence:
    tokens: list[Token]
    raw: str
    has_exclamation: bool = False
    has_question: bool = False
    positive_emoticons: int = 0
    negative_emoticons: int = 0

    @property
    def words(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]


@dataclass
class Document:
    id: str
    sentences: list[Sentence]
    level: Level = Level.DOCUMENT
    coref_failed: bool = False

    @property
    def words(self) -> list[Token]:
        return [t for s in self.sentences for t in s.words]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "level": self.level.value,
            "coref_failed": self.coref_failed,
            "sentences": [
                {
                    "raw": s.raw,
                    "tokens": [
                        {"surface": t.surface, "normalized": t.normalized, "pos": t.pos_hint.value,
                         "elongated": t.elongated, "stopword": t.is_stopword, "kind": t.kind}
                        for t in s.tokens
                    ],
                }
                for s in self.sentences
            ],
        }


# --- coreference -----------------------------------------------------------

Resolver = Callable[[str], str]


def identity_resolver(text: str) -> str:
    return text


class TableResolver:
    """Replace whole-word mentions using a fixed mention -> referent table."""

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)
        alts = sorted(self.table, key=len, reverse=True)
        self._rx = re.compile(
            r"(?<![\w‌])(" + "|".join(map(re.escape, alts)) + r")(?![\w‌])"
        ) if alts else None

    def __call__(self, text: str) -> str:
        if self._rx is None:
            return text
        return self._rx.sub(lambda m: self.table[m.group(1)], text)


def resolve_coreference(text: str, resolver: Optional[Resolver] = None) -> tuple[str, bool]:
    """Apply ``resolver`` to the whole text once.

    Returns ``(text, failed)``. A resolver exception leaves the text untouched
    and sets ``failed`` so the caller can record it.
    """
    resolver = resolver or identity_resolver
    try:
        out = resolver(text)
    except Exception as exc:  # resolver is third-party code
        log.warning("coreference resolver failed: %s", exc)
        return text, True
    if not isinstance(out, str):
        log.warning("coreference resolver returned %s, ignoring", type(out).__name__)
        return text, True
    return out, False


# --- segmentation ----------------------------------------------------------

def _abbreviation_periods(text: str, abbreviations: Iterable[str]) -> set[int]:
    protected: set[int] = set()
    for abbr in abbreviations:
        if not abbr:
            continue
        start = text.find(abbr)
        while start != -1:
            if start == 0 or not text[start - 1].isalnum():
                protected.update(i for i in range(start, start + len(abbr)) if text[i] == ".")
            start = text.find(abbr, start + 1)
    return protected


def segment_sentences(text: str, abbreviations: Iterable[str] = ()) -> list[str]:
    """Split text into sentences.

    A period ends a sentence when followed by blank space or the end of the
    text, unless it belongs to a listed abbreviation. ``!``, ``?`` and ``؟``
    always end a sentence (runs of them stay together). Trailing text without
    terminal punctuation forms a last sentence.
    """
    protected = _abbreviation_periods(text, abbreviations)
    out: list[str] = []
    start = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        cut = None
        if ch in TERMINALS:
            j = i + 1
            while j < n and (text[j] in TERMINALS or text[j] == "."):
                j += 1
            cut = j
        elif ch == "." and i not in protected and (i + 1 == n or text[i + 1].isspace()):
            cut = i + 1
        if cut is not None:
            piece = text[start:cut].strip()
            if piece:
                out.append(piece)
            start = i = cut
            continue
        i += 1
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return out


# --- tokenization ----------------------------------------------------------

def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(sentence: str, emoticons: Iterable[str] = (), abbreviations: Iterable[str] = ()) -> list[str]:
    """Whitespace split with punctuation detached.

    ZWNJ stays inside tokens, listed emoticons and abbreviations stay whole,
    and separators between digits (``3.5``) are not split. A free-standing
    ``می``/``نمی`` is joined to the following verb with a ZWNJ.
    """
    emos = sorted(set(emoticons), key=len, reverse=True)
    abbrs = set(abbreviations)
    tokens: list[str] = []
    for chunk in sentence.split():
        if chunk in abbrs:
            tokens.append(chunk)
            continue
        buf: list[str] = []
        i = 0
        while i < len(chunk):
            emo = next((e for e in emos if chunk.startswith(e, i)), None)
            if emo is not None:
                if buf:
                    tokens.append("".join(buf))
                    buf = []
                tokens.append(emo)
                i += len(emo)
                continue
            ch = chunk[i]
            if _is_punct(ch) and not (
                ch in ".,٫٬" and 0 < i < len(chunk) - 1
                and chunk[i - 1].isdigit() and chunk[i + 1].isdigit()
            ):
                if buf:
                    tokens.append("".join(buf))
                    buf = []
                # keep runs of the same mark together ("!!", "...")
                j = i + 1
                while j < len(chunk) and chunk[j] == ch:
                    j += 1
                tokens.append(chunk[i:j])
                i = j
                continue
            buf.append(ch)
            i += 1
        if buf:
            tokens.append("".join(buf))
    return join_verb_prefix(tokens)


def join_verb_prefix(tokens: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("می", "نمی") and i + 1 < len(tokens) and not _is_punct(tokens[i + 1][0]):
            out.append(tok + ZWNJ + tokens[i + 1])
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


# --- normalization ---------------------------------------------------------

def collapse_elongation(surface: str) -> tuple[str, int]:
    """Collapse every run of >= 3 identical characters to one character."""
    out: list[str] = []
    runs = 0
    i, n = 0, len(surface)
    while i < n:
        j = i
        while j < n and surface[j] == surface[i]:
            j += 1
        if j - i >= ELONGATION_RUN:
            out.append(surface[i])
            runs += 1
        else:
            out.append(surface[i:j])
        i = j
    return "".join(out), runs


def clean(surface: str) -> str:
    """Character-level cleaning: Arabic letter variants, diacritics, case."""
    return _DROP.sub("", surface.translate(_CHAR_MAP)).lower()


def _read_list(path) -> list[str]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if line.strip() and not line.startswith("#"):
                items.append(line.strip())
    return items


def _read_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    for line in _read_list(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}: expected two tab-separated columns in {line!r}")
        pairs.append((parts[0].strip(), parts[1].strip()))
    return pairs


def data_path(name: str) -> Path:
    return Path(str(resources.files("farsent") / "data" / name))


@dataclass
class NormalizationRules:
    plural_suffixes: list[str] = field(default_factory=list)
    postfixes: list[str] = field(default_factory=list)
    stopwords: frozenset = frozenset()
    protected: frozenset = frozenset()
    verb_lemmas: dict[str, str] = field(default_factory=dict)
    pos_words: dict[str, POS] = field(default_factory=dict)
    min_stem: int = 2

    def __post_init__(self):
        self.plural_suffixes = sorted(self.plural_suffixes, key=len, reverse=True)
        self.postfixes = sorted(self.postfixes, key=len, reverse=True)

    @classmethod
    def default(cls) -> "NormalizationRules":
        return cls(
            plural_suffixes=_read_list(data_path("plural_suffixes.txt")),
            postfixes=_read_list(data_path("postfixes.txt")),
            stopwords=frozenset(_read_list(data_path("stopwords.txt"))),
            protected=frozenset(_read_list(data_path("protected.txt"))),
            verb_lemmas=dict(_read_pairs(data_path("verbs.tsv"))),
            pos_words={w: POS.parse(p) or POS.OTHER for w, p in _read_pairs(data_path("pos.tsv"))},
        )

    def with_pos(self, extra: dict[str, POS]) -> "NormalizationRules":
        merged = dict(extra)
        merged.update(self.pos_words)  # closed lists win over lexicon tags
        return NormalizationRules(self.plural_suffixes, self.postfixes, self.stopwords,
                                  self.protected, self.verb_lemmas, merged, self.min_stem)

    def with_protected(self, words: Iterable[str]) -> "NormalizationRules":
        return NormalizationRules(self.plural_suffixes, self.postfixes, self.stopwords,
                                  self.protected | frozenset(words), self.verb_lemmas,
                                  self.pos_words, self.min_stem)


def _strip_one(word: str, suffixes: list[str], min_stem: int) -> str:
    for suf in suffixes:
        if word.endswith(suf) and len(word) - len(suf) >= min_stem:
            return word[: -len(suf)].rstrip(ZWNJ)
    return word


def _pos_hint(word: str, rules: NormalizationRules) -> POS:
    if word in rules.pos_words:
        return rules.pos_words[word]
    if word in rules.verb_lemmas or word.startswith(("می" + ZWNJ, "نمی" + ZWNJ)):
        return POS.VERB
    if word.endswith(("ترین", "تر")) and ZWNJ in word:
        return POS.ADJ
    if word.endswith("انه"):
        return POS.ADV
    if not any(ch.isalpha() for ch in word):
        return POS.OTHER
    return POS.NOUN


def normalize_token(surface: str, rules: NormalizationRules) -> Token:
    """Clean, collapse elongation, strip listed postfixes and plural suffixes.

    Prefixes are never touched. Stopwords are flagged and kept. Words in the
    verb table are replaced by their lemma.
    """
    collapsed, runs = collapse_elongation(surface)
    cleaned = clean(collapsed)
    if not cleaned:
        cleaned = collapsed
    stop = cleaned in rules.stopwords
    if cleaned in rules.verb_lemmas:
        normalized = rules.verb_lemmas[cleaned]
        pos = rules.pos_words.get(cleaned, POS.VERB)
    else:
        normalized = cleaned
        if not stop and cleaned not in rules.protected:
            normalized = _strip_one(normalized, rules.postfixes, rules.min_stem)
            if normalized not in rules.protected:
                normalized = _strip_one(normalized, rules.plural_suffixes, rules.min_stem)
        pos = _pos_hint(normalized, rules) if normalized in rules.pos_words else _pos_hint(cleaned, rules)
    return Token(surface=surface, normalized=normalized, pos_hint=pos, elongated=runs > 0,
                 elongation_runs=runs, is_stopword=stop, cleaned=cleaned)


class NGram(NamedTuple):
    key: str
    start: int  # index into the token list
    end: int  # inclusive
    pos: POS


def make_ngrams(tokens: list[Token]) -> list[NGram]:
    """Unigram and bigram lookup keys for one sentence.

    Unigrams use the normalized form and skip stopwords. A bigram joins the
    cleaned (not normalized) first word with the normalized second word.
    """
    grams: list[NGram] = []
    for i, tok in enumerate(tokens):
        if i > 0:
            prev = tokens[i - 1]
            grams.append(NGram(f"{prev.cleaned or prev.surface} {tok.normalized}", i - 1, i, tok.pos_hint))
        if not tok.is_stopword:
            grams.append(NGram(tok.normalized, i, i, tok.pos_hint))
    return grams


# --- pipeline --------------------------------------------------------------

@dataclass
class PreprocessConfig:
    rules: NormalizationRules
    abbreviations: list[str] = field(default_factory=list)
    emoticons: dict[str, str] = field(default_factory=dict)  # emoticon -> "pos" | "neg"
    resolver: Optional[Resolver] = None

    @classmethod
    def default(cls) -> "PreprocessConfig":
        return cls(
            rules=NormalizationRules.default(),
            abbreviations=_read_list(data_path("abbreviations.txt")),
            emoticons=load_emoticons(data_path("emoticons.tsv")),
        )


def load_emoticons(path) -> dict[str, str]:
    table = {}
    for emo, pol in _read_pairs(path):
        if pol not in ("pos", "neg"):
            raise ValueError(f"{path}: emoticon polarity must be pos or neg, got {pol!r}")
        table[emo] = pol
    return table


class Preprocessor:
    def __init__(self, config: Optional[PreprocessConfig] = None):
        self.config = config or PreprocessConfig.default()

    def token(self, surface: str) -> Token:
        cfg = self.config
        if surface in cfg.emoticons:
            return Token(surface, surface, POS.OTHER, kind="emoticon", cleaned=surface)
        if surface in cfg.abbreviations:
            return Token(surface, surface, POS.NOUN, cleaned=surface)
        if all(_is_punct(ch) for ch in surface):
            return Token(surface, surface, POS.OTHER, kind="punct", cleaned=surface)
        return normalize_token(surface, cfg.rules)

    def sentence(self, raw: str) -> Sentence:
        cfg = self.config
        toks = [self.token(s) for s in tokenize(raw, cfg.emoticons, cfg.abbreviations)]
        emo = [cfg.emoticons[t.surface] for t in toks if t.kind == "emoticon"]
        return Sentence(
            tokens=toks,
            raw=raw,
            has_exclamation="!" in raw,
            has_question="?" in raw or "؟" in raw,
            positive_emoticons=emo.count("pos"),
            negative_emoticons=emo.count("neg"),
        )

    def document(self, text: str, doc_id: str = "", level: Level | str = Level.DOCUMENT) -> Document:
        text, failed = resolve_coreference(text, self.config.resolver)
        sentences = [self.sentence(s) for s in segment_sentences(text, self.config.abbreviations)]
        return Document(doc_id, sentences, Level.parse(level), coref_failed=failed)
