"""Polarity lexicons in the three scoring schemes.

A lexicon maps a normalized surface (unigram or space-joined bigram),
optionally qualified by a POS tag, to a polarity value. Three value shapes
are supported:

* ``Triple``  -- (pos, obj, neg) scores summing to one
* ``Scalar``  -- a single score in [-1, 1]
* ``Label``   -- a discrete polarity label

Files are tab separated: ``surface<TAB>pos<TAB>v1[<TAB>v2<TAB>v3]``.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

log = logging.getLogger(__name__)

TRIPLE_LOAD_TOL = 1e-3


class LexiconError(ValueError):
    """Raised for malformed lexicon files."""


class PolarityLabel(Enum):
    NEGATIVE = "neg"
    OBJECTIVE = "obj"
    POSITIVE = "pos"

    @classmethod
    def parse(cls, token: str) -> "PolarityLabel":
        key = token.strip().lower()
        if key in _LABEL_ALIASES:
            return _LABEL_ALIASES[key]
        raise ValueError(f"unknown polarity label {token!r}")

    @property
    def index(self) -> int:
        """Class index used by the classifiers: neg=0, obj=1, pos=2."""
        return _LABEL_INDEX[self]

    @classmethod
    def from_index(cls, i: int) -> "PolarityLabel":
        return LABELS[i]


LABELS = (PolarityLabel.NEGATIVE, PolarityLabel.OBJECTIVE, PolarityLabel.POSITIVE)
_LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}
_LABEL_ALIASES = {
    "neg": PolarityLabel.NEGATIVE, "negative": PolarityLabel.NEGATIVE, "-1": PolarityLabel.NEGATIVE,
    "obj": PolarityLabel.OBJECTIVE, "objective": PolarityLabel.OBJECTIVE,
    "neutral": PolarityLabel.OBJECTIVE, "neu": PolarityLabel.OBJECTIVE, "0": PolarityLabel.OBJECTIVE,
    "pos": PolarityLabel.POSITIVE, "positive": PolarityLabel.POSITIVE, "+1": PolarityLabel.POSITIVE,
    "1": PolarityLabel.POSITIVE,
}


class POS(Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, token: Optional[str]) -> Optional["POS"]:
        """Map a free-form tag onto the closed set; ``_``/empty means untagged."""
        if token is None:
            return None
        tag = token.strip().upper()
        if tag in ("", "_", "NONE"):
            return None
        if tag in cls.__members__:
            return cls[tag]
        return _POS_ALIASES.get(tag, cls.OTHER)


_POS_ALIASES = {
    "N": POS.NOUN, "NN": POS.NOUN, "NE": POS.NOUN, "PROPN": POS.NOUN,
    "V": POS.VERB, "VB": POS.VERB, "AUX": POS.VERB,
    "AJ": POS.ADJ, "AJE": POS.ADJ, "JJ": POS.ADJ, "ADJECTIVE": POS.ADJ,
    "RB": POS.ADV, "ADVERB": POS.ADV,
}


class Scheme(Enum):
    TRIPLE = "triple"
    SCALAR = "scalar"
    LABEL = "label"

    @property
    def n_columns(self) -> int:
        return 3 if self is Scheme.TRIPLE else 1


@dataclass(frozen=True)
class Triple:
    pos: float
    obj: float
    neg: float

    def __post_init__(self):
        for name in ("pos", "obj", "neg"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"triple component {name}={v} outside [0, 1]")

    @property
    def scheme(self) -> Scheme:
        return Scheme.TRIPLE


@dataclass(frozen=True)
class Scalar:
    value: float

    def __post_init__(self):
        if not (-1.0 <= self.value <= 1.0):
            raise ValueError(f"scalar polarity {self.value} outside [-1, 1]")

    @property
    def scheme(self) -> Scheme:
        return Scheme.SCALAR


@dataclass(frozen=True)
class Label:
    label: PolarityLabel

    @property
    def scheme(self) -> Scheme:
        return Scheme.LABEL


PolarityValue = Union[Triple, Scalar, Label]


def triple_from_scores(pos: float, obj: float, neg: float, tol: float = TRIPLE_LOAD_TOL) -> Triple:
    """Build a triple, renormalizing small rounding drift and rejecting larger drift."""
    total = pos + obj + neg
    if abs(total - 1.0) > tol:
        raise ValueError(f"triple scores sum to {total:.6g}, not 1")
    if total != 1.0:
        pos, obj = pos / total, obj / total
        # Derive the last component so the sum is 1 to machine precision.
        neg = max(0.0, 1.0 - pos - obj)
    return Triple(pos, obj, neg)


def scalar_to_label(score: float) -> PolarityLabel:
    if not math.isfinite(score):
        raise ValueError(f"non-finite score {score!r}")
    if score > 0:
        return PolarityLabel.POSITIVE
    if score < 0:
        return PolarityLabel.NEGATIVE
    return PolarityLabel.OBJECTIVE


def classify_value(value: PolarityValue) -> PolarityLabel:
    """Coarse class of a value: triples by argmax, scalars by sign, labels as-is."""
    if isinstance(value, Triple):
        comps = (value.pos, value.obj, value.neg)
        best = max(range(3), key=lambda i: comps[i])
        return (PolarityLabel.POSITIVE, PolarityLabel.OBJECTIVE, PolarityLabel.NEGATIVE)[best]
    if isinstance(value, Scalar):
        return scalar_to_label(value.value)
    return value.label


def scalarize(value: Optional[PolarityValue]) -> float:
    """Single signed number for a value: pos - neg, the score, or +1/0/-1."""
    if value is None:
        return 0.0
    if isinstance(value, Triple):
        return value.pos - value.neg
    if isinstance(value, Scalar):
        return value.value
    return {PolarityLabel.POSITIVE: 1.0, PolarityLabel.NEGATIVE: -1.0}.get(value.label, 0.0)


Key = tuple[str, Optional[POS]]


@dataclass
class Lexicon:
    name: str
    scheme: Scheme
    entries: dict[Key, PolarityValue] = field(default_factory=dict)
    duplicates: int = 0

    def __post_init__(self):
        self._by_surface: dict[str, list[Key]] = {}
        for key, value in self.entries.items():
            self._check(value)
            self._by_surface.setdefault(key[0], []).append(key)

    def _check(self, value: PolarityValue) -> None:
        if value.scheme is not self.scheme:
            raise LexiconError(f"{self.name}: {value.scheme.value} entry in a {self.scheme.value} lexicon")

    def add(self, surface: str, pos: Optional[POS], value: PolarityValue) -> None:
        self._check(value)
        key = (surface, pos)
        if key in self.entries:
            self.duplicates += 1
        else:
            self._by_surface.setdefault(surface, []).append(key)
        self.entries[key] = value

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def pos_tags(self) -> dict[str, POS]:
        """First tagged POS per surface; used to seed the POS hinter."""
        out: dict[str, POS] = {}
        for surface, pos in self.entries:
            if pos is not None and " " not in surface:
                out.setdefault(surface, pos)
        return out

    def lookup(self, surface: str, pos_hint: Optional[POS] = None) -> Optional[PolarityValue]:
        return lookup(self, surface, pos_hint)


def lookup(lexicon: Lexicon, surface: str, pos_hint: Optional[POS] = None) -> Optional[PolarityValue]:
    """Exact (surface, POS) match first, then any entry for the surface.

    The POS-agnostic fallback prefers an untagged entry, otherwise the entry
    that was loaded first.
    """
    hit = lexicon.entries.get((surface, pos_hint))
    if hit is not None:
        return hit
    keys = lexicon._by_surface.get(surface)
    if not keys:
        return None
    untagged = lexicon.entries.get((surface, None))
    if untagged is not None:
        return untagged
    return lexicon.entries[keys[0]]


def parse_row(fields: list[str], scheme: Scheme) -> tuple[str, Optional[POS], PolarityValue]:
    if len(fields) != 2 + scheme.n_columns:
        raise ValueError(f"expected {2 + scheme.n_columns} columns, got {len(fields)}")
    surface = " ".join(fields[0].split())
    if not surface:
        raise ValueError("empty surface")
    if surface.count(" ") > 1:
        raise ValueError("surface must be a unigram or a bigram")
    pos = POS.parse(fields[1])
    if scheme is Scheme.TRIPLE:
        try:
            p, o, n = (float(x) for x in fields[2:5])
        except ValueError:
            raise ValueError("non-numeric score") from None
        if not all(math.isfinite(v) and 0.0 <= v <= 1.0 for v in (p, o, n)):
            raise ValueError("triple components must be finite and in [0, 1]")
        value: PolarityValue = triple_from_scores(p, o, n)
    elif scheme is Scheme.SCALAR:
        try:
            s = float(fields[2])
        except ValueError:
            raise ValueError("non-numeric score") from None
        if not math.isfinite(s) or not -1.0 <= s <= 1.0:
            raise ValueError(f"scalar score {s} outside [-1, 1]")
        value = Scalar(s)
    else:
        value = Label(PolarityLabel.parse(fields[2]))
    return surface, pos, value


def load_lexicon(path, scheme: Scheme | str, name: Optional[str] = None) -> Lexicon:
    """Read a TSV lexicon. Duplicate (surface, POS) keys keep the last row."""
    scheme = Scheme(scheme) if isinstance(scheme, str) else scheme
    path = Path(path)
    lex = Lexicon(name or path.stem, scheme)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                surface, pos, value = parse_row(line.split("\t"), scheme)
            except ValueError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from None
            lex.add(surface, pos, value)
    if lex.duplicates:
        log.warning("%s: %d duplicate entries, kept last occurrence", path, lex.duplicates)
    return lex


def distribution(lexicon: Lexicon) -> tuple[int, int, int]:
    """Entry counts as (positive, objective, negative)."""
    counts = Counter(classify_value(v) for v in lexicon.entries.values())
    return (counts[PolarityLabel.POSITIVE], counts[PolarityLabel.OBJECTIVE], counts[PolarityLabel.NEGATIVE])
