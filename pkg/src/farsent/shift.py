"""Polarity shifters: negation, intensification and elongation.

All operations take and return immutable polarity values. Which words count
as positive or negative depends on the scheme: triples compare pos with neg
(ties are not polar), scalars use the sign, labels use the label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .lexicon import POS, Label, PolarityLabel, PolarityValue, Scalar, Triple
from .preprocess import Sentence, Token, _read_pairs, data_path, join_verb_prefix


class SchemeError(TypeError):
    """An operation was applied to a scheme that does not support it."""


class IntensifierKind(Enum):
    ADDITIVE = "add"
    REDUCER = "red"


class Scope(Enum):
    SENTENCE_WIDE = "sentence"
    LOCAL = "local"


@dataclass(frozen=True)
class ShiftConstants:
    const1: float = 0.3  # triple negation
    const2: float = 0.2  # scalar negation
    const3: float = 0.25  # triple intensification
    const4: float = 0.15  # scalar intensification
    elongation_delta: float = 0.2

    def __post_init__(self):
        for name, v in vars(self).items():
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name}={v} must lie in (0, 1)")


@dataclass(frozen=True)
class ShiftAnnotation:
    negated: bool = False
    intensifier_kind: Optional[IntensifierKind] = None
    scope: Optional[Scope] = None


EMPTY = ShiftAnnotation()


@dataclass
class Shifters:
    """Negator surfaces and intensifier surfaces with their kind.

    Multi-word entries are matched as consecutive tokens.
    """

    negators: frozenset = frozenset()
    intensifiers: dict[str, IntensifierKind] = field(default_factory=dict)
    window: int = 1

    def __post_init__(self):
        overlap = set(self.negators) & set(self.intensifiers)
        if overlap:
            raise ValueError(f"negators and intensifiers overlap: {sorted(overlap)}")

    @classmethod
    def load(cls, path, window: int = 1) -> "Shifters":
        negs, ints = set(), {}
        for surface, kind in _read_pairs(path):
            surface = " ".join(join_verb_prefix(surface.split()))
            if kind == "neg":
                negs.add(surface)
            elif kind in ("add", "red"):
                ints[surface] = IntensifierKind(kind)
            else:
                raise ValueError(f"{path}: unknown shifter kind {kind!r}")
        return cls(frozenset(negs), ints, window)

    @classmethod
    def default(cls) -> "Shifters":
        return cls.load(data_path("shifters.tsv"))

    def surfaces(self) -> set[str]:
        words = set()
        for s in list(self.negators) + list(self.intensifiers):
            words.update(s.split())
        return words


def _match_spans(words: list[Token], entries: Iterable[str]) -> list[tuple[int, int, str]]:
    """(start, end_inclusive, entry) for every occurrence of a (multi-word) entry."""
    found = []
    forms = [(w.cleaned or w.surface) for w in words]
    for entry in entries:
        parts = entry.split()
        k = len(parts)
        for i in range(len(forms) - k + 1):
            if forms[i:i + k] == parts:
                found.append((i, i + k - 1, entry))
    found.sort()
    return found


def annotate_shift_scopes(sentence: Sentence | list[Token], shifters: Shifters) -> list[ShiftAnnotation]:
    """Per-word negation and intensification marks.

    A negator that is itself a verb, or sits within ``window`` tokens of a
    verb, negates the whole sentence. Otherwise it negates the nearest
    adjacent noun or adjective (following word first). An intensifier marks
    the adjacent adjective, following word first; when two intensifiers reach
    the same adjective the earlier one wins.
    """
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    n = len(words)
    negated = [False] * n
    scope: list[Optional[Scope]] = [None] * n
    kinds: list[Optional[IntensifierKind]] = [None] * n
    w = shifters.window
    sentence_wide = False

    for start, end, _ in _match_spans(words, shifters.negators):
        members = range(start, end + 1)
        near = [j for j in range(max(0, start - w), min(n, end + w + 1))]
        if any(words[j].pos_hint is POS.VERB for j in near):
            sentence_wide = True
            continue
        candidates = [j for j in range(end + 1, min(n, end + w + 1))]
        candidates += [j for j in range(start - 1, max(-1, start - w - 1), -1)]
        for j in candidates:
            if j not in members and words[j].pos_hint in (POS.ADJ, POS.NOUN):
                negated[j] = True
                scope[j] = Scope.LOCAL
                break

    for start, end, entry in _match_spans(words, shifters.intensifiers):
        candidates = [j for j in range(end + 1, min(n, end + w + 1))]
        candidates += [j for j in range(start - 1, max(-1, start - w - 1), -1)]
        for j in candidates:
            if words[j].pos_hint is POS.ADJ:
                if kinds[j] is None:  # first intensifier in text order keeps the adjective
                    kinds[j] = shifters.intensifiers[entry]
                break

    if sentence_wide:
        negated = [True] * n
        scope = [Scope.SENTENCE_WIDE] * n
    return [
        ShiftAnnotation(negated[i], kinds[i], scope[i]) if (negated[i] or kinds[i]) else EMPTY
        for i in range(n)
    ]


# --- value algebra ---------------------------------------------------------

def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _clamp_unit(x: float) -> float:
    return min(1.0, max(-1.0, x))


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def is_polar(value: Optional[PolarityValue]) -> bool:
    if value is None:
        return False
    if isinstance(value, Triple):
        return value.pos != value.neg
    if isinstance(value, Scalar):
        return value.value != 0
    return value.label is not PolarityLabel.OBJECTIVE


def _move_triple(t: Triple, toward_pos: bool, amount: float) -> Triple:
    d = amount if toward_pos else -amount
    return Triple(_clamp01(t.pos + d), t.obj, _clamp01(t.neg - d))


def negate(value: PolarityValue, c: ShiftConstants = ShiftConstants()) -> PolarityValue:
    if isinstance(value, Triple):
        if value.pos > value.neg:
            return _move_triple(value, False, c.const1)
        if value.neg > value.pos:
            return _move_triple(value, True, c.const1)
        return value
    if isinstance(value, Scalar):
        s = value.value
        # no zero clipping: negation may cross sign
        return Scalar(s - c.const2 * _sign(s))
    if value.label is PolarityLabel.POSITIVE:
        return Label(PolarityLabel.NEGATIVE)
    if value.label is PolarityLabel.NEGATIVE:
        return Label(PolarityLabel.OBJECTIVE)
    return value


def intensify(value: PolarityValue, kind: IntensifierKind, c: ShiftConstants = ShiftConstants(),
              literal_reducer: bool = False) -> PolarityValue:
    """Additive moves a value away from neutral, a reducer toward it.

    With ``literal_reducer`` a negative scalar under a reducer is decreased
    by const4, reproducing the algorithm exactly as printed.
    """
    additive = kind is IntensifierKind.ADDITIVE
    if isinstance(value, Triple):
        if value.pos > value.neg:
            return _move_triple(value, additive, c.const3)
        if value.neg > value.pos:
            return _move_triple(value, not additive, c.const3)
        return value
    if isinstance(value, Scalar):
        s = value.value
        sg = _sign(s)
        if additive:
            return Scalar(_clamp_unit(s + c.const4 * sg))
        if literal_reducer and s < 0:
            return Scalar(_clamp_unit(s - c.const4))
        if s > 0:
            return Scalar(max(0.0, s - c.const4))
        if s < 0:
            return Scalar(min(0.0, s + c.const4))
        return value
    raise SchemeError("labels carry no magnitude and cannot be intensified")


def emphasize(value: PolarityValue, delta: float) -> PolarityValue:
    """Move a polar value away from neutral by ``delta``."""
    if isinstance(value, Triple):
        if value.pos == value.neg:
            return value
        return _move_triple(value, value.pos > value.neg, delta)
    if isinstance(value, Scalar):
        return Scalar(_clamp_unit(value.value + delta * _sign(value.value)))
    return value


def double(value: PolarityValue) -> PolarityValue:
    """Double a value's polarity: scalar x2, triple pos/neg gap x2 about its midpoint."""
    if isinstance(value, Triple):
        mid = (value.pos + value.neg) / 2
        gap = value.pos - value.neg
        return Triple(_clamp01(mid + gap), value.obj, _clamp01(mid - gap))
    if isinstance(value, Scalar):
        return Scalar(_clamp_unit(2 * value.value))
    return value


def apply_elongation(value: Optional[PolarityValue], token: Token,
                     preceding: Optional[tuple[Token, Optional[PolarityValue]]] = None,
                     c: ShiftConstants = ShiftConstants(), *, intensifier: bool = False,
                     ) -> tuple[Optional[PolarityValue], Optional[PolarityValue]]:
    """Adjust polarity for an elongated token.

    Returns ``(value_for_token, value_for_neighbour)``. A polar token moves
    away from neutral by ``elongation_delta``. A non-polar elongated
    intensifier doubles its neighbour's polarity when the neighbour is polar;
    the second element is ``None`` when the neighbour is unchanged.
    """
    if not token.elongated:
        return value, None
    if is_polar(value):
        return emphasize(value, c.elongation_delta), None
    if intensifier and preceding is not None:
        _, prev_value = preceding
        if is_polar(prev_value):
            return value, double(prev_value)
    return value, None
