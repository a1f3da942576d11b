"""Look up every n-gram of a sentence in one lexicon and apply the shifters.

Shifts are applied in a fixed order: elongation, then intensification, then
negation. An n-gram takes its shift marks from its last word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lexicon import Label, Lexicon, PolarityValue, lookup, scalarize
from .preprocess import NGram, Token, make_ngrams
from .shift import ShiftAnnotation, ShiftConstants, Shifters, annotate_shift_scopes, apply_elongation, \
    intensify, is_polar, negate


@dataclass(frozen=True)
class ScoringOptions:
    literal_reducer: bool = False
    elongation_neighbour: str = "preceding"  # or "following"
    elongation_fallback: bool = True

    def __post_init__(self):
        if self.elongation_neighbour not in ("preceding", "following"):
            raise ValueError("elongation_neighbour must be 'preceding' or 'following'")


@dataclass
class ScoredSentence:
    words: list[Token]
    grams: list[NGram]
    values: list[Optional[PolarityValue]]  # shifted value per gram, None when unmatched

    def matched(self) -> list[PolarityValue]:
        return [v for v in self.values if v is not None]

    def units(self) -> list[tuple[int, Optional[PolarityValue]]]:
        """One polarity unit per content word.

        A word's own unigram match wins; otherwise a matched bigram ending on
        the word supplies the value.
        """
        uni: dict[int, Optional[PolarityValue]] = {}
        bi: dict[int, PolarityValue] = {}
        for g, v in zip(self.grams, self.values):
            if g.start == g.end:
                uni[g.start] = v
            elif v is not None:
                bi[g.end] = v
        return [(i, uni[i] if uni[i] is not None else bi.get(i)) for i in sorted(uni)]


def lookup_with_fallback(lexicon: Lexicon, token: Token, key: str, pos, fallback: bool) -> Optional[PolarityValue]:
    hit = lookup(lexicon, key, pos)
    if hit is not None or not (fallback and token.elongated):
        return hit
    # elongated words: retry each single-letter deletion, first match wins
    for i in range(len(key)):
        cand = key[:i] + key[i + 1:]
        if cand:
            hit = lookup(lexicon, cand, pos)
            if hit is not None:
                return hit
    return None


def score_sentence(words: list[Token], lexicon: Lexicon, shifters: Shifters,
                   constants: ShiftConstants = ShiftConstants(),
                   options: ScoringOptions = ScoringOptions(),
                   annotations: Optional[list[ShiftAnnotation]] = None) -> ScoredSentence:
    if annotations is None:
        annotations = annotate_shift_scopes(words, shifters)
    grams = make_ngrams(words)
    values: list[Optional[PolarityValue]] = []
    for g in grams:
        tok = words[g.end]
        fallback = options.elongation_fallback and g.start == g.end
        values.append(lookup_with_fallback(lexicon, tok, g.key, g.pos, fallback))

    # 1. elongation
    unigram_at = {g.start: k for k, g in enumerate(grams) if g.start == g.end}
    step = -1 if options.elongation_neighbour == "preceding" else 1
    doubled: dict[int, PolarityValue] = {}
    for k, g in enumerate(grams):
        tok = words[g.end]
        if not tok.elongated:
            continue
        is_int = g.start == g.end and (tok.cleaned in shifters.intensifiers or tok.normalized in shifters.intensifiers)
        neighbour = None
        nk = unigram_at.get(g.end + step)
        if is_int and nk is not None:
            neighbour = (words[g.end + step], values[nk])
        new, adj = apply_elongation(values[k], tok, neighbour, constants, intensifier=is_int)
        values[k] = new
        if adj is not None:
            doubled[nk] = adj
    for nk, v in doubled.items():
        values[nk] = v

    # 2. intensification, 3. negation
    for k, g in enumerate(grams):
        v = values[k]
        if v is None:
            continue
        ann = annotations[g.end]
        if ann.intensifier_kind is not None and not isinstance(v, Label):
            v = intensify(v, ann.intensifier_kind, constants, literal_reducer=options.literal_reducer)
        if ann.negated:
            v = negate(v, constants)
        values[k] = v
    return ScoredSentence(words, grams, values)


def unit_polarities(scored: list[ScoredSentence]) -> list[tuple[int, float]]:
    """Scalarized polarity per content word, first lexicon in order that matched.

    ``scored`` holds the same sentence scored against each lexicon in the
    configured order.
    """
    if not scored:
        return []
    per_lex = [dict(s.units()) for s in scored]
    out = []
    for i in sorted(per_lex[0]):
        val = None
        for units in per_lex:
            if units.get(i) is not None:
                val = units[i]
                break
        out.append((i, scalarize(val)))
    return out


__all__ = ["ScoringOptions", "ScoredSentence", "score_sentence", "unit_polarities", "is_polar"]
