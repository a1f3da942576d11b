"""Word, phrase and aspect polarity over dependency graphs.

Graph files hold one token per line with six whitespace-separated columns
``INDEX FORM LEMMA POS HEAD DEPREL``, ``# sent_id = <id>`` comments and a
blank line between sentences.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .lexicon import POS, Lexicon, PolarityValue, lookup, scalarize
from .preprocess import Sentence, Token, clean
from .features import Featurizer, Lexicons
from .scoring import unit_polarities
from .shift import Shifters


class GraphError(ValueError):
    """Malformed or invalid dependency graph."""


class AnnotationError(ValueError):
    """Span annotations that cannot be applied to a graph."""


_SENT_ID = re.compile(r"^#\s*sent_id\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class Node:
    index: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str
    concept_id: Optional[str] = None
    members: tuple[int, ...] = ()

    @property
    def pos_tag(self) -> Optional[POS]:
        tag = self.pos.upper()
        if tag == "PUNCT" or tag == "PUNC":
            return POS.OTHER
        return POS.parse(self.pos)


@dataclass
class DependencyGraph:
    nodes: list[Node]
    sentence_id: str = ""
    comments: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, index: int) -> Node:
        return self.nodes[index - 1]

    @property
    def root(self) -> Node:
        return next(n for n in self.nodes if n.head == 0)

    def children(self, index: int) -> list[int]:
        return [n.index for n in self.nodes if n.head == index]

    def depth(self, index: int) -> int:
        d = 0
        while index:
            index = self.node(index).head
            d += 1
        return d

    def validate(self) -> None:
        sid = self.sentence_id or "?"
        n = len(self.nodes)
        if n == 0:
            raise GraphError(f"sentence {sid}: empty graph")
        if [nd.index for nd in self.nodes] != list(range(1, n + 1)):
            raise GraphError(f"sentence {sid}: indices must run 1..{n}")
        roots = [nd.index for nd in self.nodes if nd.head == 0]
        if len(roots) != 1:
            raise GraphError(f"sentence {sid}: expected exactly one root, found {len(roots)}")
        for nd in self.nodes:
            if not 0 <= nd.head <= n:
                raise GraphError(f"sentence {sid}: head {nd.head} of node {nd.index} out of range")
            if nd.head == nd.index:
                raise GraphError(f"sentence {sid}: node {nd.index} is its own head (cycle)")
        for nd in self.nodes:
            seen = set()
            cur = nd.index
            while cur:
                if cur in seen:
                    raise GraphError(f"sentence {sid}: cycle through node {cur}")
                seen.add(cur)
                cur = self.node(cur).head

    def to_text(self) -> str:
        lines = list(self.comments)
        for nd in self.nodes:
            lines.append("\t".join([str(nd.index), nd.form, nd.lemma, nd.pos, str(nd.head), nd.deprel]))
        return "\n".join(lines) + "\n"


def read_dependency_graph(text: str) -> list[DependencyGraph]:
    graphs: list[DependencyGraph] = []
    block: list[str] = []

    def flush():
        if not block:
            return
        comments, nodes, sid = [], [], ""
        for line in block:
            if line.startswith("#"):
                comments.append(line)
                m = _SENT_ID.match(line)
                if m:
                    sid = m.group(1)
                continue
            cols = line.split()
            if len(cols) != 6:
                raise GraphError(f"sentence {sid or len(graphs) + 1}: expected 6 columns, got {len(cols)}: {line!r}")
            try:
                idx, head = int(cols[0]), int(cols[4])
            except ValueError:
                raise GraphError(f"sentence {sid or len(graphs) + 1}: non-integer index/head in {line!r}") from None
            nodes.append(Node(idx, cols[1], cols[2], cols[3], head, cols[5]))
        g = DependencyGraph(nodes, sid or str(len(graphs) + 1), comments)
        g.validate()
        graphs.append(g)
        block.clear()

    for raw in text.splitlines():
        if raw.strip():
            block.append(raw.rstrip())
        else:
            flush()
    flush()
    return graphs


def write_dependency_graphs(graphs: Sequence[DependencyGraph]) -> str:
    return "\n".join(g.to_text() for g in graphs)


# --- sidecars --------------------------------------------------------------

@dataclass(frozen=True)
class SpanAnnotation:
    start: int
    end: int
    concept_id: str = ""
    sent_id: str = ""

    def __len__(self) -> int:
        return self.end - self.start + 1

    def covers(self, other: "SpanAnnotation") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class AspectAnnotation:
    sent_id: str
    index: int  # 1-based token position
    surface: str = ""


def _tsv_rows(text: str, ncols: int) -> list[list[str]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != ncols:
            raise AnnotationError(f"line {lineno}: expected {ncols} tab-separated columns")
        rows.append(parts)
    return rows


def read_spans(text: str) -> dict[str, list[SpanAnnotation]]:
    out: dict[str, list[SpanAnnotation]] = {}
    for sid, start, end, cid in _tsv_rows(text, 4):
        out.setdefault(sid, []).append(SpanAnnotation(int(start), int(end), cid, sid))
    return out


def read_aspects(text: str) -> list[AspectAnnotation]:
    return [AspectAnnotation(sid, int(idx), surface) for sid, idx, surface in _tsv_rows(text, 3)]


# --- merging ---------------------------------------------------------------

def prune_spans(spans: Sequence[SpanAnnotation]) -> list[SpanAnnotation]:
    """Drop spans covered by a longer (or identical, earlier) span."""
    order = sorted(range(len(spans)), key=lambda k: (-len(spans[k]), k))
    kept: list[SpanAnnotation] = []
    for k in order:
        s = spans[k]
        if any(o.covers(s) for o in kept):
            continue
        kept.append(s)
    return sorted(kept, key=lambda s: s.start)


def merge_multiword(graph: DependencyGraph, spans: Sequence[SpanAnnotation]) -> DependencyGraph:
    """Collapse each multi-word span into one node.

    The merged node takes the head, POS and relation of the member whose own
    head lies outside the span (the one nearest the root if several do).
    Edges into the span from outside re-attach to the merged node.
    """
    n = len(graph)
    for s in spans:
        if not 1 <= s.start <= s.end <= n:
            raise AnnotationError(f"sentence {graph.sentence_id}: span {s.start}..{s.end} outside 1..{n}")
    kept = prune_spans(spans)
    for a, b in zip(kept, kept[1:]):
        if b.start <= a.end:
            raise AnnotationError(
                f"sentence {graph.sentence_id}: spans {a.start}..{a.end} and {b.start}..{b.end} overlap")
    if not kept:
        return graph

    span_of: dict[int, SpanAnnotation] = {}
    for s in kept:
        for i in range(s.start, s.end + 1):
            span_of[i] = s

    new_index: dict[int, int] = {}
    span_head: dict[SpanAnnotation, Node] = {}
    nxt = 0
    for nd in graph.nodes:
        s = span_of.get(nd.index)
        if s is None or nd.index == s.start:
            nxt += 1
        new_index[nd.index] = nxt
        if s is not None and nd.index == s.start:
            members = [graph.node(i) for i in range(s.start, s.end + 1)]
            external = [m for m in members if not s.start <= m.head <= s.end]
            span_head[s] = min(external, key=lambda m: (graph.depth(m.index), m.index))

    def remap(h: int) -> int:
        return 0 if h == 0 else new_index[h]

    nodes: list[Node] = []
    for nd in graph.nodes:
        s = span_of.get(nd.index)
        if s is None:
            nodes.append(replace(nd, index=new_index[nd.index], head=remap(nd.head),
                                 members=nd.members or (nd.index,)))
        elif nd.index == s.start:
            members = [graph.node(i) for i in range(s.start, s.end + 1)]
            h = span_head[s]
            nodes.append(Node(
                index=new_index[nd.index],
                form=" ".join(m.form for m in members),
                lemma=" ".join(m.lemma if m.lemma != "_" else m.form for m in members) if len(members) > 1 else h.lemma,
                pos=h.pos,
                head=remap(h.head),
                deprel=h.deprel,
                concept_id=s.concept_id or None,
                members=tuple(range(s.start, s.end + 1)),
            ))
    merged = DependencyGraph(nodes, graph.sentence_id, list(graph.comments))
    try:
        merged.validate()
    except GraphError as exc:
        raise AnnotationError(f"merging produced an invalid graph: {exc}") from None
    return merged


# --- phrases ---------------------------------------------------------------

@dataclass(frozen=True)
class PhraseSpan:
    members: tuple[int, ...]
    head: int

    def __post_init__(self):
        if self.head not in self.members:
            raise ValueError("phrase head must be a member")


CONTENT = (POS.NOUN, POS.ADJ)


def extract_phrases(graph: DependencyGraph) -> list[PhraseSpan]:
    """One phrase per non-root noun or adjective: the node plus the
    contiguous run of its descendants around it."""
    phrases = []
    for nd in graph.nodes:
        if nd.head == 0 or nd.pos_tag not in CONTENT:
            continue
        subtree = {nd.index}
        stack = [nd.index]
        while stack:
            for c in graph.children(stack.pop()):
                subtree.add(c)
                stack.append(c)
        lo = hi = nd.index
        while lo - 1 in subtree:
            lo -= 1
        while hi + 1 in subtree:
            hi += 1
        phrases.append(PhraseSpan(tuple(range(lo, hi + 1)), nd.index))
    return phrases


def _value_for(keys: Sequence[str], pos: Optional[POS], lexicons: Sequence[Lexicon]) -> Optional[PolarityValue]:
    for lex in lexicons:
        for key in keys:
            v = lookup(lex, key, pos)
            if v is not None:
                return v
    return None


def word_polarity(token: Token | str, lexicons: Sequence[Lexicon], pos: Optional[POS] = None) -> float:
    """First lexicon in order that lists the word decides; misses score 0."""
    if isinstance(token, Token):
        key, pos = token.normalized, token.pos_hint
    else:
        key = token
    return scalarize(_value_for([key], pos, lexicons))


def node_polarity(node: Node, lexicons: Sequence[Lexicon]) -> float:
    keys = [k for k in dict.fromkeys([node.lemma, clean(node.form), node.form]) if k and k != "_"]
    return scalarize(_value_for(keys, node.pos_tag, lexicons))


def phrase_polarity(span: PhraseSpan, graph: DependencyGraph, lexicons: Sequence[Lexicon]) -> float:
    """Mean word polarity over the phrase; unmatched words count as 0."""
    vals = [node_polarity(graph.node(i), lexicons) for i in span.members]
    return math.fsum(vals) / len(vals)


def aspect_polarity(sentence: Sentence, aspect: AspectAnnotation, lexicons: Sequence[Lexicon],
                    shifters: Optional[Shifters] = None, window: str = "following", featurizer=None) -> float:
    """Mean shifted polarity of the content words after (or before) the aspect.

    ``aspect.index`` is the 1-based position in ``sentence.tokens``.
    """
    if not 1 <= aspect.index <= len(sentence.tokens):
        raise ValueError(f"aspect index {aspect.index} outside 1..{len(sentence.tokens)}")
    if window not in ("following", "preceding"):
        raise ValueError("window must be 'following' or 'preceding'")
    if featurizer is None:
        featurizer = Featurizer(Lexicons(), shifters=shifters or Shifters.default())
    word_pos = [i for i, t in enumerate(sentence.tokens) if t.is_word]
    words = sentence.words
    scored = [featurizer.score(sentence, lex) for lex in lexicons]
    units = dict(unit_polarities(scored)) if scored else {
        i: 0.0 for i, w in enumerate(words) if not w.is_stopword}
    at = aspect.index - 1
    if window == "following":
        chosen = [k for k, ti in enumerate(word_pos) if ti > at]
    else:
        chosen = [k for k, ti in enumerate(word_pos) if ti < at]
    vals = [units[k] for k in chosen if k in units]
    if not vals:
        return 0.0
    return math.fsum(vals) / len(vals)
