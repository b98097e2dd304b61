"""Domain types for topics, spans, information units, and alignments.

Character indexing convention: all offsets count Unicode scalar values
(Python string indices), never bytes. All types are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import IntegrityError

PROVENANCES = (
    "gold",
    "rouge_iu",
    "sim_ensemble",
    "supervised",
    "pyramid_transitive",
    "annotated",
)


@dataclass(frozen=True)
class Span:
    """A possibly discontiguous set of [start, end) character ranges.

    Construction normalizes: ranges are sorted, merged when overlapping or
    adjacent, and each must satisfy start < end. Normalization is idempotent.
    """

    ranges: tuple[tuple[int, int], ...]

    def __init__(self, ranges):
        normalized = _normalize_ranges(ranges)
        object.__setattr__(self, "ranges", normalized)

    def __len__(self) -> int:
        return sum(e - s for s, e in self.ranges)

    @property
    def start(self) -> int:
        return self.ranges[0][0]

    @property
    def end(self) -> int:
        return self.ranges[-1][1]

    def indices(self) -> set[int]:
        """Materialize the covered character indices (small spans only)."""
        out: set[int] = set()
        for s, e in self.ranges:
            out.update(range(s, e))
        return out

    def check_within(self, length: int) -> None:
        if self.start < 0 or self.end > length:
            raise IntegrityError(
                f"span {list(map(list, self.ranges))} exceeds text of length {length}"
            )


def _normalize_ranges(ranges) -> tuple[tuple[int, int], ...]:
    items = [(int(s), int(e)) for s, e in ranges]
    if not items:
        raise IntegrityError("span must contain at least one range")
    for s, e in items:
        if s < 0 or s >= e:
            raise IntegrityError(f"invalid span range [{s}, {e})")
    items.sort()
    merged = [items[0]]
    for s, e in items[1:]:
        ps, pe = merged[-1]
        if s <= pe:  # overlapping or adjacent ranges collapse
            merged[-1] = (ps, max(pe, e))
        else:
            merged.append((s, e))
    return tuple(merged)


def span_text(span: Span, parent_text: str) -> str:
    """Extract a span's text: ranges in order, joined by a single space."""
    span.check_within(len(parent_text))
    return " ".join(parent_text[s:e] for s, e in span.ranges)


def span_text_with_map(span: Span, parent_text: str) -> tuple[str, list[int | None]]:
    """Like span_text, also returning surface-index -> parent-index mapping.

    Join spaces map to None. Needed to project sub-phrases of a surface
    string back onto parent-text offsets.
    """
    span.check_within(len(parent_text))
    chars: list[str] = []
    mapping: list[int | None] = []
    for i, (s, e) in enumerate(span.ranges):
        if i > 0:
            chars.append(" ")
            mapping.append(None)
        chars.extend(parent_text[s:e])
        mapping.extend(range(s, e))
    return "".join(chars), mapping


@dataclass(frozen=True)
class Sentence:
    """A sentence slice of a parent text; the slice reconstructs exactly."""

    text: str
    char_offset: int
    index: int

    @property
    def end(self) -> int:
        return self.char_offset + len(self.text)


@dataclass(frozen=True)
class InformationUnit:
    """A proposition-level span within one parent text.

    ``surface`` caches the extracted text (ranges joined by single spaces);
    it is None when the parent text was not available at construction time.
    ``sentence_index`` is -1 when unknown.
    """

    span: Span
    parent_id: str
    sentence_index: int = -1
    surface: str | None = None

    @classmethod
    def from_parent_text(
        cls, span: Span, parent_id: str, parent_text: str, sentence_index: int = -1
    ) -> "InformationUnit":
        return cls(
            span=span,
            parent_id=parent_id,
            sentence_index=sentence_index,
            surface=span_text(span, parent_text),
        )

    @property
    def key(self) -> tuple[str, tuple[tuple[int, int], ...]]:
        """Identity for dedup purposes: parent plus exact ranges."""
        return (self.parent_id, self.span.ranges)


@dataclass(frozen=True)
class TextEntry:
    """One document or summary of a topic."""

    text_id: str
    text: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        for s in self.sentences:
            if self.text[s.char_offset : s.end] != s.text:
                raise IntegrityError(
                    f"sentence {s.index} of {self.text_id!r} does not match its offsets"
                )

    def sentence_at(self, char_index: int) -> Sentence | None:
        for s in self.sentences:
            if s.char_offset <= char_index < s.end:
                return s
        return None


@dataclass(frozen=True)
class Topic:
    """One alignment topic: a document set plus its reference summary(ies)."""

    topic_id: str
    documents: tuple[TextEntry, ...]
    summaries: tuple[TextEntry, ...]

    def __post_init__(self):
        if not self.documents:
            raise IntegrityError(f"topic {self.topic_id!r} has no documents")
        if not self.summaries:
            raise IntegrityError(f"topic {self.topic_id!r} has no summaries")
        ids = [t.text_id for t in self.documents] + [t.text_id for t in self.summaries]
        if len(set(ids)) != len(ids):
            raise IntegrityError(f"duplicate text ids in topic {self.topic_id!r}")

    def document(self, text_id: str) -> TextEntry:
        for d in self.documents:
            if d.text_id == text_id:
                return d
        raise IntegrityError(f"unknown document {text_id!r} in topic {self.topic_id!r}")

    def summary(self, text_id: str) -> TextEntry:
        for s in self.summaries:
            if s.text_id == text_id:
                return s
        raise IntegrityError(f"unknown summary {text_id!r} in topic {self.topic_id!r}")

    def text_of(self, text_id: str) -> TextEntry:
        for t in self.documents + self.summaries:
            if t.text_id == text_id:
                return t
        raise IntegrityError(f"unknown text {text_id!r} in topic {self.topic_id!r}")


@dataclass(frozen=True)
class AlignmentPair:
    """A (summary-side IU, document-side IU) link, optionally with a probability."""

    summary_iu: InformationUnit
    doc_iu: InformationUnit
    probability: float | None = None
    provenance: str = "gold"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise IntegrityError(f"unknown provenance {self.provenance!r}")
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise IntegrityError(f"probability {self.probability} outside [0, 1]")

    @property
    def key(self):
        return (self.summary_iu.key, self.doc_iu.key)


@dataclass(frozen=True)
class AlignmentSet:
    """All alignment pairs of one topic. Exact duplicate pairs are rejected."""

    topic_id: str
    pairs: tuple[AlignmentPair, ...]

    def __init__(self, topic_id: str, pairs):
        pairs = tuple(pairs)
        seen = set()
        for p in pairs:
            if p.key in seen:
                raise IntegrityError(
                    f"duplicate alignment pair in topic {topic_id!r}: {p.key}"
                )
            seen.add(p.key)
        object.__setattr__(self, "topic_id", topic_id)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def validate_against(self, topic: Topic) -> None:
        """Check sides reference the right kind of text and spans are in bounds."""
        if topic.topic_id != self.topic_id:
            raise IntegrityError(
                f"alignment set {self.topic_id!r} checked against topic {topic.topic_id!r}"
            )
        summary_ids = {s.text_id for s in topic.summaries}
        doc_ids = {d.text_id for d in topic.documents}
        for p in self.pairs:
            if p.summary_iu.parent_id not in summary_ids:
                raise IntegrityError(
                    f"summary-side IU parent {p.summary_iu.parent_id!r} is not a summary"
                )
            if p.doc_iu.parent_id not in doc_ids:
                raise IntegrityError(
                    f"document-side IU parent {p.doc_iu.parent_id!r} is not a document"
                )
            p.summary_iu.span.check_within(len(topic.summary(p.summary_iu.parent_id).text))
            p.doc_iu.span.check_within(len(topic.document(p.doc_iu.parent_id).text))


# ---------------------------------------------------------------------------
# Sentence splitting
# ---------------------------------------------------------------------------

# Deterministic rule-based splitter: a run of terminal punctuation (plus any
# closing quotes/brackets) ends a sentence unless the preceding token is a
# known abbreviation or a dotted acronym, and only when followed by the end
# of text or by something that is not a lowercase letter. Blank lines are
# hard boundaries. Pre-split inputs bypass this entirely.

_ABBREVIATIONS = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "vs.", "etc.",
    "e.g.", "i.e.", "inc.", "ltd.", "co.", "corp.", "gov.", "sen.", "rep.",
    "gen.", "col.", "lt.", "sgt.", "capt.", "maj.", "rev.", "hon.", "jan.",
    "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "no.", "nos.", "dept.", "approx.", "est.", "fig.", "al.",
    "mt.", "ave.", "blvd.", "rd.",
}

_DOTTED_ACRONYM = re.compile(r"(?:\w\.){2,}$")
_BOUNDARY_RE = re.compile(r"[.!?]+[\"'”’)\]]*")
_PARAGRAPH_RE = re.compile(r"\n[ \t]*\n")
_OPENERS = "\"'“‘(["


def _is_abbreviation(token: str) -> bool:
    token = token.lower()
    return token in _ABBREVIATIONS or bool(_DOTTED_ACRONYM.search(token))


def _boundary_confirmed(text: str, match: re.Match) -> bool:
    if "." in match.group():
        head = text[: match.end()].rstrip("\"'”’)]")
        token_match = re.search(r"\S+$", head)
        if token_match and _is_abbreviation(token_match.group()):
            return False
    j = match.end()
    while j < len(text) and text[j].isspace():
        j += 1
    if j == len(text):
        return True
    if j == match.end():  # punctuation glued to the next word: not a boundary
        return False
    nxt = text[j]
    return not nxt.islower() or nxt in _OPENERS


def _split_segment(text: str, seg_start: int, seg_end: int) -> list[tuple[int, int]]:
    bounds: list[tuple[int, int]] = []
    cursor = seg_start
    for m in _BOUNDARY_RE.finditer(text, seg_start, seg_end):
        if not _boundary_confirmed(text[:seg_end], m):
            continue
        bounds.append((cursor, m.end()))
        cursor = m.end()
    if cursor < seg_end:
        bounds.append((cursor, seg_end))
    out = []
    for s, e in bounds:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s < e:
            out.append((s, e))
    return out


def split_sentences(text: str) -> list[Sentence]:
    """Split text into sentences with exact character offsets.

    The slice parent[s.char_offset : s.char_offset + len(s.text)] always
    equals s.text, and the gaps between consecutive sentences are whitespace.
    """
    if not text.strip():
        return []
    spans: list[tuple[int, int]] = []
    seg_start = 0
    for pm in _PARAGRAPH_RE.finditer(text):
        spans.extend(_split_segment(text, seg_start, pm.start()))
        seg_start = pm.end()
    spans.extend(_split_segment(text, seg_start, len(text)))
    return [
        Sentence(text=text[s:e], char_offset=s, index=i)
        for i, (s, e) in enumerate(spans)
    ]


def sentences_from_boundaries(text: str, boundaries: list[tuple[int, int]]) -> tuple[Sentence, ...]:
    """Build sentences from explicit [start, end) boundaries (pre-split inputs)."""
    sentences = []
    prev_end = 0
    for i, (s, e) in enumerate(boundaries):
        if not (0 <= s < e <= len(text)):
            raise IntegrityError(f"sentence boundary [{s}, {e}) out of bounds")
        if s < prev_end:
            raise IntegrityError(f"sentence boundary [{s}, {e}) overlaps its predecessor")
        prev_end = e
        sentences.append(Sentence(text=text[s:e], char_offset=s, index=i))
    return tuple(sentences)
