"""JSONL reading/writing for topic and alignment files.

Topic record:
    {"topic_id", "kind": "document"|"summary", "text_id", "text",
     "sentences"?: [{"start", "end"}, ...]}

Alignment record:
    {"topic_id", "summary_id", "summary_span": [[s,e],...],
     "doc_id", "doc_span": [[s,e],...], "probability"?, "provenance"}

Saving always emits the canonical form (explicit sentences, fixed key
order), so save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from pathlib import Path

from .corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Sentence,
    Span,
    TextEntry,
    Topic,
    sentences_from_boundaries,
    split_sentences,
)
from .errors import IntegrityError, ParseError


def _read_records(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc
            if not isinstance(record, dict):
                raise ParseError("record is not a JSON object", str(path), lineno)
            yield lineno, record


def _require(record: dict, key: str, path: str, lineno: int):
    if key not in record:
        raise ParseError(f"missing field {key!r}", path, lineno)
    return record[key]


def load_topics(path: str | Path) -> list[Topic]:
    """Load every topic in a topic JSONL file, in first-appearance order."""
    order: list[str] = []
    entries: dict[str, dict[str, list[TextEntry]]] = {}
    for lineno, record in _read_records(path):
        topic_id = str(_require(record, "topic_id", str(path), lineno))
        kind = _require(record, "kind", str(path), lineno)
        if kind not in ("document", "summary"):
            raise ParseError(f"unknown kind {kind!r}", str(path), lineno)
        text_id = str(_require(record, "text_id", str(path), lineno))
        text = _require(record, "text", str(path), lineno)
        if not isinstance(text, str):
            raise ParseError("text must be a string", str(path), lineno)
        if "sentences" in record:
            try:
                bounds = [(int(s["start"]), int(s["end"])) for s in record["sentences"]]
            except (TypeError, KeyError) as exc:
                raise ParseError("malformed sentences field", str(path), lineno) from exc
            try:
                sentences = sentences_from_boundaries(text, bounds)
            except IntegrityError as exc:
                raise IntegrityError(f"{path}:{lineno}: {exc}") from exc
        else:
            sentences = tuple(split_sentences(text))
        if topic_id not in entries:
            order.append(topic_id)
            entries[topic_id] = {"document": [], "summary": []}
        entries[topic_id][kind].append(
            TextEntry(text_id=text_id, text=text, sentences=sentences)
        )
    return [
        Topic(
            topic_id=tid,
            documents=tuple(entries[tid]["document"]),
            summaries=tuple(entries[tid]["summary"]),
        )
        for tid in order
    ]


def load_topic(path: str | Path) -> Topic:
    """Load a topic file that must contain exactly one topic."""
    topics = load_topics(path)
    if not topics:
        raise IntegrityError(f"{path}: no topics found")
    if len(topics) > 1:
        raise IntegrityError(
            f"{path}: expected a single topic, found {len(topics)}"
        )
    return topics[0]


def save_topics(topics: Iterable[Topic], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic in topics:
            for kind, entry_list in (
                ("document", topic.documents),
                ("summary", topic.summaries),
            ):
                for entry in entry_list:
                    record = {
                        "topic_id": topic.topic_id,
                        "kind": kind,
                        "text_id": entry.text_id,
                        "text": entry.text,
                        "sentences": [
                            {"start": s.char_offset, "end": s.end}
                            for s in entry.sentences
                        ],
                    }
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _iu_from_record(
    span_ranges, text_id: str, topic: Topic | None, path: str, lineno: int
) -> InformationUnit:
    try:
        span = Span(span_ranges)
    except (IntegrityError, TypeError, ValueError) as exc:
        raise ParseError(f"bad span for {text_id!r}: {exc}", path, lineno) from exc
    if topic is None:
        return InformationUnit(span=span, parent_id=text_id)
    entry = topic.text_of(text_id)
    span.check_within(len(entry.text))
    sentence = entry.sentence_at(span.start)
    return InformationUnit.from_parent_text(
        span, text_id, entry.text, sentence.index if sentence else -1
    )


def load_alignments(
    path: str | Path, topics: Mapping[str, Topic] | None = None
) -> dict[str, AlignmentSet]:
    """Load alignment JSONL grouped per topic.

    When ``topics`` is given, IUs are enriched with surfaces and sentence
    indices and validated against the topic texts; otherwise only the raw
    spans and ids are kept, which is all the evaluation metrics need.
    """
    grouped: dict[str, list[AlignmentPair]] = {}
    order: list[str] = []
    for lineno, record in _read_records(path):
        topic_id = str(_require(record, "topic_id", str(path), lineno))
        topic = None
        if topics is not None:
            if topic_id not in topics:
                raise IntegrityError(f"{path}:{lineno}: unknown topic {topic_id!r}")
            topic = topics[topic_id]
        summary_id = str(_require(record, "summary_id", str(path), lineno))
        doc_id = str(_require(record, "doc_id", str(path), lineno))
        summary_iu = _iu_from_record(
            _require(record, "summary_span", str(path), lineno),
            summary_id, topic, str(path), lineno,
        )
        doc_iu = _iu_from_record(
            _require(record, "doc_span", str(path), lineno),
            doc_id, topic, str(path), lineno,
        )
        probability = record.get("probability")
        if probability is not None:
            probability = float(probability)
        provenance = record.get("provenance", "gold")
        try:
            pair = AlignmentPair(
                summary_iu=summary_iu,
                doc_iu=doc_iu,
                probability=probability,
                provenance=provenance,
            )
        except IntegrityError as exc:
            raise IntegrityError(f"{path}:{lineno}: {exc}") from exc
        if topic_id not in grouped:
            order.append(topic_id)
            grouped[topic_id] = []
        grouped[topic_id].append(pair)
    out = {}
    for tid in order:
        try:
            out[tid] = AlignmentSet(tid, grouped[tid])
        except IntegrityError as exc:
            raise IntegrityError(f"{path}: {exc}") from exc
        if topics is not None:
            out[tid].validate_against(topics[tid])
    return out


def alignment_record(topic_id: str, pair: AlignmentPair) -> dict:
    record = {
        "topic_id": topic_id,
        "summary_id": pair.summary_iu.parent_id,
        "summary_span": [list(r) for r in pair.summary_iu.span.ranges],
        "doc_id": pair.doc_iu.parent_id,
        "doc_span": [list(r) for r in pair.doc_iu.span.ranges],
        "provenance": pair.provenance,
    }
    if pair.probability is not None:
        record["probability"] = round(pair.probability, 6)
    return record


def save_alignments(
    alignment_sets: Iterable[AlignmentSet], path: str | Path
) -> None:
    """Write alignment sets as JSONL, topics sorted by id, pairs in set order."""
    ordered = sorted(alignment_sets, key=lambda a: a.topic_id)
    with open(path, "w", encoding="utf-8") as fh:
        for aset in ordered:
            for pair in aset.pairs:
                fh.write(
                    json.dumps(alignment_record(aset.topic_id, pair), ensure_ascii=False)
                    + "\n"
                )
