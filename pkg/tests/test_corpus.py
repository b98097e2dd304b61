import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanalign.corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Span,
    TextEntry,
    Topic,
    span_text,
    span_text_with_map,
    split_sentences,
)
from spanalign.corpus_io import load_alignments, load_topic, load_topics, save_alignments, save_topics
from spanalign.errors import IntegrityError, ParseError

from .conftest import make_entry, make_topic


# ---------------------------------------------------------------------------
# Span
# ---------------------------------------------------------------------------

ranges_strategy = st.lists(
    st.tuples(st.integers(0, 180), st.integers(1, 20)).map(lambda t: (t[0], t[0] + t[1])),
    min_size=1,
    max_size=5,
)


@given(ranges_strategy)
@settings(max_examples=200, derandomize=True)
def test_span_normalization_properties(ranges):
    span = Span(ranges)
    # sorted, disjoint, non-adjacent
    for (s1, e1), (s2, e2) in zip(span.ranges, span.ranges[1:]):
        assert e1 < s2
    # idempotent
    assert Span(span.ranges).ranges == span.ranges
    # same covered index set as the raw input
    expected = set()
    for s, e in ranges:
        expected.update(range(s, e))
    assert span.indices() == expected


def test_span_merges_adjacent_and_overlapping():
    assert Span([(0, 3), (3, 5)]).ranges == ((0, 5),)
    assert Span([(0, 4), (2, 6)]).ranges == ((0, 6),)
    assert Span([(5, 7), (0, 2)]).ranges == ((0, 2), (5, 7))


def test_span_rejects_bad_ranges():
    with pytest.raises(IntegrityError):
        Span([])
    with pytest.raises(IntegrityError):
        Span([(3, 3)])
    with pytest.raises(IntegrityError):
        Span([(-1, 2)])


def test_span_text_basic():
    assert span_text(Span([(0, 5)]), "Hello world") == "Hello"
    assert span_text(Span([(0, 2), (6, 11)]), "Hello world") == "He world"


def test_span_text_out_of_bounds():
    with pytest.raises(IntegrityError):
        span_text(Span([(0, 20)]), "short")


def test_span_text_random_against_char_collection_oracle():
    rng = random.Random(7)
    alphabet = "abcdefghij KLMNOP."
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(10, 60)))
        n_ranges = rng.randint(1, 3)
        ranges = []
        for _ in range(n_ranges):
            start = rng.randrange(0, len(text) - 1)
            end = rng.randrange(start + 1, len(text) + 1)
            ranges.append((start, end))
        span = Span(ranges)
        # oracle: collect characters index by index, inserting a joiner
        # between discontiguous stretches
        pieces = []
        for s, e in span.ranges:
            pieces.append("".join(text[i] for i in range(s, e)))
        assert span_text(span, text) == " ".join(pieces)


def test_span_text_with_map_round_trip():
    text = "Hello world again"
    span = Span([(0, 5), (12, 17)])
    surface, mapping = span_text_with_map(span, text)
    assert surface == "Hello again"
    rebuilt = [text[i] if i is not None else " " for i in mapping]
    assert "".join(rebuilt) == surface


# ---------------------------------------------------------------------------
# Sentence splitting
# ---------------------------------------------------------------------------


def test_split_single_sentence():
    sents = split_sentences("Hello world.")
    assert len(sents) == 1
    assert sents[0].text == "Hello world."


def test_split_two_sentences_offsets():
    sents = split_sentences("He said hi. She left.")
    assert [(s.text, s.char_offset) for s in sents] == [
        ("He said hi.", 0),
        ("She left.", 12),
    ]


def test_split_abbreviation_not_boundary():
    sents = split_sentences("U.S. rates rose. Markets fell.")
    assert [s.text for s in sents] == ["U.S. rates rose.", "Markets fell."]


def test_split_title_abbreviation():
    sents = split_sentences("Dr. Smith arrived. He waved.")
    assert [s.text for s in sents] == ["Dr. Smith arrived.", "He waved."]


def test_split_smallest_case():
    sents = split_sentences("A. B.")
    assert [(s.text, s.char_offset) for s in sents] == [("A.", 0), ("B.", 3)]


def test_split_quotes_after_terminal():
    sents = split_sentences('He said "stop." She left.')
    assert [s.text for s in sents] == ['He said "stop."', "She left."]


def test_split_blank_line_is_hard_boundary():
    sents = split_sentences("one headline\n\nThe story began here.")
    assert [s.text for s in sents] == ["one headline", "The story began here."]


def test_split_empty_and_whitespace():
    assert split_sentences("") == []
    assert split_sentences("  \n\t ") == []


@given(st.text(alphabet=st.characters(codec="utf-8"), max_size=300))
@settings(max_examples=200, derandomize=True)
def test_split_offsets_reconstruct_slices(text):
    sentences = split_sentences(text)
    prev_end = 0
    for s in sentences:
        assert text[s.char_offset : s.char_offset + len(s.text)] == s.text
        assert s.char_offset >= prev_end
        prev_end = s.char_offset + len(s.text)
    # nothing but whitespace may be dropped between sentences
    covered = set()
    for s in sentences:
        covered.update(range(s.char_offset, s.char_offset + len(s.text)))
    for i, ch in enumerate(text):
        if not ch.isspace():
            assert i in covered


# ---------------------------------------------------------------------------
# Topic I/O
# ---------------------------------------------------------------------------


def test_load_topic_smallest(tmp_path):
    path = tmp_path / "topic.jsonl"
    records = [
        {"topic_id": "t1", "kind": "document", "text_id": "d1", "text": "A. B."},
        {"topic_id": "t1", "kind": "summary", "text_id": "s1", "text": "A."},
    ]
    path.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
    topic = load_topic(path)
    doc = topic.document("d1")
    assert [(s.text, s.char_offset) for s in doc.sentences] == [("A.", 0), ("B.", 3)]


def test_topic_requires_documents():
    with pytest.raises(IntegrityError):
        Topic(topic_id="t", documents=(), summaries=(make_entry("s", "Hi."),))


def test_topic_unique_ids():
    entry = make_entry("x", "Hi.")
    with pytest.raises(IntegrityError):
        Topic(topic_id="t", documents=(entry,), summaries=(entry,))


def test_load_topics_malformed_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"topic_id": "t"}\nnot json\n', encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_topics(path)
    assert err.value.line == 1  # first record is missing fields


def test_load_topics_invalid_json_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    good = {"topic_id": "t", "kind": "document", "text_id": "d", "text": "Hi."}
    path.write_text(json.dumps(good) + "\n{broken\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_topics(path)
    assert err.value.line == 2


def test_presplit_sentences_offset_mismatch(tmp_path):
    path = tmp_path / "topic.jsonl"
    record = {
        "topic_id": "t1",
        "kind": "document",
        "text_id": "d1",
        "text": "Hello.",
        "sentences": [{"start": 0, "end": 99}],
    }
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(IntegrityError):
        load_topics(path)


def test_topic_round_trip_identity(tmp_path):
    topic = make_topic(
        documents={"d1": "John ate an apple. Mary drank tea.", "d2": "Rain fell."},
        summaries={"s1": "John ate an apple."},
    )
    path = tmp_path / "topic.jsonl"
    save_topics([topic], path)
    loaded = load_topic(path)
    assert loaded == topic
    # canonical files are byte-stable across save/load/save
    path2 = tmp_path / "topic2.jsonl"
    save_topics([loaded], path2)
    assert path.read_bytes() == path2.read_bytes()


def test_unicode_offsets_slicing_oracle(tmp_path):
    rng = random.Random(11)
    # mixed-width characters: ASCII, accents, CJK, emoji
    alphabet = "ab éü世界\U0001f600."
    for trial in range(20):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(5, 60)))
        path = tmp_path / f"u{trial}.jsonl"
        records = [
            {"topic_id": "t", "kind": "document", "text_id": "d", "text": text},
            {"topic_id": "t", "kind": "summary", "text_id": "s", "text": "Hi."},
        ]
        path.write_text(
            "\n".join(json.dumps(r, ensure_ascii=False) for r in records), encoding="utf-8"
        )
        topic = load_topic(path)
        for sent in topic.document("d").sentences:
            assert text[sent.char_offset : sent.char_offset + len(sent.text)] == sent.text


def test_text_entry_rejects_bad_sentence_offsets():
    from spanalign.corpus import Sentence

    with pytest.raises(IntegrityError):
        TextEntry(
            text_id="d",
            text="Hello.",
            sentences=(Sentence(text="Bye.", char_offset=0, index=0),),
        )


# ---------------------------------------------------------------------------
# Alignment I/O
# ---------------------------------------------------------------------------


def _sample_alignment_set():
    topic = make_topic()
    summary = topic.summaries[0]
    doc = topic.documents[0]
    pair = AlignmentPair(
        summary_iu=InformationUnit.from_parent_text(Span([(0, 17)]), "sum1", summary.text, 0),
        doc_iu=InformationUnit.from_parent_text(Span([(0, 17)]), "doc1", doc.text, 0),
        probability=0.75,
        provenance="gold",
    )
    return topic, AlignmentSet("t1", [pair])


def test_alignment_round_trip(tmp_path):
    topic, aset = _sample_alignment_set()
    path = tmp_path / "align.jsonl"
    save_alignments([aset], path)
    loaded = load_alignments(path, {"t1": topic})
    assert loaded["t1"] == aset
    path2 = tmp_path / "align2.jsonl"
    save_alignments([loaded["t1"]], path2)
    assert path.read_bytes() == path2.read_bytes()


def test_alignment_load_without_topics(tmp_path):
    _, aset = _sample_alignment_set()
    path = tmp_path / "align.jsonl"
    save_alignments([aset], path)
    loaded = load_alignments(path)
    pair = loaded["t1"].pairs[0]
    assert pair.summary_iu.surface is None
    assert pair.summary_iu.span.ranges == ((0, 17),)


def test_alignment_duplicate_pairs_rejected():
    topic, aset = _sample_alignment_set()
    with pytest.raises(IntegrityError):
        AlignmentSet("t1", list(aset.pairs) * 2)


def test_alignment_validation_catches_swapped_sides():
    topic, aset = _sample_alignment_set()
    pair = aset.pairs[0]
    swapped = AlignmentSet(
        "t1",
        [AlignmentPair(summary_iu=pair.doc_iu, doc_iu=pair.summary_iu, provenance="gold")],
    )
    with pytest.raises(IntegrityError):
        swapped.validate_against(topic)


def test_alignment_bad_probability():
    topic, aset = _sample_alignment_set()
    pair = aset.pairs[0]
    with pytest.raises(IntegrityError):
        AlignmentPair(summary_iu=pair.summary_iu, doc_iu=pair.doc_iu, probability=1.5)


def test_alignment_unknown_provenance():
    topic, aset = _sample_alignment_set()
    pair = aset.pairs[0]
    with pytest.raises(IntegrityError):
        AlignmentPair(summary_iu=pair.summary_iu, doc_iu=pair.doc_iu, provenance="wild")


def test_information_unit_surface_cache():
    text = "Hello world"
    iu = InformationUnit.from_parent_text(Span([(0, 2), (6, 11)]), "d", text, 0)
    assert iu.surface == "He world"
