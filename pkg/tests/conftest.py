"""Shared fixtures: topic builders, random alignment generators, mock scorers."""

from __future__ import annotations

import random
import string

import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        if report.skipped:
            outcome = "SKIP (data not supplied)"
        else:
            outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {outcome}", flush=True)
    elif report.when == "setup" and report.skipped:
        print(f"\nACCEPTANCE {name}: SKIP ({report.longrepr[2]})", flush=True)

from spanalign.corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Span,
    TextEntry,
    Topic,
    split_sentences,
)
from spanalign.tokenize import tokenize


def make_entry(text_id: str, text: str) -> TextEntry:
    return TextEntry(text_id=text_id, text=text, sentences=tuple(split_sentences(text)))


def make_topic(topic_id="t1", documents=None, summaries=None) -> Topic:
    documents = documents or {"doc1": "John ate an apple. Mary drank tea."}
    summaries = summaries or {"sum1": "John ate an apple."}
    return Topic(
        topic_id=topic_id,
        documents=tuple(make_entry(k, v) for k, v in documents.items()),
        summaries=tuple(make_entry(k, v) for k, v in summaries.items()),
    )


def random_span(rng: random.Random, length: int, max_ranges: int = 3) -> Span:
    n_ranges = rng.randint(1, max_ranges)
    ranges = []
    for _ in range(n_ranges):
        start = rng.randrange(0, length - 1)
        end = rng.randrange(start + 1, min(length, start + 40) + 1)
        ranges.append((start, end))
    return Span(ranges)


def random_pair(rng: random.Random, summary_ids, doc_ids, text_len=200) -> AlignmentPair:
    return AlignmentPair(
        summary_iu=InformationUnit(
            span=random_span(rng, text_len), parent_id=rng.choice(summary_ids)
        ),
        doc_iu=InformationUnit(
            span=random_span(rng, text_len), parent_id=rng.choice(doc_ids)
        ),
        probability=round(rng.random(), 4),
        provenance="gold",
    )


def random_alignment_set(
    rng: random.Random,
    topic_id="t1",
    max_pairs=10,
    min_pairs=0,
    summary_ids=("sum1", "sum2"),
    doc_ids=("doc1", "doc2", "doc3"),
    text_len=200,
) -> AlignmentSet:
    pairs = []
    seen = set()
    for _ in range(rng.randint(min_pairs, max_pairs)):
        pair = random_pair(rng, list(summary_ids), list(doc_ids), text_len)
        if pair.key in seen:
            continue
        seen.add(pair.key)
        pairs.append(pair)
    return AlignmentSet(topic_id, pairs)


class LexicalMockScorer:
    """Deterministic text-overlap scorer standing in for neural backends."""

    def score_pairs(self, pairs, kinds):
        out = []
        for a, b in pairs:
            ta, tb = set(tokenize(a)), set(tokenize(b))
            union = ta | tb
            overlap = len(ta & tb) / len(union) if union else 0.0
            containment = len(ta & tb) / len(ta) if ta else 0.0
            scores = {
                "similarity": overlap,
                "entailment": containment,
                "align_prob": (overlap + containment) / 2.0,
            }
            out.append({k: scores[k] for k in kinds})
        return out


class PrimedMockScorer:
    """Returns primed scores for registered pairs, low defaults otherwise."""

    def __init__(self, primed: dict[tuple[str, str], dict[str, float]], default=0.05):
        self.primed = primed
        self.default = default

    def score_pairs(self, pairs, kinds):
        out = []
        for a, b in pairs:
            entry = self.primed.get((a, b), {})
            out.append({k: entry.get(k, self.default) for k in kinds})
        return out


@pytest.fixture
def lexical_scorer():
    return LexicalMockScorer()


def random_word(rng: random.Random, length=None) -> str:
    length = length or rng.randint(3, 8)
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(length))
