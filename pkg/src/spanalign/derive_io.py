"""JSONL schemas for derivation inputs and outputs.

Pyramid-style inputs come in three files:
  system summaries: {"topic_id", "sys_id", "text", "sentences"?}
  span links:       {"topic_id", "ref_id", "ref_span", "sys_id", "sys_span"}
  extractive links: {"topic_id", "sys_id", "sys_sentence_index",
                     "doc_id", "doc_sentence_index"}
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from pathlib import Path

from .corpus import Span, TextEntry, sentences_from_boundaries, split_sentences
from .derive import (
    Cluster,
    DatasetStats,
    ExtractiveLink,
    OrderingExample,
    ScuLink,
    SentencePlan,
    TrainingPair,
)
from .errors import IntegrityError, ParseError
from .extraction import iu_record


def _records(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc
            yield lineno, record


def load_system_summaries(path: str | Path) -> dict[str, dict[str, TextEntry]]:
    """topic_id -> sys_id -> system summary entry."""
    out: dict[str, dict[str, TextEntry]] = {}
    for lineno, record in _records(path):
        for key in ("topic_id", "sys_id", "text"):
            if key not in record:
                raise ParseError(f"missing field {key!r}", str(path), lineno)
        text = record["text"]
        if "sentences" in record:
            sentences = sentences_from_boundaries(
                text, [(int(s["start"]), int(s["end"])) for s in record["sentences"]]
            )
        else:
            sentences = tuple(split_sentences(text))
        entry = TextEntry(text_id=str(record["sys_id"]), text=text, sentences=sentences)
        out.setdefault(str(record["topic_id"]), {})[entry.text_id] = entry
    return out


def load_scu_links(path: str | Path) -> dict[str, list[ScuLink]]:
    out: dict[str, list[ScuLink]] = {}
    for lineno, record in _records(path):
        for key in ("topic_id", "ref_id", "ref_span", "sys_id", "sys_span"):
            if key not in record:
                raise ParseError(f"missing field {key!r}", str(path), lineno)
        try:
            link = ScuLink(
                ref_id=str(record["ref_id"]),
                ref_span=Span(record["ref_span"]),
                sys_id=str(record["sys_id"]),
                sys_span=Span(record["sys_span"]),
            )
        except IntegrityError as exc:
            raise IntegrityError(f"{path}:{lineno}: {exc}") from exc
        out.setdefault(str(record["topic_id"]), []).append(link)
    return out


def load_extractive_links(path: str | Path) -> dict[str, list[ExtractiveLink]]:
    out: dict[str, list[ExtractiveLink]] = {}
    for lineno, record in _records(path):
        for key in ("topic_id", "sys_id", "sys_sentence_index", "doc_id", "doc_sentence_index"):
            if key not in record:
                raise ParseError(f"missing field {key!r}", str(path), lineno)
        out.setdefault(str(record["topic_id"]), []).append(
            ExtractiveLink(
                sys_id=str(record["sys_id"]),
                sys_sentence_index=int(record["sys_sentence_index"]),
                doc_id=str(record["doc_id"]),
                doc_sentence_index=int(record["doc_sentence_index"]),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Output records
# ---------------------------------------------------------------------------


def salience_records(topic_id: str, ius) -> Iterable[dict]:
    for iu in ius:
        yield iu_record(topic_id, iu)


def cluster_record(topic_id: str, cluster: Cluster) -> dict:
    return {
        "topic_id": topic_id,
        "cluster_id": cluster.cluster_id,
        "summary_id": cluster.summary_iu.parent_id,
        "summary_span": [list(r) for r in cluster.summary_iu.span.ranges],
        "summary_surface": cluster.summary_iu.surface,
        "members": [
            {
                "doc_id": iu.parent_id,
                "sentence_index": iu.sentence_index,
                "ranges": [list(r) for r in iu.span.ranges],
                "surface": iu.surface,
            }
            for iu in cluster.members
        ],
    }


def plan_record(topic_id: str, plan: SentencePlan) -> dict:
    return {
        "topic_id": topic_id,
        "summary_id": plan.summary_id,
        "sentence_index": plan.sentence_index,
        "sentence_text": plan.sentence_text,
        "cluster_ids": [c.cluster_id for c in plan.clusters],
    }


def fusion_record(topic_id: str, plan: SentencePlan, inputs: list[list[str]], target: str) -> dict:
    return {
        "topic_id": topic_id,
        "summary_id": plan.summary_id,
        "sentence_index": plan.sentence_index,
        "inputs": inputs,
        "target": target,
    }


def ordering_record(topic_id: str, example: OrderingExample) -> dict:
    return {
        "topic_id": topic_id,
        "summary_id": example.summary_id,
        "shuffled_plans": [
            {
                "sentence_index": plan.sentence_index,
                "cluster_ids": [c.cluster_id for c in plan.clusters],
            }
            for plan in example.shuffled
        ],
        "gold_permutation": list(example.gold_permutation),
    }


def training_pair_record(pair: TrainingPair) -> dict:
    return {
        "summary_text": pair.summary_text,
        "doc_text": pair.doc_text,
        "label": pair.label,
        "origin": pair.origin,
    }


def write_jsonl(records: Iterable[dict], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def render_stats_tsv(stats: DatasetStats) -> str:
    lines = ["metric\tvalue"]
    lines.extend(f"{name}\t{value}" for name, value in stats.rows())
    return "\n".join(lines) + "\n"


def render_stats_json(stats: DatasetStats) -> str:
    payload = {
        "n_alignments": stats.n_alignments,
        "n_salient_ius": stats.n_salient_ius,
        "n_clusters": stats.n_clusters,
        "cluster_size": {"mean": stats.cluster_size_mean, "std": stats.cluster_size_std},
        "clusters_per_sentence": {
            "mean": stats.clusters_per_sentence_mean,
            "std": stats.clusters_per_sentence_std,
        },
    }
    return json.dumps(payload, indent=2) + "\n"
