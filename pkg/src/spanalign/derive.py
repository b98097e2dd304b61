"""Datasets derived from span alignments.

From one alignment set per topic this module derives: salient document
IUs, cross-document IU clusters keyed by their summary pivot, sentence
plans (clusters grouped per summary sentence), fusion examples, and
ordering examples. It also composes reference->system and
system->document links into reference->document span alignments
(the training-set construction route) and builds classifier training
pairs from gold alignments plus extracted IUs.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from .corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Span,
    TextEntry,
    Topic,
)
from .errors import IntegrityError
from .metrics import joint_jaccard
from .scorers import PairScorer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cluster:
    """Document IUs aligned to one summary pivot IU."""

    cluster_id: str
    summary_iu: InformationUnit
    members: tuple[InformationUnit, ...]

    def __post_init__(self):
        if not self.members:
            raise IntegrityError(f"cluster {self.cluster_id} has no members")


@dataclass(frozen=True)
class SentencePlan:
    """Clusters whose pivot IUs share one summary sentence."""

    summary_id: str
    sentence_index: int
    sentence_text: str
    clusters: tuple[Cluster, ...]


@dataclass(frozen=True)
class TrainingPair:
    summary_text: str
    doc_text: str
    label: str  # "positive" | "negative"
    origin: str  # "jaccard_pos" | "hard_neg_sim" | "same_doc_neg"


def derive_salience(aligned: AlignmentSet) -> list[InformationUnit]:
    """Deduplicated document-side IUs of an alignment set, in span order."""
    seen = set()
    out = []
    for pair in aligned.pairs:
        if pair.doc_iu.key in seen:
            continue
        seen.add(pair.doc_iu.key)
        out.append(pair.doc_iu)
    out.sort(key=lambda iu: (iu.parent_id, iu.span.ranges))
    return out


def derive_clusters(aligned: AlignmentSet) -> list[Cluster]:
    """Group document IUs by the summary IU they are aligned to."""
    grouped: dict[tuple, list[AlignmentPair]] = {}
    for pair in aligned.pairs:
        grouped.setdefault(pair.summary_iu.key, []).append(pair)
    pivots = sorted(grouped, key=lambda key: (key[0], key[1]))
    clusters = []
    for i, pivot_key in enumerate(pivots):
        pairs = grouped[pivot_key]
        members = sorted(
            {p.doc_iu.key: p.doc_iu for p in pairs}.values(),
            key=lambda iu: (iu.parent_id, iu.span.ranges),
        )
        clusters.append(
            Cluster(
                cluster_id=f"{aligned.topic_id}/c{i:03d}",
                summary_iu=pairs[0].summary_iu,
                members=tuple(members),
            )
        )
    return clusters


def derive_sentence_planning(clusters: list[Cluster], topic: Topic) -> list[SentencePlan]:
    """Group clusters by the summary sentence containing their pivot's start."""
    grouped: dict[tuple[str, int], list[Cluster]] = {}
    for cluster in clusters:
        pivot = cluster.summary_iu
        entry = topic.summary(pivot.parent_id)
        sentence = entry.sentence_at(pivot.span.start)
        if sentence is None:
            raise IntegrityError(
                f"pivot IU at {pivot.span.ranges} lies in no sentence of {pivot.parent_id!r}"
            )
        grouped.setdefault((pivot.parent_id, sentence.index), []).append(cluster)
    plans = []
    for (summary_id, sent_index) in sorted(grouped):
        entry = topic.summary(summary_id)
        plans.append(
            SentencePlan(
                summary_id=summary_id,
                sentence_index=sent_index,
                sentence_text=entry.sentences[sent_index].text,
                clusters=tuple(grouped[(summary_id, sent_index)]),
            )
        )
    return plans


def derive_fusion(plans: list[SentencePlan]) -> list[tuple[list[list[str]], str]]:
    """One fusion example per plan: cluster member surfaces -> summary sentence."""
    out = []
    for plan in plans:
        inputs = [
            [iu.surface or "" for iu in cluster.members] for cluster in plan.clusters
        ]
        out.append((inputs, plan.sentence_text))
    return out


@dataclass(frozen=True)
class OrderingExample:
    summary_id: str
    shuffled: tuple[SentencePlan, ...]
    gold_permutation: tuple[int, ...]  # shuffled[perm[i]] is the i-th plan in summary order


def derive_ordering(
    plans: list[SentencePlan], topic: Topic, seed: int = 13
) -> list[OrderingExample]:
    """Shuffle each summary's plans; the gold permutation restores summary order."""
    by_summary: dict[str, list[SentencePlan]] = {}
    for plan in plans:
        by_summary.setdefault(plan.summary_id, []).append(plan)
    out = []
    for summary_id in sorted(by_summary):
        ordered = sorted(by_summary[summary_id], key=lambda p: p.sentence_index)
        indices = list(range(len(ordered)))
        rng = random.Random(f"{seed}:{topic.topic_id}:{summary_id}")
        rng.shuffle(indices)
        shuffled = tuple(ordered[i] for i in indices)
        gold = tuple(indices.index(i) for i in range(len(ordered)))
        out.append(
            OrderingExample(
                summary_id=summary_id, shuffled=shuffled, gold_permutation=gold
            )
        )
    return out


# ---------------------------------------------------------------------------
# Transitive alignment through system-summary links
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScuLink:
    """An expert link between a reference-summary span and a system-summary span."""

    ref_id: str
    ref_span: Span
    sys_id: str
    sys_span: Span


@dataclass(frozen=True)
class ExtractiveLink:
    """A system-summary sentence copied verbatim from a document sentence."""

    sys_id: str
    sys_sentence_index: int
    doc_id: str
    doc_sentence_index: int


@dataclass(frozen=True)
class TransitiveResult:
    alignments: AlignmentSet
    skipped_links: int  # system sentences with no extractive source


def _fragments_by_sentence(span: Span, entry: TextEntry) -> dict[int, list[tuple[int, int]]]:
    """Clip a span to sentence bounds, grouping the pieces per sentence index."""
    out: dict[int, list[tuple[int, int]]] = {}
    for s, e in span.ranges:
        for sent in entry.sentences:
            lo = max(s, sent.char_offset)
            hi = min(e, sent.end)
            if lo < hi:
                out.setdefault(sent.index, []).append((lo, hi))
    return out


def pyramid_transitive_align(
    topic: Topic,
    system_summaries: dict[str, TextEntry],
    scu_links: list[ScuLink],
    extractive_links: list[ExtractiveLink],
) -> TransitiveResult:
    """Compose span links through system summaries into document alignments.

    For every (reference span, system span) link, each per-sentence piece
    of the system span whose sentence has an extractive source is shifted
    onto the matching document sentence. The system and document sentence
    texts must match exactly.
    """
    sources: dict[tuple[str, int], tuple[str, int]] = {}
    for link in extractive_links:
        sources[(link.sys_id, link.sys_sentence_index)] = (
            link.doc_id,
            link.doc_sentence_index,
        )

    pairs: list[AlignmentPair] = []
    skipped = 0
    for link in scu_links:
        ref_entry = topic.summary(link.ref_id)
        link.ref_span.check_within(len(ref_entry.text))
        if link.sys_id not in system_summaries:
            raise IntegrityError(f"unknown system summary {link.sys_id!r}")
        sys_entry = system_summaries[link.sys_id]
        link.sys_span.check_within(len(sys_entry.text))
        for sent_index, fragments in sorted(
            _fragments_by_sentence(link.sys_span, sys_entry).items()
        ):
            source = sources.get((link.sys_id, sent_index))
            if source is None:
                skipped += 1
                continue
            doc_id, doc_sent_index = source
            doc_entry = topic.document(doc_id)
            if not 0 <= doc_sent_index < len(doc_entry.sentences):
                raise IntegrityError(
                    f"document sentence index {doc_sent_index} out of range in {doc_id!r}"
                )
            sys_sent = sys_entry.sentences[sent_index]
            doc_sent = doc_entry.sentences[doc_sent_index]
            if sys_sent.text != doc_sent.text:
                raise IntegrityError(
                    f"system sentence ({link.sys_id!r}, {sent_index}) does not match "
                    f"document sentence ({doc_id!r}, {doc_sent_index})"
                )
            delta = doc_sent.char_offset - sys_sent.char_offset
            doc_span = Span([(s + delta, e + delta) for s, e in fragments])
            pairs.append(
                AlignmentPair(
                    summary_iu=InformationUnit.from_parent_text(
                        link.ref_span, link.ref_id, ref_entry.text,
                        _sentence_index_of(ref_entry, link.ref_span),
                    ),
                    doc_iu=InformationUnit.from_parent_text(
                        doc_span, doc_id, doc_entry.text, doc_sent_index
                    ),
                    provenance="pyramid_transitive",
                )
            )
    deduped = []
    seen = set()
    for pair in sorted(
        pairs,
        key=lambda p: (
            p.summary_iu.parent_id,
            p.summary_iu.span.ranges,
            p.doc_iu.parent_id,
            p.doc_iu.span.ranges,
        ),
    ):
        if pair.key in seen:
            continue
        seen.add(pair.key)
        deduped.append(pair)
    return TransitiveResult(
        alignments=AlignmentSet(topic.topic_id, deduped), skipped_links=skipped
    )


def _sentence_index_of(entry: TextEntry, span: Span) -> int:
    sentence = entry.sentence_at(span.start)
    return sentence.index if sentence else -1


# ---------------------------------------------------------------------------
# Classifier training pairs
# ---------------------------------------------------------------------------


def build_training_pairs(
    gold: AlignmentSet,
    summary_ius: list[InformationUnit],
    doc_ius: list[InformationUnit],
    scorer: PairScorer | None = None,
    jaccard_threshold: float = 0.25,
    similarity_threshold: float = 0.89,
) -> list[TrainingPair]:
    """Label extracted IU combinations against gold alignments.

    Positives share joint Jaccard >= threshold with a gold pair. Negatives
    are either high-similarity unaligned pairs (needs a scorer) or
    same-document combinations of a positively aligned summary IU.
    Positive labels take precedence.
    """
    combos = [(s, d) for s in summary_ius for d in doc_ius]
    positive = set()
    positive_docs: dict[tuple, set[str]] = {}
    for s, d in combos:
        candidate = AlignmentPair(summary_iu=s, doc_iu=d, provenance="gold")
        if any(joint_jaccard(candidate, g) >= jaccard_threshold for g in gold.pairs):
            positive.add((s.key, d.key))
            positive_docs.setdefault(s.key, set()).add(d.parent_id)

    hard_negative = set()
    if scorer is not None:
        texts = [(s.surface or "", d.surface or "") for s, d in combos]
        scored = scorer.score_pairs(texts, ("similarity",))
        for (s, d), result in zip(combos, scored):
            if (s.key, d.key) in positive:
                continue
            if result["similarity"] > similarity_threshold:
                hard_negative.add((s.key, d.key))
    else:
        logger.warning("no scorer available: omitting high-similarity negatives")

    out = []
    for s, d in combos:
        key = (s.key, d.key)
        if key in positive:
            out.append(TrainingPair(s.surface or "", d.surface or "", "positive", "jaccard_pos"))
        elif key in hard_negative:
            out.append(TrainingPair(s.surface or "", d.surface or "", "negative", "hard_neg_sim"))
        elif d.parent_id in positive_docs.get(s.key, ()):
            out.append(TrainingPair(s.surface or "", d.surface or "", "negative", "same_doc_neg"))
    return out


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetStats:
    n_alignments: int
    n_salient_ius: int
    n_clusters: int
    cluster_size_mean: float
    cluster_size_std: float
    clusters_per_sentence_mean: float
    clusters_per_sentence_std: float

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("#alignments", str(self.n_alignments)),
            ("#salient IUs", str(self.n_salient_ius)),
            ("#clusters", str(self.n_clusters)),
            ("cluster size", f"{self.cluster_size_mean:.2f} ({self.cluster_size_std:.2f})"),
            (
                "#clusters per sent",
                f"{self.clusters_per_sentence_mean:.2f} ({self.clusters_per_sentence_std:.2f})",
            ),
        ]


def dataset_stats(items: list[tuple[AlignmentSet, Topic]]) -> DatasetStats:
    """Aggregate counts plus mean (population StD) size statistics."""
    n_alignments = 0
    n_salient = 0
    cluster_sizes: list[int] = []
    per_sentence: list[int] = []
    for aligned, topic in items:
        n_alignments += len(aligned.pairs)
        n_salient += len(derive_salience(aligned))
        clusters = derive_clusters(aligned)
        cluster_sizes.extend(len(c.members) for c in clusters)
        for plan in derive_sentence_planning(clusters, topic):
            per_sentence.append(len(plan.clusters))

    def mean_std(values: list[int]) -> tuple[float, float]:
        if not values:
            return 0.0, 0.0
        arr = np.array(values, dtype=float)
        return float(arr.mean()), float(arr.std())

    size_mean, size_std = mean_std(cluster_sizes)
    sent_mean, sent_std = mean_std(per_sentence)
    return DatasetStats(
        n_alignments=n_alignments,
        n_salient_ius=n_salient,
        n_clusters=len(cluster_sizes),
        cluster_size_mean=size_mean,
        cluster_size_std=size_std,
        clusters_per_sentence_mean=sent_mean,
        clusters_per_sentence_std=sent_std,
    )
