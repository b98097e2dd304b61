"""Candidate generation and reduction between summary IUs and document sentences.

Each (summary IU, document sentence) pair gets three scores: local
ROUGE-1 precision (IU as candidate, sentence as reference), and
similarity/entailment from a pair scorer (IU as hypothesis, sentence as
premise). The filter keeps a pair when any score clears its threshold,
so raising thresholds only ever shrinks the surviving set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .corpus import AlignmentSet, InformationUnit, Sentence, Topic
from .errors import IntegrityError
from .metrics import DEFAULT_THRESHOLD, _covered_fraction, char_jaccard, rouge_text
from .scorers import PairScorer


@dataclass(frozen=True)
class CandidateScore:
    """Scores for one (summary IU, document sentence) pair."""

    summary_iu: InformationUnit
    doc_id: str
    sentence: Sentence
    rouge1_precision: float
    similarity: float
    entailment: float

    def __post_init__(self):
        for name in ("rouge1_precision", "similarity", "entailment"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise IntegrityError(f"{name}={value} outside [0, 1]")

    @property
    def product(self) -> float:
        return self.rouge1_precision * self.similarity * self.entailment


@dataclass(frozen=True)
class FilterPolicy:
    """Disjunctive keep-rule thresholds: keep if any score clears its bar."""

    min_rouge: float = 0.15
    min_similarity: float = 0.85
    min_entailment: float = 0.5

    def keeps(self, score: CandidateScore) -> bool:
        return (
            score.rouge1_precision >= self.min_rouge
            or score.similarity >= self.min_similarity
            or score.entailment >= self.min_entailment
        )


@dataclass(frozen=True)
class FilterResult:
    kept: tuple[CandidateScore, ...]
    total: int
    reduction: float
    recall: float | None
    flags: frozenset[str] = frozenset()


def score_candidates(
    summary_ius: list[InformationUnit],
    doc_sentences: list[tuple[str, Sentence]],
    scorer: PairScorer,
) -> list[CandidateScore]:
    """Score every (summary IU, document sentence) combination."""
    combos = list(itertools.product(summary_ius, doc_sentences))
    if not combos:
        return []
    pairs = [(iu.surface or "", sent.text) for iu, (_, sent) in combos]
    scored = scorer.score_pairs(pairs, ("similarity", "entailment"))
    out = []
    for (iu, (doc_id, sent)), scores in zip(combos, scored):
        out.append(
            CandidateScore(
                summary_iu=iu,
                doc_id=doc_id,
                sentence=sent,
                rouge1_precision=rouge_text(iu.surface or "", sent.text, "1").precision,
                similarity=scores["similarity"],
                entailment=scores["entailment"],
            )
        )
    return out


def topic_doc_sentences(topic: Topic) -> list[tuple[str, Sentence]]:
    return [(d.text_id, s) for d in topic.documents for s in d.sentences]


def _gold_pair_recalled(
    pair, kept: list[CandidateScore], t: float
) -> bool:
    for cs in kept:
        if cs.summary_iu.parent_id != pair.summary_iu.parent_id:
            continue
        if char_jaccard(cs.summary_iu.span, pair.summary_iu.span) < t:
            continue
        if cs.doc_id != pair.doc_iu.parent_id:
            continue
        if _covered_fraction(pair.doc_iu.span, cs.sentence.char_offset, cs.sentence.end) >= t:
            return True
    return False


def automatic_filter(
    scores: list[CandidateScore],
    policy: FilterPolicy,
    gold: AlignmentSet | None = None,
    t: float = DEFAULT_THRESHOLD,
) -> FilterResult:
    """Apply the keep-rule; report reduction and, when gold is given, recall."""
    kept = tuple(s for s in scores if policy.keeps(s))
    total = len(scores)
    flags = set()
    if total == 0:
        flags.add("no_candidates")
        reduction = 0.0
    else:
        reduction = 1.0 - len(kept) / total
    recall = None
    if gold is not None:
        if not gold.pairs:
            flags.add("empty_gold")
        else:
            kept_list = list(kept)
            hits = sum(_gold_pair_recalled(p, kept_list, t) for p in gold.pairs)
            recall = hits / len(gold.pairs)
    return FilterResult(
        kept=kept, total=total, reduction=reduction, recall=recall, flags=frozenset(flags)
    )


def top_candidates(
    summary_iu: InformationUnit,
    scores: list[CandidateScore],
    k: int = 10,
) -> list[CandidateScore]:
    """Top-k document sentences for one IU by the R*B*E product."""
    if k < 1:
        raise IntegrityError(f"k must be >= 1, got {k}")
    mine = [s for s in scores if s.summary_iu.key == summary_iu.key]
    mine.sort(key=lambda s: (-s.product, s.doc_id, s.sentence.index))
    return mine[:k]


@dataclass(frozen=True)
class CalibrationResult:
    policy: FilterPolicy
    reduction: float
    recall: float
    meets_targets: bool


def _float_grid(stop: float, step: float) -> list[float]:
    out = []
    value = 0.0
    while value <= stop + 1e-9:
        out.append(round(value, 6))
        value += step
    return out


def calibrate(
    scores: list[CandidateScore],
    gold: AlignmentSet,
    target_reduction: float = 0.71,
    target_recall: float = 0.90,
    t: float = DEFAULT_THRESHOLD,
    rouge_grid: list[float] | None = None,
    similarity_grid: list[float] | None = None,
    entailment_grid: list[float] | None = None,
) -> CalibrationResult:
    """Grid-search filter thresholds against a gold set.

    Prefers policies reaching the recall target, then maximal reduction;
    falls back to maximal recall when the target is unreachable.
    """
    if not gold.pairs:
        raise IntegrityError("cannot calibrate against an empty gold set")
    rouge_grid = rouge_grid or _float_grid(0.5, 0.05)
    similarity_grid = similarity_grid or _float_grid(1.0, 0.05)
    entailment_grid = entailment_grid or _float_grid(1.0, 0.1)

    best: tuple | None = None
    for r, b, e in itertools.product(rouge_grid, similarity_grid, entailment_grid):
        policy = FilterPolicy(min_rouge=r, min_similarity=b, min_entailment=e)
        result = automatic_filter(scores, policy, gold=gold, t=t)
        recall = result.recall or 0.0
        if recall >= target_recall:
            key = (1, result.reduction, recall, (-r, -b, -e))
        else:
            key = (0, recall, result.reduction, (-r, -b, -e))
        if best is None or key > best[0]:
            best = (key, policy, result)
    _, policy, result = best
    recall = result.recall or 0.0
    return CalibrationResult(
        policy=policy,
        reduction=result.reduction,
        recall=recall,
        meets_targets=recall >= target_recall and result.reduction >= target_reduction,
    )
