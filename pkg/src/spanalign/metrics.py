"""Evaluation measures for span alignments.

Implements the character-level Jaccard family (per-side Jaccard, combined
two-sided Jaccard, threshold-gated recall/precision, best-match span
overlap averages, coverage), ROUGE-1/2/L, and sentence-level salience
scoring. Empty inputs never produce NaN: scores degrade to 0 and the
result carries an explicit flag.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import AlignmentPair, AlignmentSet, InformationUnit, Sentence, Span
from .errors import IntegrityError
from .tokenize import tokenize, tokenize_with_spans

DEFAULT_THRESHOLD = 0.25


@dataclass(frozen=True)
class MatchScores:
    """Threshold-gated alignment recall/precision, as percentages."""

    recall_t: float
    precision_t: float
    f1: float
    threshold: float
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CoJacScores:
    """Average best-match combined Jaccard, over positively scored items only."""

    cojac_t: float
    cojac_p: float
    threshold: float
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CoverageScores:
    """Percentage of distinct gold summary IUs matched by any prediction."""

    coverage: float
    f1_cover: float
    threshold: float
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SalienceScores:
    """Token precision and IU recall of a salient-sentence selection, as percentages."""

    token_precision: float
    iu_recall: float
    f1: float
    flags: frozenset[str] = frozenset()
    total_tokens: int = 0
    aligned_tokens: int = 0
    total_ius: int = 0
    covered_ius: int = 0


def harmonic_mean(a: float, b: float) -> float:
    if a <= 0.0 and b <= 0.0:
        return 0.0
    return 2.0 * a * b / (a + b)


# ---------------------------------------------------------------------------
# Character-level Jaccard
# ---------------------------------------------------------------------------


def _intersection_size(a: Span, b: Span) -> int:
    total = 0
    i = j = 0
    ra, rb = a.ranges, b.ranges
    while i < len(ra) and j < len(rb):
        s = max(ra[i][0], rb[j][0])
        e = min(ra[i][1], rb[j][1])
        if s < e:
            total += e - s
        if ra[i][1] <= rb[j][1]:
            i += 1
        else:
            j += 1
    return total


def char_jaccard(a: Span, b: Span) -> float:
    """Index-set intersection-over-union of two spans of the same parent text."""
    inter = _intersection_size(a, b)
    union = len(a) + len(b) - inter
    return inter / union


def iu_char_jaccard(a: InformationUnit, b: InformationUnit) -> float:
    """char_jaccard for IUs; comparing IUs of different parents is an error."""
    if a.parent_id != b.parent_id:
        raise IntegrityError(
            f"cannot compare spans of different parents: {a.parent_id!r} vs {b.parent_id!r}"
        )
    return char_jaccard(a.span, b.span)


def _side_jaccards(p: AlignmentPair, t: AlignmentPair) -> tuple[float, float]:
    """Summary-side and document-side Jaccard; different parents score 0."""
    r = (
        char_jaccard(p.summary_iu.span, t.summary_iu.span)
        if p.summary_iu.parent_id == t.summary_iu.parent_id
        else 0.0
    )
    d = (
        char_jaccard(p.doc_iu.span, t.doc_iu.span)
        if p.doc_iu.parent_id == t.doc_iu.parent_id
        else 0.0
    )
    return r, d


def joint_jaccard(p: AlignmentPair, t: AlignmentPair) -> float:
    """Combined two-sided Jaccard: (summary∩ + doc∩) / (summary∪ + doc∪).

    Pairs whose summary or document parents differ score 0 by definition.
    """
    if (
        p.summary_iu.parent_id != t.summary_iu.parent_id
        or p.doc_iu.parent_id != t.doc_iu.parent_id
    ):
        return 0.0
    inter_r = _intersection_size(p.summary_iu.span, t.summary_iu.span)
    inter_d = _intersection_size(p.doc_iu.span, t.doc_iu.span)
    union_r = len(p.summary_iu.span) + len(t.summary_iu.span) - inter_r
    union_d = len(p.doc_iu.span) + len(t.doc_iu.span) - inter_d
    return (inter_r + inter_d) / (union_r + union_d)


# ---------------------------------------------------------------------------
# Alignment-set metrics
# ---------------------------------------------------------------------------


def _check_threshold(t: float) -> None:
    if not 0.0 < t <= 1.0:
        raise IntegrityError(f"threshold must lie in (0, 1], got {t}")


def _matched_flags(side: list[AlignmentPair], other: list[AlignmentPair], t: float) -> list[bool]:
    """For each pair in ``side``: does some pair in ``other`` clear t on BOTH sides?"""
    out = []
    for p in side:
        hit = False
        for q in other:
            r, d = _side_jaccards(p, q)
            if r >= t and d >= t:
                hit = True
                break
        out.append(hit)
    return out


def extended_recall_precision(
    pred: AlignmentSet, gold: AlignmentSet, t: float = DEFAULT_THRESHOLD
) -> MatchScores:
    """Recall/precision where a pair matches only if both sides clear t."""
    _check_threshold(t)
    pred_pairs, gold_pairs = list(pred.pairs), list(gold.pairs)
    flags = set()
    if not pred_pairs:
        flags.add("empty_pred")
        precision = 0.0
    else:
        hits = _matched_flags(pred_pairs, gold_pairs, t)
        precision = 100.0 * sum(hits) / len(hits)
    if not gold_pairs:
        flags.add("empty_gold")
        recall = 0.0
    else:
        hits = _matched_flags(gold_pairs, pred_pairs, t)
        recall = 100.0 * sum(hits) / len(hits)
    return MatchScores(
        recall_t=recall,
        precision_t=precision,
        f1=harmonic_mean(recall, precision),
        threshold=t,
        flags=frozenset(flags),
    )


def _overlap_scores(side: list[AlignmentPair], other: list[AlignmentPair], t: float) -> list[float]:
    """Best-match combined Jaccard per pair, gated to 0 when no counterpart
    clears t on either side."""
    out = []
    for p in side:
        gate = False
        best = 0.0
        for q in other:
            r, d = _side_jaccards(p, q)
            if r >= t or d >= t:
                gate = True
            jj = joint_jaccard(p, q)
            if jj > best:
                best = jj
        out.append(best if gate else 0.0)
    return out


def cojac(
    pred: AlignmentSet, gold: AlignmentSet, t: float = DEFAULT_THRESHOLD
) -> CoJacScores:
    """Average combined Jaccard of best matches, over positive scores only."""
    _check_threshold(t)
    pred_pairs, gold_pairs = list(pred.pairs), list(gold.pairs)
    flags = set()

    def positive_mean(scores: list[float], flag: str) -> float:
        positive = [s for s in scores if s > 0.0]
        if not positive:
            flags.add(flag)
            return 0.0
        return 100.0 * sum(positive) / len(positive)

    cojac_p = positive_mean(_overlap_scores(pred_pairs, gold_pairs, t), "no_positive_pred")
    cojac_t = positive_mean(_overlap_scores(gold_pairs, pred_pairs, t), "no_positive_gold")
    return CoJacScores(cojac_t=cojac_t, cojac_p=cojac_p, threshold=t, flags=frozenset(flags))


def distinct_summary_ius(aset: AlignmentSet) -> list[InformationUnit]:
    seen = set()
    out = []
    for p in aset.pairs:
        if p.summary_iu.key not in seen:
            seen.add(p.summary_iu.key)
            out.append(p.summary_iu)
    return out


def coverage(
    pred: AlignmentSet, gold: AlignmentSet, t: float = DEFAULT_THRESHOLD
) -> CoverageScores:
    """Rate of distinct gold summary IUs touched by some predicted summary IU.

    Also reports the harmonic mean of coverage and threshold precision
    (the combined figure reported next to coverage in evaluations).
    """
    _check_threshold(t)
    gold_ius = distinct_summary_ius(gold)
    pred_ius = distinct_summary_ius(pred)
    flags = set()
    if not gold_ius:
        flags.add("empty_gold")
        cover = 0.0
    else:
        covered = 0
        for g in gold_ius:
            for p in pred_ius:
                if g.parent_id == p.parent_id and char_jaccard(g.span, p.span) >= t:
                    covered += 1
                    break
        cover = 100.0 * covered / len(gold_ius)
    match = extended_recall_precision(pred, gold, t)
    flags |= match.flags
    return CoverageScores(
        coverage=cover,
        f1_cover=harmonic_mean(cover, match.precision_t),
        threshold=t,
        flags=frozenset(flags),
    )


# ---------------------------------------------------------------------------
# ROUGE
# ---------------------------------------------------------------------------


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge(
    candidate_tokens: list[str], reference_tokens: list[str], variant: str
) -> RougeScore:
    """ROUGE with clipped n-gram counts ('1', '2') or LCS ('L'), scores in [0, 1]."""
    if variant not in ("1", "2", "L"):
        raise ValueError(f"unknown ROUGE variant {variant!r}")
    flags = set()
    if variant == "L":
        match = _lcs_length(candidate_tokens, reference_tokens)
        cand_total = len(candidate_tokens)
        ref_total = len(reference_tokens)
    else:
        n = int(variant)
        cand_counts = _ngrams(candidate_tokens, n)
        ref_counts = _ngrams(reference_tokens, n)
        match = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        cand_total = sum(cand_counts.values())
        ref_total = sum(ref_counts.values())
    if cand_total == 0:
        flags.add("empty_candidate")
        precision = 0.0
    else:
        precision = match / cand_total
    if ref_total == 0:
        flags.add("empty_reference")
        recall = 0.0
    else:
        recall = match / ref_total
    return RougeScore(
        recall=recall,
        precision=precision,
        f1=harmonic_mean(recall, precision),
        flags=frozenset(flags),
    )


def rouge_text(
    candidate: str,
    reference: str,
    variant: str,
    *,
    stem: bool = False,
) -> RougeScore:
    """ROUGE over raw strings using the module tokenizer (lowercased)."""
    return rouge(
        tokenize(candidate, stem=stem), tokenize(reference, stem=stem), variant
    )


def mean_rouge_f1(candidate: str, reference: str, *, stem: bool = False) -> float:
    """Mean of ROUGE-1/2/L F1: the default ranking score for lexical aligners."""
    scores = [rouge_text(candidate, reference, v, stem=stem) for v in ("1", "2", "L")]
    return sum(s.f1 for s in scores) / 3.0


# ---------------------------------------------------------------------------
# Sentence-level salience evaluation
# ---------------------------------------------------------------------------


def _covered_fraction(iu_span: Span, start: int, end: int) -> float:
    """Fraction of the IU's characters falling inside [start, end)."""
    window = Span([(start, end)]) if start < end else None
    if window is None or len(iu_span) == 0:
        return 0.0
    return _intersection_size(iu_span, window) / len(iu_span)


def sentence_salience_eval(
    selected: dict[str, list[Sentence]],
    gold: AlignmentSet,
    t: float = DEFAULT_THRESHOLD,
) -> SalienceScores:
    """Score selected document sentences against gold alignments.

    ``selected`` maps doc_id -> chosen sentences of that document.
    Token precision: share of tokens in the selection whose full extent lies
    inside some gold document-side IU span. IU recall: share of distinct
    gold summary IUs with an aligned document IU contained (>= t of its
    characters) in a selected sentence.
    """
    _check_threshold(t)
    flags = set()
    n_selected = sum(len(v) for v in selected.values())
    if n_selected == 0:
        flags.add("empty_selection")
    if not gold.pairs:
        flags.add("empty_gold")
    if flags:
        return SalienceScores(0.0, 0.0, 0.0, frozenset(flags))

    doc_spans: dict[str, list[Span]] = {}
    for p in gold.pairs:
        doc_spans.setdefault(p.doc_iu.parent_id, []).append(p.doc_iu.span)

    total_tokens = 0
    aligned_tokens = 0
    for doc_id, sentences in selected.items():
        spans = doc_spans.get(doc_id, [])
        for sent in sentences:
            for token in tokenize_with_spans(sent.text):
                total_tokens += 1
                tok_start = sent.char_offset + token.start
                tok_end = sent.char_offset + token.end
                token_span = Span([(tok_start, tok_end)])
                if any(_intersection_size(token_span, s) == len(token_span) for s in spans):
                    aligned_tokens += 1
    if total_tokens == 0:
        flags.add("no_tokens")
        token_precision = 0.0
    else:
        token_precision = 100.0 * aligned_tokens / total_tokens

    covered = 0
    gold_ius = distinct_summary_ius(gold)
    for g in gold_ius:
        hit = False
        for p in gold.pairs:
            if p.summary_iu.key != g.key:
                continue
            for sent in selected.get(p.doc_iu.parent_id, []):
                if _covered_fraction(p.doc_iu.span, sent.char_offset, sent.end) >= t:
                    hit = True
                    break
            if hit:
                break
        if hit:
            covered += 1
    iu_recall = 100.0 * covered / len(gold_ius)

    return SalienceScores(
        token_precision=token_precision,
        iu_recall=iu_recall,
        f1=harmonic_mean(token_precision, iu_recall),
        flags=frozenset(flags),
        total_tokens=total_tokens,
        aligned_tokens=aligned_tokens,
        total_ius=len(gold_ius),
        covered_ius=covered,
    )
