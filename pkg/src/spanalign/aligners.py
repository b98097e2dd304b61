"""Alignment algorithms between summary IUs/sentences and document content.

Provided aligners:
  * rouge-iu      — each summary IU pairs with its k best document IUs by
                    mean ROUGE-1/2/L F1 (lexical baseline).
  * sim-ensemble  — filter + top-k candidate sentences by R*B*E, lexical
                    word alignment, gap closing, token-ratio acceptance.
  * supervised    — a pair scorer's alignment probability thresholded over
                    candidate IU pairs.
  * rouge-full    — greedy sentence selection maximizing collective
                    ROUGE-1+2 F1 against the whole summary.
  * rouge-sent    — per summary sentence, its best one or two document
                    sentences by ROUGE.
"""

from __future__ import annotations

from .corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Sentence,
    Span,
    Topic,
    span_text_with_map,
)
from .errors import IntegrityError
from .filtering import (
    CandidateScore,
    FilterPolicy,
    automatic_filter,
    score_candidates,
    top_candidates,
    topic_doc_sentences,
)
from .metrics import mean_rouge_f1, rouge_text
from .scorers import PairScorer
from .tokenize import porter_stem, tokenize_with_spans

DEFAULT_ROUGE_IU_K = 2
DEFAULT_CANDIDATES_K = 10
DEFAULT_MIN_TOKEN_RATIO = 0.30
DEFAULT_ALIGN_THRESHOLD = 0.5


def _sorted_pairs(pairs: list[AlignmentPair]) -> list[AlignmentPair]:
    return sorted(
        pairs,
        key=lambda p: (
            p.summary_iu.parent_id,
            p.summary_iu.span.ranges,
            p.doc_iu.parent_id,
            p.doc_iu.span.ranges,
        ),
    )


# ---------------------------------------------------------------------------
# ROUGE-based IU aligner
# ---------------------------------------------------------------------------


def align_rouge_iu(
    topic_id: str,
    summary_ius: list[InformationUnit],
    doc_ius: list[InformationUnit],
    k: int = DEFAULT_ROUGE_IU_K,
) -> AlignmentSet:
    """Pair each summary IU with its k highest-ROUGE document IUs.

    The ROUGE score is the mean of ROUGE-1/2/L F1 and is recorded as the
    pair probability. Ties break by (doc_id, sentence_index, span start).
    """
    if k < 1:
        raise IntegrityError(f"k must be >= 1, got {k}")
    pairs: list[AlignmentPair] = []
    for iu in summary_ius:
        ranked = sorted(
            doc_ius,
            key=lambda d: (
                -mean_rouge_f1(iu.surface or "", d.surface or ""),
                d.parent_id,
                d.sentence_index,
                d.span.ranges,
            ),
        )
        for doc_iu in ranked[:k]:
            pairs.append(
                AlignmentPair(
                    summary_iu=iu,
                    doc_iu=doc_iu,
                    probability=mean_rouge_f1(iu.surface or "", doc_iu.surface or ""),
                    provenance="rouge_iu",
                )
            )
    return AlignmentSet(topic_id, _dedupe(_sorted_pairs(pairs)))


def dedupe_pairs(pairs: list[AlignmentPair]) -> list[AlignmentPair]:
    seen = set()
    out = []
    for p in pairs:
        if p.key in seen:
            continue
        seen.add(p.key)
        out.append(p)
    return out


_dedupe = dedupe_pairs


# ---------------------------------------------------------------------------
# Lexical word alignment (stage 3 of the ensemble aligner)
# ---------------------------------------------------------------------------


def match_words(
    source_tokens: list[str], target_tokens: list[str]
) -> list[tuple[int, int]]:
    """Leftmost-greedy 1:1 word matching: exact, then lowercase, then stem.

    Returns (source_index, target_index) pairs; each target token is used
    at most once.
    """
    used: set[int] = set()
    matches: list[tuple[int, int]] = []

    def find(predicate) -> int | None:
        for j, tok in enumerate(target_tokens):
            if j not in used and predicate(tok):
                return j
        return None

    for i, src in enumerate(source_tokens):
        low = src.lower()
        stem = porter_stem(low)
        j = find(lambda t: t == src)
        if j is None:
            j = find(lambda t: t.lower() == low)
        if j is None:
            j = find(lambda t: porter_stem(t.lower()) == stem)
        if j is not None:
            used.add(j)
            matches.append((i, j))
    return matches


def _surface_range_to_span(
    mapping: list[int | None], start: int, end: int
) -> Span:
    """Project a [start, end) range of a surface string onto parent offsets."""
    indices = [mapping[i] for i in range(start, end) if mapping[i] is not None]
    ranges: list[tuple[int, int]] = []
    for idx in indices:
        if ranges and idx == ranges[-1][1]:
            ranges[-1] = (ranges[-1][0], idx + 1)
        else:
            ranges.append((idx, idx + 1))
    return Span(ranges)


def word_align_pair(
    summary_iu: InformationUnit,
    doc_id: str,
    sentence: Sentence,
    topic: Topic,
    min_token_ratio: float = DEFAULT_MIN_TOKEN_RATIO,
) -> AlignmentPair | None:
    """Word-align an IU to a candidate sentence and close the gaps.

    The aligned spans run from the first to the last matched word on each
    side. The pair is kept only if both gap-closed phrases contain at
    least ``min_token_ratio`` of the IU's token count.
    """
    summary_entry = topic.text_of(summary_iu.parent_id)
    surface, mapping = span_text_with_map(summary_iu.span, summary_entry.text)
    iu_tokens = tokenize_with_spans(surface)
    sent_tokens = tokenize_with_spans(sentence.text)
    if not iu_tokens or not sent_tokens:
        return None
    matches = match_words(
        [t.text for t in iu_tokens], [t.text for t in sent_tokens]
    )
    if not matches:
        return None
    iu_positions = [i for i, _ in matches]
    sent_positions = [j for _, j in matches]
    iu_lo, iu_hi = min(iu_positions), max(iu_positions)
    sent_lo, sent_hi = min(sent_positions), max(sent_positions)

    iu_phrase_tokens = iu_hi - iu_lo + 1
    sent_phrase_tokens = sent_hi - sent_lo + 1
    needed = min_token_ratio * len(iu_tokens)
    if iu_phrase_tokens < needed or sent_phrase_tokens < needed:
        return None

    summary_span = _surface_range_to_span(
        mapping, iu_tokens[iu_lo].start, iu_tokens[iu_hi].end
    )
    doc_span = Span(
        [
            (
                sentence.char_offset + sent_tokens[sent_lo].start,
                sentence.char_offset + sent_tokens[sent_hi].end,
            )
        ]
    )
    doc_entry = topic.document(doc_id)
    return AlignmentPair(
        summary_iu=InformationUnit.from_parent_text(
            summary_span, summary_iu.parent_id, summary_entry.text, summary_iu.sentence_index
        ),
        doc_iu=InformationUnit.from_parent_text(
            doc_span, doc_id, doc_entry.text, sentence.index
        ),
        provenance="sim_ensemble",
    )


def align_sim_ensemble(
    topic: Topic,
    summary_ius: list[InformationUnit],
    scorer: PairScorer,
    *,
    k: int = DEFAULT_CANDIDATES_K,
    min_token_ratio: float = DEFAULT_MIN_TOKEN_RATIO,
    policy: FilterPolicy | None = None,
    scores: list[CandidateScore] | None = None,
) -> AlignmentSet:
    """Similarity-ensemble aligner: filter, rank by R*B*E, word-align, accept.

    ``scores`` may be precomputed (e.g. shared with a filtering pass);
    otherwise every (IU, sentence) combination is scored via ``scorer``.
    """
    if scores is None:
        scores = score_candidates(summary_ius, topic_doc_sentences(topic), scorer)
    policy = policy or FilterPolicy()
    kept = list(automatic_filter(scores, policy).kept)
    pairs: list[AlignmentPair] = []
    for iu in summary_ius:
        for cs in top_candidates(iu, kept, k):
            pair = word_align_pair(iu, cs.doc_id, cs.sentence, topic, min_token_ratio)
            if pair is not None:
                pairs.append(pair)
    return AlignmentSet(topic.topic_id, _dedupe(_sorted_pairs(pairs)))


# ---------------------------------------------------------------------------
# Supervised aligner
# ---------------------------------------------------------------------------


def supervised_candidates(
    summary_ius: list[InformationUnit],
    doc_ius: list[InformationUnit],
    kept: list[CandidateScore],
) -> list[tuple[InformationUnit, InformationUnit]]:
    """(summary IU, doc IU) combinations whose sentence survived filtering."""
    surviving: set[tuple] = set()
    for cs in kept:
        surviving.add((cs.summary_iu.key, cs.doc_id, cs.sentence.index))
    out = []
    for iu in summary_ius:
        for doc_iu in doc_ius:
            if (iu.key, doc_iu.parent_id, doc_iu.sentence_index) in surviving:
                out.append((iu, doc_iu))
    return out


def align_supervised(
    topic_id: str,
    candidate_pairs: list[tuple[InformationUnit, InformationUnit]],
    scorer: PairScorer,
    threshold: float = DEFAULT_ALIGN_THRESHOLD,
) -> AlignmentSet:
    """Keep candidate pairs whose alignment probability clears the threshold."""
    if not 0.0 < threshold < 1.0:
        raise IntegrityError(f"threshold must lie in (0, 1), got {threshold}")
    if not candidate_pairs:
        return AlignmentSet(topic_id, ())
    texts = [(s.surface or "", d.surface or "") for s, d in candidate_pairs]
    scored = scorer.score_pairs(texts, ("align_prob",))
    pairs = []
    for (summary_iu, doc_iu), result in zip(candidate_pairs, scored):
        prob = result["align_prob"]
        if prob >= threshold:
            pairs.append(
                AlignmentPair(
                    summary_iu=summary_iu,
                    doc_iu=doc_iu,
                    probability=prob,
                    provenance="supervised",
                )
            )
    return AlignmentSet(topic_id, _dedupe(_sorted_pairs(pairs)))


# ---------------------------------------------------------------------------
# Sentence selection from span alignments
# ---------------------------------------------------------------------------


def select_salient_sentences(
    aligned: AlignmentSet,
    topic: Topic,
    *,
    weight: str = "chars",
) -> list[tuple[str, Sentence]]:
    """Choose document sentences by length-weighted alignment probability.

    Every pair must carry a probability. Sentences are scored by
    sum(prob_i * len_i) / sum(len_i) over their aligned document IUs and
    taken in descending order, skipping sentences that would add no new
    summary IU, until every aligned summary IU is covered.
    """
    if weight not in ("chars", "tokens"):
        raise IntegrityError(f"unknown weight kind {weight!r}")
    if not aligned.pairs:
        return []
    by_sentence: dict[tuple[str, int], list[AlignmentPair]] = {}
    for pair in aligned.pairs:
        if pair.probability is None:
            raise IntegrityError("select_salient_sentences requires pair probabilities")
        entry = topic.document(pair.doc_iu.parent_id)
        sent = (
            entry.sentences[pair.doc_iu.sentence_index]
            if 0 <= pair.doc_iu.sentence_index < len(entry.sentences)
            else entry.sentence_at(pair.doc_iu.span.start)
        )
        if sent is None:
            raise IntegrityError(
                f"document IU at {pair.doc_iu.span.ranges} lies in no sentence"
            )
        by_sentence.setdefault((pair.doc_iu.parent_id, sent.index), []).append(pair)

    def iu_length(pair: AlignmentPair) -> float:
        if weight == "chars":
            return float(len(pair.doc_iu.span))
        return float(len(tokenize_with_spans(pair.doc_iu.surface or "")))

    scored: list[tuple[float, str, int]] = []
    for (doc_id, sent_index), sentence_pairs in by_sentence.items():
        total = sum(iu_length(p) for p in sentence_pairs)
        weighted = sum((p.probability or 0.0) * iu_length(p) for p in sentence_pairs)
        score = weighted / total if total > 0 else 0.0
        scored.append((score, doc_id, sent_index))
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))

    all_summary_keys = {p.summary_iu.key for p in aligned.pairs}
    covered: set = set()
    selection: list[tuple[str, Sentence]] = []
    for _, doc_id, sent_index in scored:
        if covered == all_summary_keys:
            break
        added = {
            p.summary_iu.key for p in by_sentence[(doc_id, sent_index)]
        } - covered
        if not added:
            continue
        covered |= added
        selection.append((doc_id, topic.document(doc_id).sentences[sent_index]))
    return selection


# ---------------------------------------------------------------------------
# Sentence-level ROUGE baselines
# ---------------------------------------------------------------------------


def _collective_rouge(texts: list[str], summary_text: str) -> float:
    joined = " ".join(texts)
    return (
        rouge_text(joined, summary_text, "1").f1
        + rouge_text(joined, summary_text, "2").f1
    )


def align_rouge_full(
    doc_sentences: list[tuple[str, Sentence]], summary_text: str
) -> list[tuple[str, Sentence]]:
    """Greedy selection maximizing collective ROUGE-1+2 F1 vs the summary.

    The collective text concatenates the selected sentences in document
    order, so the measure does not depend on selection order. Stops when
    no remaining sentence strictly improves the score.
    """
    selected: list[int] = []
    best_score = 0.0
    remaining = list(range(len(doc_sentences)))
    while remaining:
        best_gain = None
        for idx in remaining:
            trial = sorted(selected + [idx])
            score = _collective_rouge(
                [doc_sentences[i][1].text for i in trial], summary_text
            )
            if score > best_score + 1e-12 and (
                best_gain is None or score > best_gain[0] + 1e-12
            ):
                best_gain = (score, idx)
        if best_gain is None:
            break
        best_score = best_gain[0]
        selected.append(best_gain[1])
        remaining.remove(best_gain[1])
    return [doc_sentences[i] for i in sorted(selected)]


def _sentence_iu(parent_id: str, sentence: Sentence) -> InformationUnit:
    return InformationUnit(
        span=Span([(sentence.char_offset, sentence.end)]),
        parent_id=parent_id,
        sentence_index=sentence.index,
        surface=sentence.text,
    )


def align_rouge_sent(
    topic_id: str,
    summary_id: str,
    summary_sentences: list[Sentence],
    doc_sentences: list[tuple[str, Sentence]],
    max_per: int = 2,
) -> AlignmentSet:
    """Align each summary sentence to its best one or two document sentences.

    Sentence-granularity pairs are expressed as whole-sentence IUs; the
    mean ROUGE-1/2/L F1 is stored as the pair probability.
    """
    if max_per not in (1, 2):
        raise IntegrityError(f"max_per must be 1 or 2, got {max_per}")
    pairs = []
    for summary_sent in summary_sentences:
        ranked = sorted(
            doc_sentences,
            key=lambda item: (
                -mean_rouge_f1(summary_sent.text, item[1].text),
                item[0],
                item[1].index,
            ),
        )
        for doc_id, doc_sent in ranked[:max_per]:
            pairs.append(
                AlignmentPair(
                    summary_iu=_sentence_iu(summary_id, summary_sent),
                    doc_iu=_sentence_iu(doc_id, doc_sent),
                    probability=mean_rouge_f1(summary_sent.text, doc_sent.text),
                    provenance="rouge_iu",
                )
            )
    return AlignmentSet(topic_id, _dedupe(_sorted_pairs(pairs)))


def salient_sentences_of(
    aligned: AlignmentSet, topic: Topic
) -> list[tuple[str, Sentence]]:
    """Union of document sentences touched by an alignment set, in doc order."""
    seen: set[tuple[str, int]] = set()
    for pair in aligned.pairs:
        entry = topic.document(pair.doc_iu.parent_id)
        sent = (
            entry.sentences[pair.doc_iu.sentence_index]
            if 0 <= pair.doc_iu.sentence_index < len(entry.sentences)
            else entry.sentence_at(pair.doc_iu.span.start)
        )
        if sent is not None:
            seen.add((pair.doc_iu.parent_id, sent.index))
    out = []
    for doc in topic.documents:
        for sent in doc.sentences:
            if (doc.text_id, sent.index) in seen:
                out.append((doc.text_id, sent))
    return out
