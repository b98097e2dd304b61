"""Independent naive re-implementations used as test oracles.

Everything here deliberately avoids the library's interval arithmetic:
spans become literal Python sets of character indices, ROUGE counts come
from Fraction arithmetic over brute-force n-gram lists, and search
problems are solved by full enumeration. Slow and obviously correct.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction


def index_set(ranges) -> set[int]:
    out: set[int] = set()
    for s, e in ranges:
        out.update(range(s, e))
    return out


def naive_char_jaccard(ranges_a, ranges_b) -> float:
    a, b = index_set(ranges_a), index_set(ranges_b)
    return len(a & b) / len(a | b)


def _pair_sets(pair):
    """(summary parent, summary set, doc parent, doc set) of an AlignmentPair."""
    return (
        pair.summary_iu.parent_id,
        index_set(pair.summary_iu.span.ranges),
        pair.doc_iu.parent_id,
        index_set(pair.doc_iu.span.ranges),
    )


def naive_side_jaccards(p, t) -> tuple[float, float]:
    sp, ss, dp, ds = _pair_sets(p)
    tp, ts, tdp, tds = _pair_sets(t)
    r = len(ss & ts) / len(ss | ts) if sp == tp else 0.0
    d = len(ds & tds) / len(ds | tds) if dp == tdp else 0.0
    return r, d


def naive_joint_jaccard(p, t) -> float:
    sp, ss, dp, ds = _pair_sets(p)
    tp, ts, tdp, tds = _pair_sets(t)
    if sp != tp or dp != tdp:
        return 0.0
    return (len(ss & ts) + len(ds & tds)) / (len(ss | ts) + len(ds | tds))


def naive_extended_recall_precision(pred_pairs, gold_pairs, t):
    """(recall, precision) percentages; None marks an undefined side."""

    def matched(side, other):
        count = 0
        for p in side:
            for q in other:
                r, d = naive_side_jaccards(p, q)
                if r >= t and d >= t:
                    count += 1
                    break
        return count

    precision = (
        100.0 * matched(pred_pairs, gold_pairs) / len(pred_pairs) if pred_pairs else None
    )
    recall = (
        100.0 * matched(gold_pairs, pred_pairs) / len(gold_pairs) if gold_pairs else None
    )
    return recall, precision


def naive_cojac(pred_pairs, gold_pairs, t):
    """(cojac_T, cojac_P) percentages; None when no positive scores exist."""

    def scores(side, other):
        out = []
        for p in side:
            gated = any(
                r >= t or d >= t
                for r, d in (naive_side_jaccards(p, q) for q in other)
            )
            best = max((naive_joint_jaccard(p, q) for q in other), default=0.0)
            out.append(best if gated else 0.0)
        return [s for s in out if s > 0.0]

    pos_p = scores(pred_pairs, gold_pairs)
    pos_t = scores(gold_pairs, pred_pairs)
    cojac_p = 100.0 * sum(pos_p) / len(pos_p) if pos_p else None
    cojac_t = 100.0 * sum(pos_t) / len(pos_t) if pos_t else None
    return cojac_t, cojac_p


def naive_coverage(pred_pairs, gold_pairs, t):
    """Coverage percentage over distinct gold summary IUs; None if no gold."""
    gold_ius = {}
    for p in gold_pairs:
        gold_ius[(p.summary_iu.parent_id, p.summary_iu.span.ranges)] = p.summary_iu
    pred_ius = {}
    for p in pred_pairs:
        pred_ius[(p.summary_iu.parent_id, p.summary_iu.span.ranges)] = p.summary_iu
    if not gold_ius:
        return None
    covered = 0
    for (gp, granges), _ in gold_ius.items():
        gset = index_set(granges)
        for (pp, pranges), _ in pred_ius.items():
            if gp != pp:
                continue
            pset = index_set(pranges)
            if len(gset & pset) / len(gset | pset) >= t:
                covered += 1
                break
    return 100.0 * covered / len(gold_ius)


# ---------------------------------------------------------------------------
# ROUGE
# ---------------------------------------------------------------------------


def naive_rouge_n(candidate: list[str], reference: list[str], n: int):
    """(recall, precision, f1) as Fractions; zero denominators give 0."""
    cand = [tuple(candidate[i : i + n]) for i in range(len(candidate) - n + 1)]
    ref = [tuple(reference[i : i + n]) for i in range(len(reference) - n + 1)]
    ref_counts = Counter(ref)
    hits = 0
    for gram, count in Counter(cand).items():
        hits += min(count, ref_counts.get(gram, 0))
    precision = Fraction(hits, len(cand)) if cand else Fraction(0)
    recall = Fraction(hits, len(ref)) if ref else Fraction(0)
    denom = precision + recall
    f1 = 2 * precision * recall / denom if denom else Fraction(0)
    return recall, precision, f1


def naive_lcs(a: list[str], b: list[str]) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def naive_rouge_l(candidate: list[str], reference: list[str]):
    lcs = naive_lcs(candidate, reference)
    precision = Fraction(lcs, len(candidate)) if candidate else Fraction(0)
    recall = Fraction(lcs, len(reference)) if reference else Fraction(0)
    denom = precision + recall
    f1 = 2 * precision * recall / denom if denom else Fraction(0)
    return recall, precision, f1


# ---------------------------------------------------------------------------
# Search oracles
# ---------------------------------------------------------------------------


def exhaustive_best_subset(sentence_texts: list[str], summary_text: str, score_fn):
    """Enumerate every subset; return (best subset indices, best score).

    Ties prefer fewer sentences, then lexicographically smaller index
    tuples, mirroring a greedy that stops on no strict improvement.
    """
    best = ((), 0.0)
    for size in range(len(sentence_texts) + 1):
        for combo in itertools.combinations(range(len(sentence_texts)), size):
            score = score_fn([sentence_texts[i] for i in combo], summary_text)
            if score > best[1] + 1e-12:
                best = (combo, score)
    return best


def brute_force_transitive_join(
    scu_links, extractive_links, sys_entries, doc_entries
):
    """Relational join computed per character.

    For each (ref span, sys span) link and each extractive link, every
    sys-span character falling inside the linked system sentence maps to
    the document sentence at the same intra-sentence offset. Characters
    are regrouped per (ref span, doc id, doc sentence) to form the
    expected pair set.
    """
    results = set()
    for link in scu_links:
        sys_entry = sys_entries[link.sys_id]
        by_target: dict[tuple[str, int], set[int]] = {}
        for ext in extractive_links:
            if ext.sys_id != link.sys_id:
                continue
            sys_sent = sys_entry.sentences[ext.sys_sentence_index]
            doc_sent = doc_entries[ext.doc_id].sentences[ext.doc_sentence_index]
            for char_index in index_set(link.sys_span.ranges):
                if sys_sent.char_offset <= char_index < sys_sent.end:
                    delta = doc_sent.char_offset - sys_sent.char_offset
                    by_target.setdefault(
                        (ext.doc_id, ext.doc_sentence_index), set()
                    ).add(char_index + delta)
        for (doc_id, _), chars in by_target.items():
            if chars:
                results.add(
                    (
                        link.ref_id,
                        frozenset(index_set(link.ref_span.ranges)),
                        doc_id,
                        frozenset(chars),
                    )
                )
    return results


def recount_stats(alignment_sets_with_topics):
    """Independent recount of the dataset statistics table."""
    import math

    n_alignments = 0
    salient = set()
    clusters: dict[tuple, set] = {}
    pivot_sentence: dict[tuple, tuple] = {}
    for aligned, topic in alignment_sets_with_topics:
        for pair in aligned.pairs:
            n_alignments += 1
            salient.add((aligned.topic_id, pair.doc_iu.parent_id, pair.doc_iu.span.ranges))
            pivot = (aligned.topic_id, pair.summary_iu.parent_id, pair.summary_iu.span.ranges)
            clusters.setdefault(pivot, set()).add(
                (pair.doc_iu.parent_id, pair.doc_iu.span.ranges)
            )
            entry = topic.summary(pair.summary_iu.parent_id)
            start = pair.summary_iu.span.ranges[0][0]
            for sent in entry.sentences:
                if sent.char_offset <= start < sent.char_offset + len(sent.text):
                    pivot_sentence[pivot] = (aligned.topic_id, entry.text_id, sent.index)
                    break

    sizes = [len(members) for members in clusters.values()]
    per_sent: Counter = Counter(pivot_sentence.values())
    sent_counts = list(per_sent.values())

    def mean(values):
        return sum(values) / len(values) if values else 0.0

    def std(values):
        if not values:
            return 0.0
        m = mean(values)
        return math.sqrt(sum((v - m) ** 2 for v in values) / len(values))

    return {
        "n_alignments": n_alignments,
        "n_salient_ius": len(salient),
        "n_clusters": len(clusters),
        "cluster_size_mean": mean(sizes),
        "cluster_size_std": std(sizes),
        "clusters_per_sentence_mean": mean(sent_counts),
        "clusters_per_sentence_std": std(sent_counts),
    }


def independent_sentence_selection(aligned, topic):
    """Re-derivation of greedy salient-sentence selection, written set-cover
    style over explicit score tables."""
    table = {}
    for pair in aligned.pairs:
        entry = topic.document(pair.doc_iu.parent_id)
        sent = None
        for candidate in entry.sentences:
            if candidate.char_offset <= pair.doc_iu.span.ranges[0][0] < candidate.end:
                sent = candidate
                break
        if pair.doc_iu.sentence_index >= 0:
            sent = entry.sentences[pair.doc_iu.sentence_index]
        key = (pair.doc_iu.parent_id, sent.index)
        table.setdefault(key, []).append(pair)

    def score(key):
        pairs = table[key]
        lengths = [sum(e - s for s, e in p.doc_iu.span.ranges) for p in pairs]
        return sum(p.probability * l for p, l in zip(pairs, lengths)) / sum(lengths)

    ordering = sorted(table, key=lambda key: (-score(key), key[0], key[1]))
    need = {
        (p.summary_iu.parent_id, p.summary_iu.span.ranges) for p in aligned.pairs
    }
    have = set()
    chosen = []
    for key in ordering:
        if have >= need:
            break
        gives = {
            (p.summary_iu.parent_id, p.summary_iu.span.ranges) for p in table[key]
        }
        if gives - have:
            have |= gives
            chosen.append(key)
    return chosen
