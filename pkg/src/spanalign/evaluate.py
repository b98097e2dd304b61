"""Multi-topic evaluation reports.

Per-topic metric rows plus a pooled ALL row: counts are summed across
topics (micro average), and the span-overlap averages pool the positive
per-pair scores of every topic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import AlignmentSet
from .metrics import (
    _matched_flags,
    _overlap_scores,
    char_jaccard,
    distinct_summary_ius,
    harmonic_mean,
    sentence_salience_eval,
)

REPORT_COLUMNS = (
    "set",
    "n_pred",
    "n_gold",
    "Rec_t",
    "Prec_t",
    "F1",
    "Cover_t",
    "F1_cover",
    "CoJac^T",
    "CoJac^P",
    "flags",
)


@dataclass(frozen=True)
class EvalRow:
    name: str
    n_pred: int
    n_gold: int
    recall: float
    precision: float
    f1: float
    coverage: float
    f1_cover: float
    cojac_t: float
    cojac_p: float
    flags: tuple[str, ...]


@dataclass
class _Tally:
    pred_total: int = 0
    pred_matched: int = 0
    gold_total: int = 0
    gold_matched: int = 0
    gold_ius: int = 0
    covered_ius: int = 0

    def __post_init__(self):
        self.positive_p: list[float] = []
        self.positive_t: list[float] = []


def _row_from_tally(name: str, tally: _Tally) -> EvalRow:
    flags = set()
    if tally.pred_total == 0:
        flags.add("empty_pred")
        precision = 0.0
    else:
        precision = 100.0 * tally.pred_matched / tally.pred_total
    if tally.gold_total == 0:
        flags.add("empty_gold")
        recall = 0.0
    else:
        recall = 100.0 * tally.gold_matched / tally.gold_total
    if tally.gold_ius == 0:
        cover = 0.0
    else:
        cover = 100.0 * tally.covered_ius / tally.gold_ius
    if not tally.positive_p:
        flags.add("no_positive_pred")
    if not tally.positive_t:
        flags.add("no_positive_gold")
    cojac_p = (
        100.0 * sum(tally.positive_p) / len(tally.positive_p) if tally.positive_p else 0.0
    )
    cojac_t = (
        100.0 * sum(tally.positive_t) / len(tally.positive_t) if tally.positive_t else 0.0
    )
    return EvalRow(
        name=name,
        n_pred=tally.pred_total,
        n_gold=tally.gold_total,
        recall=recall,
        precision=precision,
        f1=harmonic_mean(recall, precision),
        coverage=cover,
        f1_cover=harmonic_mean(cover, precision),
        cojac_t=cojac_t,
        cojac_p=cojac_p,
        flags=tuple(sorted(flags)),
    )


def _tally_topic(pred: AlignmentSet, gold: AlignmentSet, t: float) -> _Tally:
    tally = _Tally()
    pred_pairs, gold_pairs = list(pred.pairs), list(gold.pairs)
    tally.pred_total = len(pred_pairs)
    tally.gold_total = len(gold_pairs)
    tally.pred_matched = sum(_matched_flags(pred_pairs, gold_pairs, t))
    tally.gold_matched = sum(_matched_flags(gold_pairs, pred_pairs, t))
    tally.positive_p = [s for s in _overlap_scores(pred_pairs, gold_pairs, t) if s > 0]
    tally.positive_t = [s for s in _overlap_scores(gold_pairs, pred_pairs, t) if s > 0]
    gold_ius = distinct_summary_ius(gold)
    pred_ius = distinct_summary_ius(pred)
    tally.gold_ius = len(gold_ius)
    tally.covered_ius = sum(
        any(
            g.parent_id == p.parent_id and char_jaccard(g.span, p.span) >= t
            for p in pred_ius
        )
        for g in gold_ius
    )
    return tally


def evaluate_sets(
    preds: dict[str, AlignmentSet],
    golds: dict[str, AlignmentSet],
    t: float,
) -> list[EvalRow]:
    """Per-topic rows (sorted by topic id) followed by the pooled ALL row."""
    rows = []
    total = _Tally()
    for topic_id in sorted(set(preds) | set(golds)):
        pred = preds.get(topic_id, AlignmentSet(topic_id, ()))
        gold = golds.get(topic_id, AlignmentSet(topic_id, ()))
        tally = _tally_topic(pred, gold, t)
        rows.append(_row_from_tally(topic_id, tally))
        total.pred_total += tally.pred_total
        total.pred_matched += tally.pred_matched
        total.gold_total += tally.gold_total
        total.gold_matched += tally.gold_matched
        total.gold_ius += tally.gold_ius
        total.covered_ius += tally.covered_ius
        total.positive_p.extend(tally.positive_p)
        total.positive_t.extend(tally.positive_t)
    rows.append(_row_from_tally("ALL", total))
    return rows


def render_tsv(rows: list[EvalRow], t: float) -> str:
    lines = [f"# alignment evaluation, threshold t={t:g}"]
    lines.append("\t".join(REPORT_COLUMNS))
    for row in rows:
        lines.append(
            "\t".join(
                [
                    row.name,
                    str(row.n_pred),
                    str(row.n_gold),
                    f"{row.recall:.2f}",
                    f"{row.precision:.2f}",
                    f"{row.f1:.2f}",
                    f"{row.coverage:.2f}",
                    f"{row.f1_cover:.2f}",
                    f"{row.cojac_t:.2f}",
                    f"{row.cojac_p:.2f}",
                    ";".join(row.flags),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_json(rows: list[EvalRow], t: float) -> str:
    payload = {
        "threshold": t,
        "rows": [
            {
                "set": row.name,
                "n_pred": row.n_pred,
                "n_gold": row.n_gold,
                "Rec_t": row.recall,
                "Prec_t": row.precision,
                "F1": row.f1,
                "Cover_t": row.coverage,
                "F1_cover": row.f1_cover,
                "CoJac^T": row.cojac_t,
                "CoJac^P": row.cojac_p,
                "flags": list(row.flags),
            }
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Sentence-level salience report
# ---------------------------------------------------------------------------

SALIENCE_COLUMNS = ("set", "n_sentences", "token_precision", "iu_recall", "F1", "flags")


@dataclass(frozen=True)
class SalienceRow:
    name: str
    n_sentences: int
    token_precision: float
    iu_recall: float
    f1: float
    flags: tuple[str, ...]


def evaluate_sentence_selections(
    selections: dict[str, dict[str, list]],
    golds: dict[str, AlignmentSet],
    t: float,
) -> list[SalienceRow]:
    """Per-topic salience rows plus a sentence-count-weighted ALL row."""
    rows = []
    totals = {"tokens": 0, "aligned": 0, "ius": 0, "covered": 0, "sentences": 0}
    for topic_id in sorted(set(selections) | set(golds)):
        selected = selections.get(topic_id, {})
        gold = golds.get(topic_id, AlignmentSet(topic_id, ()))
        scores = sentence_salience_eval(selected, gold, t)
        n_sentences = sum(len(v) for v in selected.values())
        rows.append(
            SalienceRow(
                name=topic_id,
                n_sentences=n_sentences,
                token_precision=scores.token_precision,
                iu_recall=scores.iu_recall,
                f1=scores.f1,
                flags=tuple(sorted(scores.flags)),
            )
        )
        totals["tokens"] += scores.total_tokens
        totals["aligned"] += scores.aligned_tokens
        totals["ius"] += scores.total_ius
        totals["covered"] += scores.covered_ius
        totals["sentences"] += n_sentences
    flags = set()
    if totals["tokens"]:
        tp = 100.0 * totals["aligned"] / totals["tokens"]
    else:
        tp = 0.0
        flags.add("empty_selection")
    if totals["ius"]:
        ir = 100.0 * totals["covered"] / totals["ius"]
    else:
        ir = 0.0
        flags.add("empty_gold")
    rows.append(
        SalienceRow(
            name="ALL",
            n_sentences=totals["sentences"],
            token_precision=tp,
            iu_recall=ir,
            f1=harmonic_mean(tp, ir),
            flags=tuple(sorted(flags)),
        )
    )
    return rows


def render_salience_tsv(rows: list[SalienceRow], t: float) -> str:
    lines = [f"# sentence salience evaluation, threshold t={t:g}"]
    lines.append("\t".join(SALIENCE_COLUMNS))
    for row in rows:
        lines.append(
            "\t".join(
                [
                    row.name,
                    str(row.n_sentences),
                    f"{row.token_precision:.2f}",
                    f"{row.iu_recall:.2f}",
                    f"{row.f1:.2f}",
                    ";".join(row.flags),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_salience_json(rows: list[SalienceRow], t: float) -> str:
    payload = {
        "threshold": t,
        "rows": [
            {
                "set": row.name,
                "n_sentences": row.n_sentences,
                "token_precision": row.token_precision,
                "iu_recall": row.iu_recall,
                "F1": row.f1,
                "flags": list(row.flags),
            }
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
