"""Command-line entry point.

Subcommands: extract, filter, align, eval, aggregate, derive, stats.
Option precedence is flags > config file > built-in defaults. Every run
logs its resolved configuration and seed. Exit codes: 0 success, 1 usage
error, 2 data integrity error, 3 scorer/transport error.
"""

from __future__ import annotations

import argparse
import functools
import json
import logging
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import aggregation, aligners, derive, derive_io, evaluate, extraction, figures, filtering
from .corpus import AlignmentPair, AlignmentSet, InformationUnit, Span, Topic
from .corpus_io import load_alignments, load_topics, save_alignments
from .errors import IntegrityError, ParseError, ScorerError, SpanAlignError, UsageError
from .scorers import FileScorer, HttpScorer, PairScorer, save_pair_requests

logger = logging.getLogger("spanalign")

SCORER_URL_ENV = "SPANALIGN_SCORER_URL"

DEFAULTS = {
    "seed": 13,
    "jobs": 1,
    "threshold": 0.25,
    "k": None,  # per-method default
    "report": "tsv",
    "max_per": 2,
    "align_threshold": 0.5,
    "min_token_ratio": 0.30,
    "damping": 0.9,
    "max_iter": 200,
    "convergence_iter": 15,
    "jaccard_threshold": 0.25,
    "similarity_threshold": 0.89,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spanalign", description=__doc__)
    parser.add_argument("--config", help="JSON config file with option defaults")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None, help="parallel workers across topics")
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract IUs from topic texts")
    p.add_argument("--in", dest="topics", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("heuristic", "import"), default="heuristic")
    p.add_argument("--ius-file", help="externally extracted IUs (import mode)")

    p = sub.add_parser("filter", help="score and filter candidate pairs")
    p.add_argument("--in", dest="topics", required=True)
    p.add_argument("--ius", help="IU JSONL; omitted: heuristic extraction")
    p.add_argument("--scores-file")
    p.add_argument("--scorer-url")
    p.add_argument("--policy", help="JSON file with filter thresholds")
    p.add_argument("--gold", help="gold alignments for recall diagnostics")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", help="surviving-pair JSONL")
    p.add_argument("--diagnostics", help="per-topic diagnostics TSV")
    p.add_argument("--dump-pairs", help="write scorer pair requests and exit")
    p.add_argument("--calibrate", action="store_true", help="grid-search a policy against --gold")
    p.add_argument("--target-reduction", type=float, default=0.71)
    p.add_argument("--target-recall", type=float, default=0.90)

    p = sub.add_parser("align", help="produce span or sentence alignments")
    p.add_argument("--in", dest="topics", required=True)
    p.add_argument(
        "--method",
        required=True,
        choices=("rouge-iu", "sim-ensemble", "supervised", "rouge-full", "rouge-sent"),
    )
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None, help="supervised probability cutoff")
    p.add_argument("--max-per", type=int, default=None, help="rouge-sent sentences per summary sentence")
    p.add_argument("--ius", help="IU JSONL; omitted: heuristic extraction")
    p.add_argument("--scores-file")
    p.add_argument("--scorer-url")
    p.add_argument("--policy")
    p.add_argument("--out", required=True)
    p.add_argument("--sentences-out", help="also write selected salient sentences")
    p.add_argument("--dump-pairs", help="write scorer pair requests and exit")

    p = sub.add_parser("eval", help="evaluate alignments or sentence selections")
    p.add_argument("--pred")
    p.add_argument("--gold", required=True)
    p.add_argument("--sentences", help="sentence-selection JSONL (sentence-level mode)")
    p.add_argument("--topics", help="topic file (required for sentence-level mode)")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--report", choices=("tsv", "json"), default=None)
    p.add_argument("--out", help="report path; stdout when omitted")
    p.add_argument("--figures", help="directory for rendered figures")

    p = sub.add_parser("aggregate", help="consensus over worker span annotations")
    p.add_argument("--in", dest="annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--topics", help="optional topic file for validation/enrichment")
    p.add_argument("--damping", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--convergence-iter", type=int, default=None)
    p.add_argument("--preference", type=float, default=None)

    p = sub.add_parser("derive", help="derive datasets from alignments")
    p.add_argument(
        "--task",
        required=True,
        choices=(
            "salience", "clusters", "plans", "fusion", "ordering",
            "pyramid", "train-pairs", "stats",
        ),
    )
    _add_derive_options(p)

    p = sub.add_parser("stats", help="dataset statistics (derive --task stats)")
    _add_derive_options(p)

    return parser


def _add_derive_options(p) -> None:
    p.add_argument("--alignments")
    p.add_argument("--topics")
    p.add_argument("--out")
    p.add_argument("--report", choices=("tsv", "json"), default=None)
    p.add_argument("--figures")
    p.add_argument("--system-summaries")
    p.add_argument("--scu-links")
    p.add_argument("--extractive-links")
    p.add_argument("--ius")
    p.add_argument("--scores-file")
    p.add_argument("--scorer-url")
    p.add_argument("--jaccard-threshold", type=float, default=None)
    p.add_argument("--similarity-threshold", type=float, default=None)


class Config:
    """Option resolution: CLI flag, then config file, then built-in default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file_config: dict = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                try:
                    self.file_config = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid config JSON ({exc.msg})", args.config) from exc
            if not isinstance(self.file_config, dict):
                raise ParseError("config must be a JSON object", args.config)

    def get(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.file_config.get(name)
        if value is None:
            value = DEFAULTS.get(name, default) if default is None else default
        return value

    def resolved(self, names: list[str]) -> dict:
        return {name: self.get(name) for name in names}


def _load_policy(cfg: Config) -> filtering.FilterPolicy:
    path = cfg.get("policy", default="")
    data = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    elif isinstance(cfg.file_config.get("policy"), dict):
        data = cfg.file_config["policy"]
    allowed = {"min_rouge", "min_similarity", "min_entailment"}
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(f"unknown policy keys: {sorted(unknown)}")
    return filtering.FilterPolicy(**data)


def _resolve_scorer_spec(cfg: Config) -> tuple[str | None, str | None]:
    scores_file = cfg.get("scores_file", default="") or None
    scorer_url = cfg.get("scorer_url", default="") or os.environ.get(SCORER_URL_ENV) or None
    return scores_file, scorer_url


def _make_scorer(spec: tuple[str | None, str | None]) -> PairScorer:
    scores_file, scorer_url = spec
    if scores_file:
        return FileScorer(scores_file)
    if scorer_url:
        return HttpScorer(scorer_url)
    raise ScorerError(
        f"no scorer configured: pass --scores-file, --scorer-url, or set ${SCORER_URL_ENV}"
    )


def _topic_ius(
    topic: Topic, imported: dict[str, dict[str, list[InformationUnit]]] | None
) -> dict[str, list[InformationUnit]]:
    if imported is None:
        return extraction.extract_topic_ius(topic)
    return imported.get(topic.topic_id, {})


def _summary_ius(ius_by_text: dict, topic: Topic) -> list[InformationUnit]:
    out = []
    for entry in topic.summaries:
        out.extend(ius_by_text.get(entry.text_id, []))
    return out


def _doc_ius(ius_by_text: dict, topic: Topic) -> list[InformationUnit]:
    out = []
    for entry in topic.documents:
        out.extend(ius_by_text.get(entry.text_id, []))
    return out


def _map_topics(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------


def _cmd_extract(cfg: Config) -> int:
    args = cfg.args
    topics = load_topics(args.topics)
    if args.mode == "import":
        if not args.ius_file:
            raise UsageError("--mode import requires --ius-file")
        by_topic = extraction.import_ius(args.ius_file, {t.topic_id: t for t in topics})
    else:
        jobs = int(cfg.get("jobs"))
        results = _map_topics(extraction.extract_topic_ius, topics, jobs)
        by_topic = {t.topic_id: r for t, r in zip(topics, results)}
    extraction.save_ius(by_topic, args.out)
    n = sum(len(v) for per_text in by_topic.values() for v in per_text.values())
    logger.info("extracted %d IUs from %d topics -> %s", n, len(topics), args.out)
    return 0


# ---------------------------------------------------------------------------
# filter
# ---------------------------------------------------------------------------


def _survivor_record(topic_id: str, cs: filtering.CandidateScore) -> dict:
    return {
        "topic_id": topic_id,
        "summary_id": cs.summary_iu.parent_id,
        "summary_span": [list(r) for r in cs.summary_iu.span.ranges],
        "doc_id": cs.doc_id,
        "doc_sentence_index": cs.sentence.index,
        "rouge1_precision": round(cs.rouge1_precision, 6),
        "similarity": round(cs.similarity, 6),
        "entailment": round(cs.entailment, 6),
    }


def _candidate_pair_texts(topic: Topic, ius_by_text: dict) -> list[tuple[str, str]]:
    pairs = []
    sents = filtering.topic_doc_sentences(topic)
    for iu in _summary_ius(ius_by_text, topic):
        for _, sent in sents:
            pairs.append((iu.surface or "", sent.text))
    return pairs


def _cmd_filter(cfg: Config) -> int:
    args = cfg.args
    topics = load_topics(args.topics)
    topic_map = {t.topic_id: t for t in topics}
    imported = extraction.import_ius(args.ius, topic_map) if args.ius else None
    policy = _load_policy(cfg)
    threshold = float(cfg.get("threshold"))

    if args.dump_pairs:
        requests = []
        for topic in topics:
            requests.extend(_candidate_pair_texts(topic, _topic_ius(topic, imported)))
        n = save_pair_requests(requests, ("similarity", "entailment"), args.dump_pairs)
        logger.info("wrote %d pair requests -> %s", n, args.dump_pairs)
        return 0

    scorer = _make_scorer(_resolve_scorer_spec(cfg))
    golds = load_alignments(args.gold, topic_map) if args.gold else {}

    if args.calibrate:
        if not args.gold:
            raise UsageError("--calibrate requires --gold")
        all_scores = []
        all_gold_pairs = []
        for topic in topics:
            ius_by_text = _topic_ius(topic, imported)
            all_scores.extend(
                filtering.score_candidates(
                    _summary_ius(ius_by_text, topic),
                    filtering.topic_doc_sentences(topic),
                    scorer,
                )
            )
            if topic.topic_id in golds:
                all_gold_pairs.extend(golds[topic.topic_id].pairs)
        gold_set = AlignmentSet("calibration", all_gold_pairs)
        result = filtering.calibrate(
            all_scores,
            gold_set,
            target_reduction=args.target_reduction,
            target_recall=args.target_recall,
            t=threshold,
        )
        payload = {
            "policy": {
                "min_rouge": result.policy.min_rouge,
                "min_similarity": result.policy.min_similarity,
                "min_entailment": result.policy.min_entailment,
            },
            "reduction": result.reduction,
            "recall": result.recall,
            "meets_targets": result.meets_targets,
        }
        text = json.dumps(payload, indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0

    if not args.out:
        raise UsageError("filter requires --out (or --dump-pairs / --calibrate)")
    survivor_records = []
    diag_lines = ["topic\ttotal\tkept\treduction\trecall\tflags"]
    for topic in topics:
        ius_by_text = _topic_ius(topic, imported)
        scores = filtering.score_candidates(
            _summary_ius(ius_by_text, topic), filtering.topic_doc_sentences(topic), scorer
        )
        result = filtering.automatic_filter(
            scores, policy, gold=golds.get(topic.topic_id), t=threshold
        )
        survivor_records.extend(_survivor_record(topic.topic_id, cs) for cs in result.kept)
        recall = "" if result.recall is None else f"{result.recall:.4f}"
        diag_lines.append(
            f"{topic.topic_id}\t{result.total}\t{len(result.kept)}"
            f"\t{result.reduction:.4f}\t{recall}\t{';'.join(sorted(result.flags))}"
        )
    derive_io.write_jsonl(survivor_records, args.out)
    if args.diagnostics:
        Path(args.diagnostics).write_text("\n".join(diag_lines) + "\n", encoding="utf-8")
    logger.info("kept %d candidate pairs -> %s", len(survivor_records), args.out)
    return 0


# ---------------------------------------------------------------------------
# align
# ---------------------------------------------------------------------------


def _align_one_topic(item: tuple, method: str, params: dict, scorer_spec) -> tuple:
    """Worker: returns (topic_id, AlignmentSet | sentence rows, selection rows)."""
    topic, ius_by_text = item
    selection = None
    if method == "rouge-full":
        rows = []
        for summary in topic.summaries:
            chosen = aligners.align_rouge_full(
                filtering.topic_doc_sentences(topic), summary.text
            )
            rows.extend(
                {
                    "topic_id": topic.topic_id,
                    "summary_id": summary.text_id,
                    "doc_id": doc_id,
                    "sentence_index": sent.index,
                    "text": sent.text,
                }
                for doc_id, sent in chosen
            )
        return topic.topic_id, rows, None

    if method == "rouge-sent":
        pairs = []
        for summary in topic.summaries:
            aset = aligners.align_rouge_sent(
                topic.topic_id,
                summary.text_id,
                list(summary.sentences),
                filtering.topic_doc_sentences(topic),
                max_per=params["max_per"],
            )
            pairs.extend(aset.pairs)
        aligned = AlignmentSet(topic.topic_id, aligners.dedupe_pairs(pairs))
    elif method == "rouge-iu":
        aligned = aligners.align_rouge_iu(
            topic.topic_id,
            _summary_ius(ius_by_text, topic),
            _doc_ius(ius_by_text, topic),
            k=params["k"],
        )
    elif method == "sim-ensemble":
        scorer = _make_scorer(scorer_spec)
        aligned = aligners.align_sim_ensemble(
            topic,
            _summary_ius(ius_by_text, topic),
            scorer,
            k=params["k"],
            min_token_ratio=params["min_token_ratio"],
            policy=params["policy"],
        )
    elif method == "supervised":
        scorer = _make_scorer(scorer_spec)
        scores = filtering.score_candidates(
            _summary_ius(ius_by_text, topic), filtering.topic_doc_sentences(topic), scorer
        )
        kept = filtering.automatic_filter(scores, params["policy"]).kept
        candidates = aligners.supervised_candidates(
            _summary_ius(ius_by_text, topic), _doc_ius(ius_by_text, topic), list(kept)
        )
        aligned = aligners.align_supervised(
            topic.topic_id, candidates, scorer, threshold=params["align_threshold"]
        )
    else:  # pragma: no cover
        raise UsageError(f"unknown method {method!r}")

    if params.get("select_sentences"):
        chosen = aligners.select_salient_sentences(aligned, topic)
        selection = [
            {
                "topic_id": topic.topic_id,
                "doc_id": doc_id,
                "sentence_index": sent.index,
                "text": sent.text,
            }
            for doc_id, sent in chosen
        ]
    return topic.topic_id, aligned, selection


def _cmd_align(cfg: Config) -> int:
    args = cfg.args
    topics = load_topics(args.topics)
    topic_map = {t.topic_id: t for t in topics}
    imported = extraction.import_ius(args.ius, topic_map) if args.ius else None
    method = args.method
    k_default = (
        aligners.DEFAULT_ROUGE_IU_K if method == "rouge-iu" else aligners.DEFAULT_CANDIDATES_K
    )
    params = {
        "k": int(cfg.get("k", default=k_default) or k_default),
        "max_per": int(cfg.get("max_per")),
        "align_threshold": float(
            args.threshold if args.threshold is not None else cfg.get("align_threshold")
        ),
        "min_token_ratio": float(cfg.get("min_token_ratio")),
        "policy": _load_policy(cfg),
        "select_sentences": bool(args.sentences_out) and method != "rouge-full",
    }
    scorer_spec = _resolve_scorer_spec(cfg)

    if args.dump_pairs:
        requests = []
        for topic in topics:
            ius_by_text = _topic_ius(topic, imported)
            texts = _candidate_pair_texts(topic, ius_by_text)
            requests.extend((a, b, ("similarity", "entailment")) for a, b in texts)
            if method == "supervised":
                for s in _summary_ius(ius_by_text, topic):
                    for d in _doc_ius(ius_by_text, topic):
                        requests.append((s.surface or "", d.surface or "", ("align_prob",)))
        n = save_pair_requests(requests, None, args.dump_pairs)
        logger.info("wrote %d pair requests -> %s", n, args.dump_pairs)
        return 0

    jobs = int(cfg.get("jobs"))
    items = [(t, _topic_ius(t, imported)) for t in topics]
    worker = functools.partial(
        _align_one_topic, method=method, params=params, scorer_spec=scorer_spec
    )
    results = _map_topics(worker, items, jobs)
    results.sort(key=lambda r: r[0])

    if method == "rouge-full":
        rows = [row for _, topic_rows, _ in results for row in topic_rows]
        derive_io.write_jsonl(rows, args.out)
        logger.info("selected %d sentences -> %s", len(rows), args.out)
        return 0

    alignment_sets = [aligned for _, aligned, _ in results]
    save_alignments(alignment_sets, args.out)
    n_pairs = sum(len(a.pairs) for a in alignment_sets)
    logger.info("aligned %d pairs over %d topics -> %s", n_pairs, len(topics), args.out)
    if args.sentences_out:
        rows = [row for _, _, selection in results for row in (selection or [])]
        derive_io.write_jsonl(rows, args.sentences_out)
        logger.info("selected %d sentences -> %s", len(rows), args.sentences_out)
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _load_sentence_selection(path: str, topic_map: dict[str, Topic]):
    selections: dict[str, dict[str, list]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", path, lineno) from exc
            for key in ("topic_id", "doc_id", "sentence_index"):
                if key not in record:
                    raise ParseError(f"missing field {key!r}", path, lineno)
            topic_id = str(record["topic_id"])
            if topic_id not in topic_map:
                raise IntegrityError(f"{path}:{lineno}: unknown topic {topic_id!r}")
            entry = topic_map[topic_id].document(str(record["doc_id"]))
            index = int(record["sentence_index"])
            if not 0 <= index < len(entry.sentences):
                raise IntegrityError(f"{path}:{lineno}: sentence index {index} out of range")
            selections.setdefault(topic_id, {}).setdefault(entry.text_id, []).append(
                entry.sentences[index]
            )
    return selections


def _write_report(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_eval(cfg: Config) -> int:
    args = cfg.args
    threshold = float(cfg.get("threshold"))
    report = cfg.get("report")
    topic_map = None
    if args.topics:
        topic_map = {t.topic_id: t for t in load_topics(args.topics)}

    if args.sentences:
        if topic_map is None:
            raise UsageError("sentence-level eval requires --topics")
        golds = load_alignments(args.gold, topic_map)
        selections = _load_sentence_selection(args.sentences, topic_map)
        rows = evaluate.evaluate_sentence_selections(selections, golds, threshold)
        text = (
            evaluate.render_salience_tsv(rows, threshold)
            if report == "tsv"
            else evaluate.render_salience_json(rows, threshold)
        )
        _write_report(text, args.out)
        if args.figures:
            out_dir = Path(args.figures)
            out_dir.mkdir(parents=True, exist_ok=True)
            figures.salience_report_figure(rows, out_dir / "salience_metrics.png")
        return 0

    if not args.pred:
        raise UsageError("eval requires --pred (or --sentences for sentence-level mode)")
    preds = load_alignments(args.pred, topic_map)
    golds = load_alignments(args.gold, topic_map)
    rows = evaluate.evaluate_sets(preds, golds, threshold)
    text = (
        evaluate.render_tsv(rows, threshold)
        if report == "tsv"
        else evaluate.render_json(rows, threshold)
    )
    _write_report(text, args.out)
    if args.figures:
        out_dir = Path(args.figures)
        out_dir.mkdir(parents=True, exist_ok=True)
        figures.eval_report_figure(rows, out_dir / "eval_metrics.png")
    return 0


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------


def _cmd_aggregate(cfg: Config) -> int:
    args = cfg.args
    seed = int(cfg.get("seed"))
    params = aggregation.APParams(
        damping=float(cfg.get("damping")),
        max_iter=int(cfg.get("max_iter")),
        convergence_iter=int(cfg.get("convergence_iter")),
        preference=args.preference,
        jitter=1e-9,
        seed=seed,
    )
    topic_map = None
    if args.topics:
        topic_map = {t.topic_id: t for t in load_topics(args.topics)}

    grouped: dict[tuple[str, str], list[AlignmentPair]] = {}
    with open(args.annotations, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", args.annotations, lineno) from exc
            for key in ("topic_id", "candidate_id", "worker_id", "summary_id",
                        "summary_span", "doc_id", "doc_span"):
                if key not in record:
                    raise ParseError(f"missing field {key!r}", args.annotations, lineno)
            topic_id = str(record["topic_id"])
            if topic_map is not None and topic_id not in topic_map:
                raise IntegrityError(f"{args.annotations}:{lineno}: unknown topic {topic_id!r}")
            summary_iu = InformationUnit(
                span=Span(record["summary_span"]), parent_id=str(record["summary_id"])
            )
            doc_iu = InformationUnit(
                span=Span(record["doc_span"]), parent_id=str(record["doc_id"])
            )
            if topic_map is not None:
                topic = topic_map[topic_id]
                summary_iu.span.check_within(len(topic.summary(summary_iu.parent_id).text))
                doc_iu.span.check_within(len(topic.document(doc_iu.parent_id).text))
            pair = AlignmentPair(summary_iu=summary_iu, doc_iu=doc_iu, provenance="annotated")
            grouped.setdefault((topic_id, str(record["candidate_id"])), []).append(pair)

    consensus: dict[str, list[AlignmentPair]] = {}
    for (topic_id, candidate_id) in sorted(grouped):
        rng = random.Random(f"{seed}:{topic_id}:{candidate_id}")
        chosen = aggregation.aggregate_span_annotations(
            grouped[(topic_id, candidate_id)], rng=rng, params=params
        )
        if chosen is not None:
            consensus.setdefault(topic_id, []).append(chosen)

    alignment_sets = []
    for topic_id in sorted(consensus):
        seen = set()
        unique = []
        for pair in consensus[topic_id]:
            if pair.key in seen:
                continue
            seen.add(pair.key)
            unique.append(pair)
        alignment_sets.append(AlignmentSet(topic_id, unique))
    save_alignments(alignment_sets, args.out)
    n = sum(len(a.pairs) for a in alignment_sets)
    logger.info("aggregated %d candidates into %d pairs -> %s", len(grouped), n, args.out)
    return 0


# ---------------------------------------------------------------------------
# derive
# ---------------------------------------------------------------------------


def _require_args(args, names: list[str], task: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if not getattr(args, n)]
    if missing:
        raise UsageError(f"derive --task {task} requires {', '.join(missing)}")


def _cmd_derive(cfg: Config) -> int:
    args = cfg.args
    task = getattr(args, "task", "stats")
    seed = int(cfg.get("seed"))

    if task == "pyramid":
        _require_args(
            args, ["topics", "system_summaries", "scu_links", "extractive_links", "out"], task
        )
        topics = load_topics(args.topics)
        sys_by_topic = derive_io.load_system_summaries(args.system_summaries)
        scu_by_topic = derive_io.load_scu_links(args.scu_links)
        ext_by_topic = derive_io.load_extractive_links(args.extractive_links)
        alignment_sets = []
        skipped = 0
        for topic in topics:
            result = derive.pyramid_transitive_align(
                topic,
                sys_by_topic.get(topic.topic_id, {}),
                scu_by_topic.get(topic.topic_id, []),
                ext_by_topic.get(topic.topic_id, []),
            )
            skipped += result.skipped_links
            alignment_sets.append(result.alignments)
        save_alignments(alignment_sets, args.out)
        n = sum(len(a.pairs) for a in alignment_sets)
        logger.info("derived %d transitive pairs (%d links skipped) -> %s", n, skipped, args.out)
        return 0

    _require_args(args, ["alignments", "topics"], task)
    topics = load_topics(args.topics)
    topic_map = {t.topic_id: t for t in topics}
    aligned_by_topic = load_alignments(args.alignments, topic_map)
    items = [
        (aligned_by_topic[t.topic_id], t)
        for t in topics
        if t.topic_id in aligned_by_topic
    ]

    if task == "stats":
        stats = derive.dataset_stats(items)
        report = cfg.get("report")
        text = (
            derive_io.render_stats_tsv(stats)
            if report == "tsv"
            else derive_io.render_stats_json(stats)
        )
        _write_report(text, args.out)
        if args.figures:
            out_dir = Path(args.figures)
            out_dir.mkdir(parents=True, exist_ok=True)
            sizes = []
            per_sent = []
            for aligned, topic in items:
                clusters = derive.derive_clusters(aligned)
                sizes.extend(len(c.members) for c in clusters)
                per_sent.extend(
                    len(p.clusters) for p in derive.derive_sentence_planning(clusters, topic)
                )
            figures.stats_figures(sizes, per_sent, out_dir)
        return 0

    _require_args(args, ["out"], task)
    records: list[dict] = []
    if task == "train-pairs":
        imported = extraction.import_ius(args.ius, topic_map) if args.ius else None
        scores_file, scorer_url = _resolve_scorer_spec(cfg)
        scorer = _make_scorer((scores_file, scorer_url)) if (scores_file or scorer_url) else None
        for aligned, topic in items:
            ius_by_text = _topic_ius(topic, imported)
            pairs = derive.build_training_pairs(
                aligned,
                _summary_ius(ius_by_text, topic),
                _doc_ius(ius_by_text, topic),
                scorer=scorer,
                jaccard_threshold=float(cfg.get("jaccard_threshold")),
                similarity_threshold=float(cfg.get("similarity_threshold")),
            )
            records.extend(derive_io.training_pair_record(p) for p in pairs)
    else:
        for aligned, topic in items:
            if task == "salience":
                records.extend(
                    derive_io.salience_records(topic.topic_id, derive.derive_salience(aligned))
                )
                continue
            clusters = derive.derive_clusters(aligned)
            if task == "clusters":
                records.extend(derive_io.cluster_record(topic.topic_id, c) for c in clusters)
                continue
            plans = derive.derive_sentence_planning(clusters, topic)
            if task == "plans":
                records.extend(derive_io.plan_record(topic.topic_id, p) for p in plans)
            elif task == "fusion":
                for plan, (inputs, target) in zip(plans, derive.derive_fusion(plans)):
                    records.append(derive_io.fusion_record(topic.topic_id, plan, inputs, target))
            elif task == "ordering":
                for example in derive.derive_ordering(plans, topic, seed=seed):
                    records.append(derive_io.ordering_record(topic.topic_id, example))
    derive_io.write_jsonl(records, args.out)
    logger.info("derived %d %s records -> %s", len(records), task, args.out)
    return 0


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------

_HANDLERS = {
    "extract": _cmd_extract,
    "filter": _cmd_filter,
    "align": _cmd_align,
    "eval": _cmd_eval,
    "aggregate": _cmd_aggregate,
    "derive": _cmd_derive,
    "stats": _cmd_derive,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = Config(args)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    resolved = cfg.resolved(["seed", "jobs", "threshold"])
    logger.info("command=%s resolved=%s", args.command, resolved)
    return _HANDLERS[args.command](cfg)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, IntegrityError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ScorerError as exc:
        print(f"scorer error: {exc}", file=sys.stderr)
        return 3
    except SpanAlignError as exc:  # safety net for new error kinds
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
