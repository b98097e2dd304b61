"""Pair scorers: the black-box similarity/entailment/alignment backends.

The core never computes neural scores itself; it asks a PairScorer.
Directionality convention used everywhere (requests and score files):
``text_a`` is the summary-side text (the candidate / hypothesis),
``text_b`` is the document-side text (the reference / premise).

Two implementations are provided: a file of precomputed scores for fully
offline runs, and an HTTP client for a scorer service exposing POST /score.
"""

from __future__ import annotations

import json
import time
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Protocol

import httpx

from .errors import ParseError, ScorerError

SCORE_KINDS = ("similarity", "entailment", "align_prob")


class PairScorer(Protocol):
    def score_pairs(
        self, pairs: Sequence[tuple[str, str]], kinds: Sequence[str]
    ) -> list[dict[str, float]]:
        """Score (text_a, text_b) pairs; each result carries every requested kind."""
        ...


def _check_kinds(kinds: Sequence[str]) -> None:
    for kind in kinds:
        if kind not in SCORE_KINDS:
            raise ScorerError(f"unknown score kind {kind!r}")


def validate_scores(
    results: list[dict[str, float]], n_pairs: int, kinds: Sequence[str]
) -> list[dict[str, float]]:
    """Enforce the scorer contract: full coverage, all values in [0, 1]."""
    if len(results) != n_pairs:
        raise ScorerError(f"scorer returned {len(results)} results for {n_pairs} pairs")
    for i, result in enumerate(results):
        for kind in kinds:
            if kind not in result:
                raise ScorerError(f"result {i} is missing score kind {kind!r}")
            value = result[kind]
            if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
                raise ScorerError(f"result {i} has out-of-range {kind}={value!r}")
    return results


class FileScorer:
    """Precomputed scores loaded from a JSONL file (offline mode)."""

    def __init__(self, path: str | Path):
        self.path = str(path)
        self._scores: dict[tuple[str, str], dict[str, float]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON ({exc.msg})", self.path, lineno) from exc
                if "text_a" not in record or "text_b" not in record:
                    raise ParseError("missing text_a/text_b", self.path, lineno)
                key = (record["text_a"], record["text_b"])
                scores = {k: float(record[k]) for k in SCORE_KINDS if k in record}
                self._scores.setdefault(key, {}).update(scores)

    def score_pairs(self, pairs, kinds):
        _check_kinds(kinds)
        results = []
        for a, b in pairs:
            entry = self._scores.get((a, b))
            if entry is None:
                raise ScorerError(
                    f"{self.path}: no precomputed scores for pair ({a[:40]!r}, {b[:40]!r})"
                )
            missing = [k for k in kinds if k not in entry]
            if missing:
                raise ScorerError(
                    f"{self.path}: pair ({a[:40]!r}, {b[:40]!r}) lacks kinds {missing}"
                )
            results.append({k: entry[k] for k in kinds})
        return validate_scores(results, len(pairs), kinds)


class HttpScorer:
    """Client for a scorer service exposing POST {base_url}/score.

    Request body: JSON array of {"text_a", "text_b", "kinds"}.
    Response body: JSON array of {kind: score} in request order.
    """

    def __init__(
        self,
        base_url: str,
        *,
        batch_size: int = 64,
        max_retries: int = 3,
        timeout: float = 30.0,
        retry_wait: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.max_retries = max_retries
        self.timeout = timeout
        self.retry_wait = retry_wait
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _post_batch(self, batch: list[dict]) -> list[dict[str, float]]:
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                response = self._client.post(f"{self.base_url}/score", json=batch)
                if response.status_code != 200:
                    raise ScorerError(
                        f"scorer returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                payload = response.json()
                if not isinstance(payload, list):
                    raise ScorerError("scorer response is not a JSON array")
                return payload
            except (httpx.HTTPError, json.JSONDecodeError) as exc:
                last_error = exc
                if attempt + 1 < self.max_retries:
                    time.sleep(self.retry_wait * (attempt + 1))
        raise ScorerError(
            f"scorer at {self.base_url} unreachable after {self.max_retries} attempts: {last_error}"
        )

    def score_pairs(self, pairs, kinds):
        _check_kinds(kinds)
        kinds = list(kinds)
        results: list[dict[str, float]] = []
        for start in range(0, len(pairs), self.batch_size):
            chunk = pairs[start : start + self.batch_size]
            batch = [{"text_a": a, "text_b": b, "kinds": kinds} for a, b in chunk]
            results.extend(self._post_batch(batch))
        return validate_scores(results, len(pairs), kinds)


def save_pair_requests(
    pairs: Iterable, kinds: Sequence[str] | None, path: str | Path
) -> int:
    """Dump the pairs a run would score, so they can be scored offline.

    ``pairs`` holds (text_a, text_b) tuples scored with ``kinds``, or
    (text_a, text_b, kinds) triples; duplicate pairs merge their kinds.
    """
    if kinds is not None:
        _check_kinds(kinds)
    merged: dict[tuple[str, str], set[str]] = {}
    order: list[tuple[str, str]] = []
    for item in pairs:
        if len(item) == 3:
            a, b, item_kinds = item
        else:
            a, b = item
            item_kinds = kinds or ()
        _check_kinds(item_kinds)
        if (a, b) not in merged:
            merged[(a, b)] = set()
            order.append((a, b))
        merged[(a, b)].update(item_kinds)
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in order:
            record = {
                "text_a": a,
                "text_b": b,
                "kinds": [k for k in SCORE_KINDS if k in merged[(a, b)]],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return len(order)


def save_scores(
    records: Iterable[tuple[str, str, dict[str, float]]], path: str | Path
) -> None:
    """Write a precomputed-score file consumable by FileScorer."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, scores in records:
            record = {"text_a": a, "text_b": b}
            record.update({k: round(float(v), 6) for k, v in scores.items()})
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def resolve_scorer(
    scores_file: str | None, scorer_url: str | None
) -> PairScorer:
    if scores_file:
        return FileScorer(scores_file)
    if scorer_url:
        return HttpScorer(scorer_url)
    raise ScorerError("no scorer configured: pass a scores file or a scorer URL")
