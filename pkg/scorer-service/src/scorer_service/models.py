"""Pair-scoring backends.

All default backends are deterministic lexical models over hashed
features: no network, no weights to download, bit-stable across
restarts. They approximate the neural scorers the wire protocol was
designed for; heavier backends can be pinned via the config without
touching the service code.

Directionality convention (shared with clients): ``text_a`` is the
summary-side text and acts as the entailment hypothesis; ``text_b`` is
the document-side text and acts as the premise. Similarity is symmetric
in these backends but the protocol does not promise symmetry.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

_WORD_RE = re.compile(r"\w+", re.UNICODE)

FEATURE_DIMS = 1024


def tokens(text: str) -> list[str]:
    return [t.lower() for t in _WORD_RE.findall(text)]


def light_stem(token: str) -> str:
    for suffix in ("ing", "ed", "es", "s"):
        if token.endswith(suffix) and len(token) > len(suffix) + 2:
            return token[: -len(suffix)]
    return token


def _bucket(feature: str) -> int:
    digest = hashlib.md5(feature.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") % FEATURE_DIMS


def feature_vector(text: str) -> np.ndarray:
    """Hashed counts of token unigrams and intra-token character trigrams."""
    vec = np.zeros(FEATURE_DIMS)
    for token in tokens(text):
        vec[_bucket("w:" + token)] += 1.0
        padded = f"#{token}#"
        for i in range(len(padded) - 2):
            vec[_bucket("c:" + padded[i : i + 3])] += 0.5
    return vec


class HashCosineSimilarity:
    name = "hash-cosine"
    version = "1.0"
    kind = "similarity"

    def score(self, text_a: str, text_b: str) -> float:
        va, vb = feature_vector(text_a), feature_vector(text_b)
        na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            return 1.0 if text_a == text_b else 0.0
        value = float(np.dot(va, vb) / (na * nb))
        return min(1.0, max(0.0, value))


class TokenCoverageEntailment:
    """Directional: which share of the hypothesis is covered by the premise."""

    name = "token-coverage"
    version = "1.0"
    kind = "entailment"

    def score(self, text_a: str, text_b: str) -> float:
        hypothesis = tokens(text_a)
        if not hypothesis:
            return 1.0
        premise = {light_stem(t) for t in tokens(text_b)}
        covered = sum(light_stem(t) in premise for t in hypothesis)
        return covered / len(hypothesis)


class LexicalBlendAligner:
    """Alignment probability as a blend of cosine and token-set Jaccard."""

    name = "lexical-blend"
    version = "1.0"
    kind = "align_prob"

    def __init__(self):
        self._cosine = HashCosineSimilarity()

    def score(self, text_a: str, text_b: str) -> float:
        sa = {light_stem(t) for t in tokens(text_a)}
        sb = {light_stem(t) for t in tokens(text_b)}
        union = sa | sb
        jaccard = len(sa & sb) / len(union) if union else (1.0 if text_a == text_b else 0.0)
        value = 0.5 * self._cosine.score(text_a, text_b) + 0.5 * jaccard
        return min(1.0, max(0.0, value))


def pair_features(text_a: str, text_b: str) -> list[float]:
    """Feature row shared by the trained aligner and the training script."""
    cosine = HashCosineSimilarity().score(text_a, text_b)
    coverage_ab = TokenCoverageEntailment().score(text_a, text_b)
    coverage_ba = TokenCoverageEntailment().score(text_b, text_a)
    sa = {light_stem(t) for t in tokens(text_a)}
    sb = {light_stem(t) for t in tokens(text_b)}
    union = sa | sb
    jaccard = len(sa & sb) / len(union) if union else 0.0
    len_a, len_b = len(tokens(text_a)), len(tokens(text_b))
    ratio = min(len_a, len_b) / max(len_a, len_b) if max(len_a, len_b) else 1.0
    return [cosine, coverage_ab, coverage_ba, jaccard, ratio]


class LogisticAligner:
    """Alignment probability from a trained logistic-regression model file."""

    name = "logistic"
    kind = "align_prob"

    def __init__(self, path: str):
        import joblib

        payload = joblib.load(path)
        self._model = payload["model"]
        self.version = payload.get("version", "unversioned")

    def score(self, text_a: str, text_b: str) -> float:
        proba = self._model.predict_proba([pair_features(text_a, text_b)])[0][1]
        return min(1.0, max(0.0, float(proba)))


_BACKENDS = {
    "hash-cosine": lambda spec: HashCosineSimilarity(),
    "token-coverage": lambda spec: TokenCoverageEntailment(),
    "lexical-blend": lambda spec: LexicalBlendAligner(),
    "logistic": lambda spec: LogisticAligner(spec["path"]),
}

DEFAULT_CONFIG = {
    "max_batch": 256,
    "models": {
        "similarity": {"backend": "hash-cosine"},
        "entailment": {"backend": "token-coverage"},
        "align_prob": {"backend": "lexical-blend"},
    },
}


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return DEFAULT_CONFIG
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    config.setdefault("max_batch", DEFAULT_CONFIG["max_batch"])
    config.setdefault("models", DEFAULT_CONFIG["models"])
    return config


def load_models(config: dict) -> dict[str, object]:
    """Instantiate the configured backend per score kind."""
    models: dict[str, object] = {}
    for kind, spec in config["models"].items():
        backend = spec.get("backend")
        if backend not in _BACKENDS:
            raise ValueError(f"unknown backend {backend!r} for kind {kind!r}")
        models[kind] = _BACKENDS[backend](spec)
    return models


def version_string(models: dict[str, object]) -> str:
    return ";".join(
        f"{kind}={model.name}-{model.version}" for kind, model in sorted(models.items())
    )
