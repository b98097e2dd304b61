"""Service contract tests: range, order, determinism, self-similarity,
snapshot stability across restarts, and the error statuses."""

import json
import random
import string
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from scorer_service.app import create_app

ROOT = Path(__file__).resolve().parent.parent
PROBE_PAIRS = ROOT / "data" / "probe_pairs.jsonl"
PROBE_SCORES = ROOT / "data" / "probe_scores.jsonl"

ALL_KINDS = ["similarity", "entailment", "align_prob"]


@pytest.fixture()
def client():
    return TestClient(create_app())


def _batch(pairs, kinds=ALL_KINDS):
    return [{"text_a": a, "text_b": b, "kinds": kinds} for a, b in pairs]


def test_scores_in_range_for_random_texts(client):
    rng = random.Random(1)

    def text():
        words = [
            "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(2, 8)))
            for _ in range(rng.randint(0, 10))
        ]
        return " ".join(words)

    pairs = [(text(), text()) for _ in range(40)]
    response = client.post("/score", json=_batch(pairs))
    assert response.status_code == 200
    for entry in response.json():
        for kind in ALL_KINDS:
            assert 0.0 <= entry[kind] <= 1.0


def test_response_order_matches_request_order(client):
    pairs = [
        ("identical text", "identical text"),
        ("one two three", "four five six"),
        ("half shared words", "half shared tokens"),
    ]
    response = client.post("/score", json=_batch(pairs))
    scores = [entry["similarity"] for entry in response.json()]
    assert scores[0] == 1.0
    assert scores[1] < 0.2
    assert 0.0 < scores[2] < 1.0


def test_deterministic_across_instances():
    pairs = [("John ate an apple.", "A man ate fruit."), ("x y", "y x")]
    first = TestClient(create_app()).post("/score", json=_batch(pairs)).json()
    second = TestClient(create_app()).post("/score", json=_batch(pairs)).json()
    assert first == second


def test_self_similarity_at_least_099(client):
    texts = [
        "John ate an apple.",
        "a",
        "café au lait",
        "世界和平",
        "Multi word sentence with several tokens inside.",
        "",
    ]
    response = client.post("/score", json=_batch([(t, t) for t in texts], ["similarity"]))
    for text, entry in zip(texts, response.json()):
        assert entry["similarity"] >= 0.99, repr(text)


def test_empty_batch_is_400(client):
    assert client.post("/score", json=[]).status_code == 400


def test_oversize_batch_is_413(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"max_batch": 4}), encoding="utf-8")
    client = TestClient(create_app(str(config)))
    batch = _batch([("a", "b")] * 5, ["similarity"])
    assert client.post("/score", json=batch).status_code == 413


def test_unserved_kind_is_503_naming_kind(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps({"models": {"similarity": {"backend": "hash-cosine"}}}),
        encoding="utf-8",
    )
    client = TestClient(create_app(str(config)))
    response = client.post("/score", json=_batch([("a", "b")], ["entailment"]))
    assert response.status_code == 503
    assert "entailment" in response.json()["detail"]


def test_model_version_header_echoed(client):
    response = client.post("/score", json=_batch([("a", "b")], ["similarity"]))
    assert "similarity=hash-cosine-1.0" in response.headers["X-Model-Version"]
    health = client.get("/health")
    assert health.status_code == 200
    assert health.headers["X-Model-Version"] == response.headers["X-Model-Version"]
    assert health.json()["models"]["align_prob"]["name"] == "lexical-blend"


def test_entailment_is_directional(client):
    long_text = "The storm damaged several homes and injured five workers."
    short_text = "The storm damaged homes."
    response = client.post(
        "/score",
        json=[
            {"text_a": short_text, "text_b": long_text, "kinds": ["entailment"]},
            {"text_a": long_text, "text_b": short_text, "kinds": ["entailment"]},
        ],
    )
    forward, backward = [entry["entailment"] for entry in response.json()]
    assert forward > backward  # short hypothesis is covered by the long premise


def test_snapshot_probe_set_stable_across_restarts():
    probes = [
        json.loads(line) for line in PROBE_PAIRS.read_text(encoding="utf-8").splitlines()
    ]
    expected = [
        json.loads(line) for line in PROBE_SCORES.read_text(encoding="utf-8").splitlines()
    ]
    for _ in range(2):  # fresh app per restart
        client = TestClient(create_app())
        response = client.post("/score", json=probes)
        assert response.status_code == 200
        for probe, got, want in zip(probes, response.json(), expected):
            assert probe["text_a"] == want["text_a"]
            for kind in ALL_KINDS:
                assert got[kind] == pytest.approx(want[kind], abs=1e-4), probe
