"""Optional: train a logistic alignment classifier from training pairs.

Input: JSONL of {"summary_text", "doc_text", "label": "positive"|"negative"}.
Output: a joblib file loadable via the "logistic" align_prob backend:

    {"models": {"align_prob": {"backend": "logistic", "path": "model.joblib"}}}
"""

from __future__ import annotations

import argparse
import json
import sys

from .models import pair_features


def train(train_pairs_path: str, out_path: str, version: str = "logistic-0.1") -> dict:
    from joblib import dump
    from sklearn.linear_model import LogisticRegression

    features = []
    labels = []
    with open(train_pairs_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            for key in ("summary_text", "doc_text", "label"):
                if key not in record:
                    raise ValueError(f"{train_pairs_path}:{lineno}: missing {key!r}")
            features.append(pair_features(record["summary_text"], record["doc_text"]))
            labels.append(1 if record["label"] == "positive" else 0)
    if len(set(labels)) < 2:
        raise ValueError("training data must contain both labels")
    model = LogisticRegression(max_iter=1000, random_state=0)
    model.fit(features, labels)
    dump({"model": model, "version": version}, out_path)
    return {"n_examples": len(labels), "n_positive": sum(labels)}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-train", description=__doc__)
    parser.add_argument("--train-pairs", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--version", default="logistic-0.1")
    args = parser.parse_args(argv)
    try:
        stats = train(args.train_pairs, args.out, args.version)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"trained on {stats['n_examples']} pairs ({stats['n_positive']} positive) -> {args.out}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
