"""Offline score export: same models as /score, written to a JSONL file.

Input pairs file: {"text_a", "text_b", "kinds"?} per line.
Output score file: {"text_a", "text_b", <kind>: value, ...} per line,
consumable by clients as a precomputed --scores-file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .models import load_config, load_models


def export_scores(
    pairs_path: str | Path,
    out_path: str | Path,
    config_path: str | None = None,
    kinds: list[str] | None = None,
) -> int:
    config = load_config(config_path)
    models = load_models(config)
    count = 0
    with open(pairs_path, encoding="utf-8") as fin, open(
        out_path, "w", encoding="utf-8"
    ) as fout:
        for lineno, line in enumerate(fin, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{pairs_path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if "text_a" not in record or "text_b" not in record:
                raise ValueError(f"{pairs_path}:{lineno}: missing text_a/text_b")
            requested = kinds or record.get("kinds") or sorted(models)
            out = {"text_a": record["text_a"], "text_b": record["text_b"]}
            for kind in requested:
                if kind not in models:
                    raise ValueError(f"{pairs_path}:{lineno}: model not loaded: {kind}")
                out[kind] = round(
                    float(models[kind].score(record["text_a"], record["text_b"])), 6
                )
            fout.write(json.dumps(out, ensure_ascii=False) + "\n")
            count += 1
    return count


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-export", description=__doc__)
    parser.add_argument("--pairs", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--config", default=None)
    parser.add_argument("--kinds", nargs="*", default=None)
    args = parser.parse_args(argv)
    try:
        count = export_scores(args.pairs, args.out, args.config, args.kinds)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"scored {count} pairs -> {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
