#!/usr/bin/env python3
"""Regenerate the committed toy corpora under data/.

data/toy:      two small topics with gold alignments, used by the CLI
               golden-file test and the README walkthrough.
data/pyramid:  five topics with system summaries assembled verbatim from
               document sentences, span links from reference summaries to
               system summaries, and extractive provenance links.

Deterministic: running it twice produces identical files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from spanalign.corpus import split_sentences  # noqa: E402


def write_jsonl(records, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(records)} records)")


def span_of(text: str, fragment: str) -> list[list[int]]:
    start = text.index(fragment)
    return [[start, start + len(fragment)]]


# ---------------------------------------------------------------------------
# toy pipeline corpus
# ---------------------------------------------------------------------------

TOY_TOPICS = {
    "toy1": {
        "documents": {
            "a1": "John ate an apple at noon. Snow covered the northern roads. "
                  "Mary drank hot tea.",
            "a2": "The council approved the budget. Rebels seized the town at dawn.",
        },
        "summaries": {
            "s1": "John ate an apple. Rebels seized the town.",
        },
        "gold": [
            ("s1", "John ate an apple", "a1", "John ate an apple"),
            ("s1", "Rebels seized the town", "a2", "Rebels seized the town"),
        ],
    },
    "toy2": {
        "documents": {
            "b1": "Prices rose sharply on Monday. The museum opened a new wing.",
            "b2": "Investors bought new houses. The storm damaged several homes.",
        },
        "summaries": {
            "s2": "Prices rose sharply. The storm damaged several homes.",
        },
        "gold": [
            ("s2", "Prices rose sharply", "b1", "Prices rose sharply"),
            ("s2", "The storm damaged several homes", "b2", "The storm damaged several homes"),
        ],
    },
}


def generate_toy(out_dir: Path) -> None:
    topic_records = []
    gold_records = []
    for topic_id, spec in TOY_TOPICS.items():
        texts = {}
        for kind, mapping in (("document", spec["documents"]), ("summary", spec["summaries"])):
            for text_id, text in mapping.items():
                texts[text_id] = text
                topic_records.append(
                    {
                        "topic_id": topic_id,
                        "kind": kind,
                        "text_id": text_id,
                        "text": text,
                        "sentences": [
                            {"start": s.char_offset, "end": s.end}
                            for s in split_sentences(text)
                        ],
                    }
                )
        for summary_id, s_frag, doc_id, d_frag in spec["gold"]:
            gold_records.append(
                {
                    "topic_id": topic_id,
                    "summary_id": summary_id,
                    "summary_span": span_of(texts[summary_id], s_frag),
                    "doc_id": doc_id,
                    "doc_span": span_of(texts[doc_id], d_frag),
                    "provenance": "gold",
                }
            )
    write_jsonl(topic_records, out_dir / "topics.jsonl")
    write_jsonl(gold_records, out_dir / "gold.jsonl")


# ---------------------------------------------------------------------------
# pyramid corpus
# ---------------------------------------------------------------------------

# Per topic: document sentences, reference summary sentences, and system
# summaries listed as (doc_id, doc_sentence_index) extraction recipes.
PYRAMID_TOPICS = {
    "p1": {
        "documents": {
            "d11": [
                "The river flooded the old town.",
                "Rescue teams arrived within hours.",
                "Farms upstream lost their harvest.",
            ],
            "d12": [
                "Officials opened emergency shelters.",
                "The flood damaged historic bridges.",
                "Volunteers delivered food and blankets.",
            ],
        },
        "summary": ("r1", ["The river flooded the town.", "Shelters opened for residents."]),
        "systems": {
            "p1sysA": [("d11", 0), ("d12", 0)],
            "p1sysB": [("d12", 1), ("d11", 1)],
        },
        # (ref fragment, sys_id, [sys fragments]) - fragments are substrings
        # of the system summary text; several fragments form one span
        "links": [
            ("The river flooded the town.", "p1sysA", ["The river flooded the old town."]),
            ("Shelters opened", "p1sysA", ["Officials opened emergency shelters."]),
            ("The river flooded", "p1sysB", ["The flood damaged historic bridges."]),
        ],
        "unlinked_sentences": [],
    },
    "p2": {
        "documents": {
            "d21": [
                "The senate approved the budget.",
                "Opposition leaders criticized the vote.",
                "The president signed the law on Friday.",
            ],
            "d22": [
                "Economists warned about rising debt.",
                "Markets reacted calmly to the news.",
            ],
        },
        "summary": ("r2", ["The budget was approved and signed.", "Markets stayed calm."]),
        "systems": {
            "p2sysA": [("d21", 0), ("d21", 2), ("d22", 1)],
        },
        # one span crosses two system sentences -> split into two links
        "links": [
            (
                "The budget was approved and signed.",
                "p2sysA",
                ["The senate approved the budget.", "The president signed the law on Friday."],
            ),
            ("Markets stayed calm.", "p2sysA", ["Markets reacted calmly to the news."]),
        ],
        "unlinked_sentences": [],
    },
    "p3": {
        "documents": {
            "d31": [
                "The team won the championship.",
                "Fans celebrated in the streets.",
                "The coach praised the young players.",
            ],
        },
        "summary": ("r3", ["The team won and fans celebrated."]),
        "systems": {
            # second sentence has no extractive source: the link through it
            # is skipped and counted
            "p3sysA": [("d31", 0), None],
        },
        "unlinked_text": "A completely novel concluding remark.",
        "links": [
            ("The team won", "p3sysA", ["The team won the championship."]),
            ("fans celebrated", "p3sysA", ["A completely novel concluding remark."]),
        ],
        "unlinked_sentences": [1],
    },
    "p4": {
        "documents": {
            "d41": [
                "Scientists discovered a new species.",
                "The reef hosts thousands of organisms.",
            ],
            "d42": [
                "Funding for the expedition doubled.",
                "The discovery excited marine biologists.",
            ],
        },
        "summary": ("r4", ["A new species was discovered on the reef."]),
        "systems": {
            "p4sysA": [("d41", 0), ("d42", 1)],
            "p4sysB": [("d41", 1)],
        },
        "links": [
            ("A new species was discovered", "p4sysA", ["Scientists discovered a new species."]),
            ("on the reef", "p4sysB", ["The reef hosts thousands of organisms."]),
            # discontiguous system span within one sentence
            ("was discovered", "p4sysA", ["The discovery", "excited marine biologists."]),
        ],
        "unlinked_sentences": [],
    },
    "p5": {
        "documents": {
            "d51": [
                "The airline canceled dozens of flights.",
                "Passengers waited overnight in terminals.",
                "Storms closed the northern runways.",
            ],
            "d52": [
                "Refunds were promised within a week.",
                "Travel resumed the next morning.",
            ],
        },
        "summary": ("r5", ["Flights were canceled during storms.", "Travel resumed later."]),
        "systems": {
            "p5sysA": [("d51", 0), ("d51", 2), ("d52", 1)],
            "p5sysB": [("d52", 0)],
        },
        "links": [
            ("Flights were canceled", "p5sysA", ["The airline canceled dozens of flights."]),
            ("during storms", "p5sysA", ["Storms closed the northern runways."]),
            ("Travel resumed later.", "p5sysA", ["Travel resumed the next morning."]),
            ("Travel resumed later.", "p5sysB", ["Refunds were promised within a week."]),
        ],
        "unlinked_sentences": [],
    },
}


def generate_pyramid(out_dir: Path) -> None:
    topic_records = []
    sys_records = []
    scu_records = []
    ext_records = []
    for topic_id, spec in PYRAMID_TOPICS.items():
        doc_texts = {}
        doc_sentences = {}
        for doc_id, sentences in spec["documents"].items():
            text = " ".join(sentences)
            doc_texts[doc_id] = text
            offsets = []
            cursor = 0
            for sent in sentences:
                start = text.index(sent, cursor)
                offsets.append((start, start + len(sent)))
                cursor = start + len(sent)
            doc_sentences[doc_id] = offsets
            topic_records.append(
                {
                    "topic_id": topic_id,
                    "kind": "document",
                    "text_id": doc_id,
                    "text": text,
                    "sentences": [{"start": s, "end": e} for s, e in offsets],
                }
            )
        ref_id, ref_sents = spec["summary"]
        ref_text = " ".join(ref_sents)
        topic_records.append(
            {
                "topic_id": topic_id,
                "kind": "summary",
                "text_id": ref_id,
                "text": ref_text,
                "sentences": [
                    {"start": s.char_offset, "end": s.end}
                    for s in split_sentences(ref_text)
                ],
            }
        )
        sys_texts = {}
        for sys_id, recipe in spec["systems"].items():
            pieces = []
            for item in recipe:
                if item is None:
                    pieces.append(spec["unlinked_text"])
                else:
                    doc_id, sent_index = item
                    s, e = doc_sentences[doc_id][sent_index]
                    pieces.append(doc_texts[doc_id][s:e])
            text = " ".join(pieces)
            sys_texts[sys_id] = text
            offsets = []
            cursor = 0
            for piece in pieces:
                start = text.index(piece, cursor)
                offsets.append((start, start + len(piece)))
                cursor = start + len(piece)
            sys_records.append(
                {
                    "topic_id": topic_id,
                    "sys_id": sys_id,
                    "text": text,
                    "sentences": [{"start": s, "end": e} for s, e in offsets],
                }
            )
            for sent_index, item in enumerate(recipe):
                if item is None:
                    continue
                doc_id, doc_sent_index = item
                ext_records.append(
                    {
                        "topic_id": topic_id,
                        "sys_id": sys_id,
                        "sys_sentence_index": sent_index,
                        "doc_id": doc_id,
                        "doc_sentence_index": doc_sent_index,
                    }
                )
        for ref_frag, sys_id, sys_frags in spec["links"]:
            sys_text = sys_texts[sys_id]
            sys_span = []
            cursor = 0
            for frag in sys_frags:
                start = sys_text.index(frag, cursor)
                sys_span.append([start, start + len(frag)])
                cursor = start + len(frag)
            scu_records.append(
                {
                    "topic_id": topic_id,
                    "ref_id": ref_id,
                    "ref_span": span_of(ref_text, ref_frag),
                    "sys_id": sys_id,
                    "sys_span": sys_span,
                }
            )
    write_jsonl(topic_records, out_dir / "topics.jsonl")
    write_jsonl(sys_records, out_dir / "system_summaries.jsonl")
    write_jsonl(scu_records, out_dir / "scu_links.jsonl")
    write_jsonl(ext_records, out_dir / "extractive_links.jsonl")


if __name__ == "__main__":
    generate_toy(ROOT / "data" / "toy")
    generate_pyramid(ROOT / "data" / "pyramid")
