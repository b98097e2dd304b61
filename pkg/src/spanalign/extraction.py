"""Information-unit extraction.

Three routes produce IUs:
  * a deterministic heuristic extractor (finite-verb detection over a
    closed lexicon plus suffix rules, clause splitting on coordinators,
    subject sharing across coordinated clauses as discontiguous spans),
  * import of externally extracted IUs from JSONL,
  * selection of one canonical annotation out of several crowd
    annotations of the same sentence.
"""

from __future__ import annotations

import json
import logging
import random
from collections.abc import Mapping
from pathlib import Path

from .corpus import InformationUnit, Sentence, Span, Topic, span_text
from .errors import IntegrityError, ParseError
from .metrics import char_jaccard
from .tokenize import Token, tokenize_with_spans

logger = logging.getLogger(__name__)

DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "his", "her", "its",
    "their", "our", "my", "your", "some", "any", "no", "each", "every",
    "another", "such",
}

SUBJECT_PRONOUNS = {"he", "she", "it", "they", "we", "i", "you", "who", "everyone", "nobody"}

PREPOSITIONS = {
    "in", "on", "at", "by", "with", "from", "to", "of", "for", "over",
    "under", "after", "before", "during", "against", "about", "into",
    "through", "across", "near", "between", "among", "without", "despite",
    "toward", "towards", "since", "until", "via",
}

CLAUSE_COORDINATORS = {"and", "but", "or", "nor", "so", "yet", "while", "whereas"}

AUXILIARIES = {
    "is", "are", "was", "were", "am", "be", "been", "being", "has", "have",
    "had", "do", "does", "did", "will", "would", "shall", "should", "can",
    "could", "may", "might", "must",
}

_BASE_VERBS = """
say tell report announce state claim add note warn argue deny confirm accuse
ask answer reply declare insist suggest reveal describe explain admit
eat drink cook serve run walk go come leave arrive travel move meet visit
win lose play fight attack defend kill die injure wound arrest charge convict
jail release free sign agree refuse accept reject approve vote elect appoint
resign quit fire hire buy sell pay cost raise cut drop fall rise grow decline
increase reduce double open close start begin end stop continue halt plan
expect hope want need try help make build destroy break fix repair create
develop launch test use give take send receive bring carry hold keep find
seek search discover learn teach study read write speak talk discuss consider
decide choose cause lead follow support oppose back criticize praise blame
thank invite join live work stay remain become seem appear look watch see
hear feel believe think know remember forget show prove happen occur affect
change improve worsen threaten promise order demand request offer provide
supply deliver face suffer enjoy celebrate mark sign ban allow permit forbid
urge push pull drive fly sail land crash strike hit miss catch chase escape
flee hide seize capture rescue save spend waste earn owe lend borrow
""".split()

_IRREGULAR_PAST = {
    "say": "said", "tell": "told", "eat": "ate", "drink": "drank", "run": "ran",
    "go": "went", "come": "came", "leave": "left", "meet": "met", "win": "won",
    "lose": "lost", "fight": "fought", "buy": "bought", "sell": "sold",
    "pay": "paid", "cut": "cut", "fall": "fell", "rise": "rose", "grow": "grew",
    "make": "made", "build": "built", "break": "broke", "give": "gave",
    "take": "took", "send": "sent", "bring": "brought", "hold": "held",
    "keep": "kept", "find": "found", "seek": "sought", "teach": "taught",
    "read": "read", "write": "wrote", "speak": "spoke", "know": "knew",
    "forget": "forgot", "think": "thought", "lead": "led", "become": "became",
    "see": "saw", "hear": "heard", "feel": "felt", "drive": "drove",
    "fly": "flew", "strike": "struck", "hit": "hit", "catch": "caught",
    "flee": "fled", "hide": "hid", "spend": "spent", "lend": "lent", "cost": "cost",
    "begin": "began", "choose": "chose", "show": "showed", "prove": "proved",
}

_IRREGULAR_PARTICIPLE = {
    "eat": "eaten", "drink": "drunk", "go": "gone", "win": "won", "run": "run",
    "fall": "fallen", "rise": "risen", "grow": "grown", "break": "broken",
    "give": "given", "take": "taken", "write": "written", "speak": "spoken",
    "know": "known", "see": "seen", "drive": "driven", "fly": "flown",
    "hide": "hidden", "begin": "begun", "choose": "chosen", "become": "become",
    "come": "come", "forget": "forgotten", "show": "shown", "prove": "proven",
}

_VOWELS = "aeiou"


def _third_singular(base: str) -> str:
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    if base.endswith("y") and len(base) > 1 and base[-2] not in _VOWELS:
        return base[:-1] + "ies"
    return base + "s"


def _doubles_final(base: str) -> bool:
    # one-syllable CVC ending (not w/x/y) doubles: plan -> planned
    return (
        len(base) >= 3
        and base[-1] not in _VOWELS + "wxy"
        and base[-2] in _VOWELS
        and base[-3] not in _VOWELS
        and sum(c in _VOWELS for c in base) == 1
    )


def _past(base: str) -> str:
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and len(base) > 1 and base[-2] not in _VOWELS:
        return base[:-1] + "ied"
    if _doubles_final(base):
        return base + base[-1] + "ed"
    return base + "ed"


def _gerund(base: str) -> str:
    if base.endswith("ie"):
        return base[:-2] + "ying"
    if base.endswith("e") and not base.endswith("ee"):
        return base[:-1] + "ing"
    if _doubles_final(base):
        return base + base[-1] + "ing"
    return base + "ing"


def _build_verb_forms() -> frozenset[str]:
    forms: set[str] = set()
    for base in _BASE_VERBS:
        forms.add(base)
        forms.add(_third_singular(base))
        forms.add(_IRREGULAR_PAST.get(base, _past(base)))
        if base in _IRREGULAR_PARTICIPLE:
            forms.add(_IRREGULAR_PARTICIPLE[base])
        forms.add(_gerund(base))
    return frozenset(forms)


VERB_FORMS = _build_verb_forms()


def _tag(token: str) -> str:
    low = token.lower()
    if low in AUXILIARIES:
        return "AUX"
    if low in VERB_FORMS:
        return "V"
    if low in DETERMINERS:
        return "DET"
    if low in PREPOSITIONS:
        return "P"
    if low in CLAUSE_COORDINATORS:
        return "CC"
    if low in SUBJECT_PRONOUNS:
        return "PRN"
    if len(low) > 4 and low.endswith("ed"):
        return "VED"
    if len(low) > 5 and low.endswith("ing"):
        return "VING"
    return "N"


def _is_finite(tags: list[str], i: int) -> bool:
    tag = tags[i]
    prev = tags[i - 1] if i > 0 else None
    if tag == "AUX":
        return True
    if tag == "V":
        return prev not in ("DET", "P")
    if tag == "VED":
        return prev in ("N", "PRN", "CC")
    return False  # bare VING is never independently finite


def _gap_has_semicolon(text: str, tokens: list[Token], i: int) -> bool:
    gap = text[tokens[i - 1].end : tokens[i].start] if i > 0 else ""
    return ";" in gap


def extract_ius_heuristic(
    sentence: Sentence, parent_id: str = "", parent_text: str | None = None
) -> list[InformationUnit]:
    """Extract predicate-centered IUs from one sentence.

    Splits on clause-level coordinators/semicolons when both sides carry a
    finite verb; a coordinated clause without its own subject borrows the
    previous clause's pre-verb tokens as a discontiguous leading range.
    Verbless sentences yield no IUs.
    """
    tokens = tokenize_with_spans(sentence.text)
    if not tokens:
        return []
    tags = [_tag(t.text) for t in tokens]
    finite = [_is_finite(tags, i) for i in range(len(tokens))]

    # chunk at coordinators/semicolons, then merge verbless chunks left
    chunks: list[list[int]] = [[]]
    for i in range(len(tokens)):
        if tags[i] == "CC" or _gap_has_semicolon(sentence.text, tokens, i):
            if chunks[-1]:
                chunks.append([])
            if tags[i] == "CC":
                continue  # coordinator itself belongs to no clause
        chunks[-1].append(i)
    chunks = [c for c in chunks if c]

    clauses: list[list[int]] = []
    for chunk in chunks:
        if clauses and not any(finite[i] for i in chunk):
            clauses[-1].extend(chunk)
        elif not clauses and not any(finite[i] for i in chunk):
            # leading verbless chunk attaches to the next clause
            clauses.append(list(chunk))
        elif clauses and not any(finite[i] for i in clauses[-1]):
            clauses[-1].extend(chunk)
        else:
            clauses.append(list(chunk))
    clauses = [c for c in clauses if any(finite[i] for i in c)]
    if not clauses:
        logger.debug("no finite verb in sentence %r", sentence.text[:60])
        return []

    def first_finite(clause: list[int]) -> int:
        return next(idx for idx, i in enumerate(clause) if finite[i])

    ius: list[InformationUnit] = []
    seen: set[tuple[tuple[int, int], ...]] = set()
    for ci, clause in enumerate(clauses):
        ranges = [
            (
                sentence.char_offset + tokens[clause[0]].start,
                sentence.char_offset + tokens[clause[-1]].end,
            )
        ]
        verb_pos = first_finite(clause)
        has_subject = any(
            tags[i] in ("N", "PRN", "DET") for i in clause[:verb_pos]
        )
        if not has_subject:
            for cj in range(ci - 1, -1, -1):
                subject = clauses[cj][: first_finite(clauses[cj])]
                if subject:
                    ranges.insert(
                        0,
                        (
                            sentence.char_offset + tokens[subject[0]].start,
                            sentence.char_offset + tokens[subject[-1]].end,
                        ),
                    )
                    break
        span = Span(ranges)
        if span.ranges in seen:
            continue
        seen.add(span.ranges)
        if parent_text is not None:
            iu = InformationUnit.from_parent_text(
                span, parent_id, parent_text, sentence.index
            )
        else:
            surface = span_text(
                Span([(s - sentence.char_offset, e - sentence.char_offset) for s, e in span.ranges]),
                sentence.text,
            )
            iu = InformationUnit(
                span=span,
                parent_id=parent_id,
                sentence_index=sentence.index,
                surface=surface,
            )
        ius.append(iu)
    ius.sort(key=lambda iu: iu.span.ranges)
    return ius


def extract_topic_ius(topic: Topic) -> dict[str, list[InformationUnit]]:
    """Run the heuristic extractor over every text of a topic."""
    out: dict[str, list[InformationUnit]] = {}
    for entry in topic.summaries + topic.documents:
        ius: list[InformationUnit] = []
        for sent in entry.sentences:
            ius.extend(
                extract_ius_heuristic(sent, parent_id=entry.text_id, parent_text=entry.text)
            )
        out[entry.text_id] = ius
    return out


# ---------------------------------------------------------------------------
# IU import/export
# ---------------------------------------------------------------------------


def iu_record(topic_id: str, iu: InformationUnit) -> dict:
    record = {
        "topic_id": topic_id,
        "text_id": iu.parent_id,
        "sentence_index": iu.sentence_index,
        "ranges": [list(r) for r in iu.span.ranges],
    }
    if iu.surface is not None:
        record["surface"] = iu.surface
    return record


def save_ius(
    ius_by_topic: Mapping[str, Mapping[str, list[InformationUnit]]], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic_id in sorted(ius_by_topic):
            per_text = ius_by_topic[topic_id]
            for text_id in sorted(per_text):
                for iu in per_text[text_id]:
                    fh.write(json.dumps(iu_record(topic_id, iu), ensure_ascii=False) + "\n")


def import_ius(
    path: str | Path, topics: Mapping[str, Topic]
) -> dict[str, dict[str, list[InformationUnit]]]:
    """Load externally extracted IUs, validating spans against topic texts."""
    out: dict[str, dict[str, list[InformationUnit]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc
            for key in ("topic_id", "text_id", "ranges"):
                if key not in record:
                    raise ParseError(f"missing field {key!r}", str(path), lineno)
            topic_id = str(record["topic_id"])
            if topic_id not in topics:
                raise IntegrityError(f"{path}:{lineno}: unknown topic {topic_id!r}")
            topic = topics[topic_id]
            text_id = str(record["text_id"])
            entry = topic.text_of(text_id)
            try:
                span = Span(record["ranges"])
                span.check_within(len(entry.text))
            except IntegrityError as exc:
                raise IntegrityError(f"{path}:{lineno}: {exc}") from exc
            sentence_index = record.get("sentence_index")
            if sentence_index is None:
                located = entry.sentence_at(span.start)
                sentence_index = located.index if located else -1
            else:
                sentence_index = int(sentence_index)
                if not -1 <= sentence_index < len(entry.sentences):
                    raise IntegrityError(
                        f"{path}:{lineno}: sentence_index {sentence_index} out of range"
                    )
            iu = InformationUnit.from_parent_text(
                span, text_id, entry.text, sentence_index
            )
            out.setdefault(topic_id, {}).setdefault(text_id, []).append(iu)
    return out


# ---------------------------------------------------------------------------
# Canonical-annotation selection
# ---------------------------------------------------------------------------

NEAR_DUPLICATE_JACCARD = 0.95


def _near_duplicate(a: list[Span], b: list[Span]) -> bool:
    """Annotations match when same IU count and spans pairwise almost equal."""
    if len(a) != len(b):
        return False
    sa = sorted(a, key=lambda s: s.ranges)
    sb = sorted(b, key=lambda s: s.ranges)
    return all(char_jaccard(x, y) >= NEAR_DUPLICATE_JACCARD for x, y in zip(sa, sb))


def select_canonical_annotation(
    annotations: list[list[Span]], rng: random.Random | None = None
) -> list[Span]:
    """Pick one annotation of a sentence out of several workers' versions.

    Near-duplicate annotations are grouped; the biggest group wins and its
    first member is returned. When every annotation is distinct, the one
    splitting the sentence into the most IUs wins. Ties are resolved with
    the supplied RNG.
    """
    if not annotations:
        raise IntegrityError("no annotations given")
    rng = rng or random.Random(0)

    groups: list[list[int]] = []
    for idx, ann in enumerate(annotations):
        for group in groups:
            if _near_duplicate(annotations[group[0]], ann):
                group.append(idx)
                break
        else:
            groups.append([idx])

    if all(len(g) == 1 for g in groups):
        max_count = max(len(a) for a in annotations)
        tied = [i for i, a in enumerate(annotations) if len(a) == max_count]
        return annotations[rng.choice(tied)]

    max_size = max(len(g) for g in groups)
    tied_groups = [g for g in groups if len(g) == max_size]
    group = tied_groups[rng.randrange(len(tied_groups))]
    return annotations[group[0]]
