import random
from pathlib import Path

import pytest

from spanalign.corpus import AlignmentPair, AlignmentSet, InformationUnit, Span
from spanalign.corpus_io import load_topics
from spanalign.derive import (
    build_training_pairs,
    dataset_stats,
    derive_clusters,
    derive_fusion,
    derive_ordering,
    derive_salience,
    derive_sentence_planning,
    pyramid_transitive_align,
)
from spanalign.derive_io import (
    load_extractive_links,
    load_scu_links,
    load_system_summaries,
)
from spanalign.errors import IntegrityError

from . import oracles
from .conftest import PrimedMockScorer, make_topic

DATA = Path(__file__).resolve().parent.parent / "data"


def _iu(parent, start, end, sentence_index=-1, surface=None):
    return InformationUnit(
        span=Span([(start, end)]), parent_id=parent,
        sentence_index=sentence_index, surface=surface,
    )


def _pair(s_iu, d_iu):
    return AlignmentPair(summary_iu=s_iu, doc_iu=d_iu, provenance="gold")


def _two_sentence_topic():
    return make_topic(
        documents={"d1": "John ate an apple. Mary drank tea."},
        summaries={"s1": "Reports covered meals. Drinks were shared."},
    )


# ---------------------------------------------------------------------------
# salience / clusters / plans / fusion / ordering
# ---------------------------------------------------------------------------


def test_salience_empty():
    assert derive_salience(AlignmentSet("t1", [])) == []


def test_salience_dedupes_doc_ius():
    doc_iu = _iu("d1", 0, 17)
    aligned = AlignmentSet(
        "t1",
        [_pair(_iu("s1", 0, 7), doc_iu), _pair(_iu("s1", 9, 20), doc_iu)],
    )
    assert len(derive_salience(aligned)) == 1


def test_clusters_single_pivot():
    pivot = _iu("s1", 0, 7)
    aligned = AlignmentSet(
        "t1",
        [
            _pair(pivot, _iu("d1", 0, 8)),
            _pair(pivot, _iu("d1", 10, 17)),
            _pair(pivot, _iu("d1", 20, 30)),
        ],
    )
    clusters = derive_clusters(aligned)
    assert len(clusters) == 1
    assert len(clusters[0].members) == 3


def test_clusters_doc_iu_in_two_clusters():
    shared = _iu("d1", 0, 8)
    aligned = AlignmentSet(
        "t1",
        [_pair(_iu("s1", 0, 7), shared), _pair(_iu("s1", 9, 20), shared)],
    )
    clusters = derive_clusters(aligned)
    assert len(clusters) == 2
    assert all(c.members == (shared,) for c in clusters)
    # salience output is smaller than the sum of cluster sizes
    assert sum(len(c.members) for c in clusters) >= len(derive_salience(aligned))


def test_plans_group_by_pivot_sentence():
    topic = _two_sentence_topic()
    # both pivots start inside summary sentence 0
    aligned = AlignmentSet(
        "t1",
        [
            _pair(_iu("s1", 0, 7), _iu("d1", 0, 8)),
            _pair(_iu("s1", 8, 21), _iu("d1", 10, 17)),
            _pair(_iu("s1", 23, 40), _iu("d1", 19, 33)),
        ],
    )
    clusters = derive_clusters(aligned)
    plans = derive_sentence_planning(clusters, topic)
    assert [(p.sentence_index, len(p.clusters)) for p in plans] == [(0, 2), (1, 1)]
    assert plans[0].sentence_text == "Reports covered meals."


def test_plans_pivot_outside_sentences_is_integrity_error():
    topic = _two_sentence_topic()
    # the pivot starts at the inter-sentence gap (position 22)
    aligned = AlignmentSet("t1", [_pair(_iu("s1", 22, 30), _iu("d1", 0, 8))])
    clusters = derive_clusters(aligned)
    with pytest.raises(IntegrityError):
        derive_sentence_planning(clusters, topic)


def test_fusion_bijection():
    topic = _two_sentence_topic()
    aligned = AlignmentSet(
        "t1",
        [
            _pair(
                InformationUnit.from_parent_text(Span([(0, 7)]), "s1", topic.summaries[0].text, 0),
                InformationUnit.from_parent_text(Span([(0, 8)]), "d1", topic.documents[0].text, 0),
            ),
            _pair(
                InformationUnit.from_parent_text(Span([(23, 40)]), "s1", topic.summaries[0].text, 1),
                InformationUnit.from_parent_text(Span([(19, 33)]), "d1", topic.documents[0].text, 1),
            ),
        ],
    )
    plans = derive_sentence_planning(derive_clusters(aligned), topic)
    fusion = derive_fusion(plans)
    assert len(fusion) == len(plans)
    for plan, (inputs, target) in zip(plans, fusion):
        assert target == plan.sentence_text
        assert len(inputs) == len(plan.clusters)


def test_ordering_single_plan_identity():
    topic = _two_sentence_topic()
    aligned = AlignmentSet("t1", [_pair(_iu("s1", 0, 7), _iu("d1", 0, 8))])
    plans = derive_sentence_planning(derive_clusters(aligned), topic)
    examples = derive_ordering(plans, topic, seed=13)
    assert len(examples) == 1
    assert examples[0].gold_permutation == (0,)


def test_ordering_unshuffle_restores_summary_order():
    topic = make_topic(
        documents={"d1": "John ate an apple."},
        summaries={"s1": "One fact here. Two facts there. Three facts close. Four facts done."},
    )
    sents = topic.summaries[0].sentences
    pairs = [
        _pair(_iu("s1", s.char_offset, s.char_offset + 5), _iu("d1", i, i + 5))
        for i, s in enumerate(sents)
    ]
    aligned = AlignmentSet("t1", pairs)
    plans = derive_sentence_planning(derive_clusters(aligned), topic)
    for seed in range(10):
        examples = derive_ordering(plans, topic, seed=seed)
        example = examples[0]
        perm = example.gold_permutation
        assert sorted(perm) == list(range(len(plans)))
        restored = [example.shuffled[perm[i]] for i in range(len(perm))]
        # oracle: sorting by sentence index gives the same sequence
        assert restored == sorted(example.shuffled, key=lambda p: p.sentence_index)


def test_derive_operations_are_pure():
    topic = _two_sentence_topic()
    aligned = AlignmentSet(
        "t1",
        [
            _pair(_iu("s1", 0, 7), _iu("d1", 0, 8)),
            _pair(_iu("s1", 8, 21), _iu("d1", 10, 17)),
        ],
    )
    assert derive_salience(aligned) == derive_salience(aligned)
    assert derive_clusters(aligned) == derive_clusters(aligned)
    plans = derive_sentence_planning(derive_clusters(aligned), topic)
    assert derive_ordering(plans, topic, 13) == derive_ordering(plans, topic, 13)


# ---------------------------------------------------------------------------
# pyramid transitive alignment
# ---------------------------------------------------------------------------


def _load_pyramid():
    topics = load_topics(DATA / "pyramid" / "topics.jsonl")
    return (
        topics,
        load_system_summaries(DATA / "pyramid" / "system_summaries.jsonl"),
        load_scu_links(DATA / "pyramid" / "scu_links.jsonl"),
        load_extractive_links(DATA / "pyramid" / "extractive_links.jsonl"),
    )


def test_pyramid_matches_brute_force_join_on_toy_corpus():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    assert len(topics) == 5
    total_pairs = 0
    for topic in topics:
        result = pyramid_transitive_align(
            topic,
            sys_by.get(topic.topic_id, {}),
            scu_by.get(topic.topic_id, []),
            ext_by.get(topic.topic_id, []),
        )
        got = {
            (
                p.summary_iu.parent_id,
                frozenset(p.summary_iu.span.indices()),
                p.doc_iu.parent_id,
                frozenset(p.doc_iu.span.indices()),
            )
            for p in result.alignments.pairs
        }
        expected = oracles.brute_force_transitive_join(
            scu_by.get(topic.topic_id, []),
            ext_by.get(topic.topic_id, []),
            sys_by.get(topic.topic_id, {}),
            {d.text_id: d for d in topic.documents},
        )
        assert got == expected, topic.topic_id
        total_pairs += len(got)
    assert total_pairs == 14


def test_pyramid_skips_unlinked_system_sentence():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    topic = next(t for t in topics if t.topic_id == "p3")
    result = pyramid_transitive_align(
        topic, sys_by["p3"], scu_by["p3"], ext_by.get("p3", [])
    )
    assert result.skipped_links == 1
    assert len(result.alignments.pairs) == 1


def test_pyramid_two_sentence_span_splits():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    topic = next(t for t in topics if t.topic_id == "p2")
    result = pyramid_transitive_align(topic, sys_by["p2"], scu_by["p2"], ext_by["p2"])
    wide = [
        p
        for p in result.alignments.pairs
        if p.summary_iu.surface == "The budget was approved and signed."
    ]
    assert len(wide) == 2
    assert {p.doc_iu.surface for p in wide} == {
        "The senate approved the budget.",
        "The president signed the law on Friday.",
    }


def test_pyramid_offset_arithmetic_simple_copy():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    topic = next(t for t in topics if t.topic_id == "p1")
    result = pyramid_transitive_align(topic, sys_by["p1"], scu_by["p1"], ext_by["p1"])
    copied = next(
        p for p in result.alignments.pairs
        if p.doc_iu.surface == "The river flooded the old town."
    )
    doc = topic.document("d11")
    assert doc.text[copied.doc_iu.span.start : copied.doc_iu.span.end] == copied.doc_iu.surface


def test_pyramid_byte_mismatch_is_integrity_error():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    topic = next(t for t in topics if t.topic_id == "p1")
    links = [
        # claim sysA sentence 0 came from d11 sentence 1, which reads differently
        type(ext_by["p1"][0])(
            sys_id="p1sysA", sys_sentence_index=0, doc_id="d11", doc_sentence_index=1
        )
    ]
    with pytest.raises(IntegrityError):
        pyramid_transitive_align(topic, sys_by["p1"], scu_by["p1"], links)


def test_pyramid_output_spans_within_documents():
    topics, sys_by, scu_by, ext_by = _load_pyramid()
    for topic in topics:
        result = pyramid_transitive_align(
            topic,
            sys_by.get(topic.topic_id, {}),
            scu_by.get(topic.topic_id, []),
            ext_by.get(topic.topic_id, []),
        )
        result.alignments.validate_against(topic)


# ---------------------------------------------------------------------------
# training pairs
# ---------------------------------------------------------------------------


def _training_fixture():
    # long disjoint spans keep the combined Jaccard of unintended
    # combinations below 0.25 even when one side matches perfectly
    s1 = _iu("s1", 0, 10, surface="alpha beta")
    s2 = _iu("s1", 12, 60, surface="gamma delta x")
    d1 = _iu("d1", 0, 10, surface="alpha beta")
    d2 = _iu("d1", 15, 60, surface="epsilon ze")
    d3 = _iu("d2", 0, 12, surface="unrelated in")
    gold = AlignmentSet("t1", [_pair(_iu("s1", 0, 10), _iu("d1", 0, 10))])
    return gold, [s1, s2], [d1, d2, d3]


def test_training_exact_gold_pair_positive():
    gold, summary_ius, doc_ius = _training_fixture()
    pairs = build_training_pairs(gold, summary_ius, doc_ius, scorer=None)
    positives = [p for p in pairs if p.label == "positive"]
    assert len(positives) == 1
    assert positives[0].summary_text == "alpha beta"
    assert positives[0].origin == "jaccard_pos"


def test_training_same_doc_negatives():
    gold, summary_ius, doc_ius = _training_fixture()
    pairs = build_training_pairs(gold, summary_ius, doc_ius, scorer=None)
    same_doc = [p for p in pairs if p.origin == "same_doc_neg"]
    # s1 aligned in d1: the other d1 IU joins as a negative; d2 IUs do not
    assert len(same_doc) == 1
    assert same_doc[0].doc_text == "epsilon ze"


def test_training_hard_negatives_need_scorer():
    gold, summary_ius, doc_ius = _training_fixture()
    primed = {("gamma delta x", "unrelated in"): {"similarity": 0.95}}
    pairs = build_training_pairs(
        gold, summary_ius, doc_ius, scorer=PrimedMockScorer(primed, default=0.1)
    )
    hard = [p for p in pairs if p.origin == "hard_neg_sim"]
    assert len(hard) == 1
    assert hard[0].summary_text == "gamma delta x"
    # without a scorer the class is absent
    pairs_no_scorer = build_training_pairs(gold, summary_ius, doc_ius, scorer=None)
    assert not [p for p in pairs_no_scorer if p.origin == "hard_neg_sim"]


def test_training_positive_wins_over_negative_classes():
    gold, summary_ius, doc_ius = _training_fixture()
    primed = {("alpha beta", "alpha beta"): {"similarity": 0.99}}
    pairs = build_training_pairs(
        gold, summary_ius, doc_ius, scorer=PrimedMockScorer(primed, default=0.1)
    )
    for p in pairs:
        if p.summary_text == "alpha beta" and p.doc_text == "alpha beta":
            assert p.label == "positive"


def test_training_below_both_criteria_excluded():
    gold, summary_ius, doc_ius = _training_fixture()
    pairs = build_training_pairs(gold, summary_ius, doc_ius, scorer=None)
    texts = {(p.summary_text, p.doc_text) for p in pairs}
    assert ("gamma delta x", "unrelated in") not in texts


def test_training_positive_count_matches_brute_force_scan():
    rng = random.Random(21)
    from .conftest import random_alignment_set

    for _ in range(30):
        gold = random_alignment_set(rng, min_pairs=1, max_pairs=5)
        summary_ius = [
            _iu("sum1", s, s + rng.randint(3, 30), surface=f"s{idx}")
            for idx, s in enumerate(rng.sample(range(150), 4))
        ]
        doc_ius = [
            _iu(rng.choice(["doc1", "doc2"]), s, s + rng.randint(3, 30), surface=f"d{idx}")
            for idx, s in enumerate(rng.sample(range(150), 5))
        ]
        pairs = build_training_pairs(gold, summary_ius, doc_ius, scorer=None)
        got_positive = sum(p.label == "positive" for p in pairs)
        expected = 0
        for s in summary_ius:
            for d in doc_ius:
                candidate = _pair(s, d)
                if any(
                    oracles.naive_joint_jaccard(candidate, g) >= 0.25 for g in gold.pairs
                ):
                    expected += 1
        assert got_positive == expected


# ---------------------------------------------------------------------------
# dataset stats
# ---------------------------------------------------------------------------


def test_stats_empty():
    topic = _two_sentence_topic()
    stats = dataset_stats([(AlignmentSet("t1", []), topic)])
    assert stats.n_alignments == 0
    assert stats.n_clusters == 0
    assert stats.cluster_size_mean == 0.0


def test_stats_single_cluster_of_three():
    topic = _two_sentence_topic()
    pivot = _iu("s1", 0, 7)
    aligned = AlignmentSet(
        "t1",
        [
            _pair(pivot, _iu("d1", 0, 8)),
            _pair(pivot, _iu("d1", 10, 17)),
            _pair(pivot, _iu("d1", 20, 30)),
        ],
    )
    stats = dataset_stats([(aligned, topic)])
    assert stats.n_clusters == 1
    assert stats.cluster_size_mean == pytest.approx(3.0)
    assert stats.cluster_size_std == pytest.approx(0.0)
    assert "3.00 (0.00)" in dict(stats.rows())["cluster size"]


def _random_stats_fixture(rng):
    topic = make_topic(
        documents={"d1": "John ate an apple. Mary drank tea. Rebels seized towns."},
        summaries={"s1": "Alpha beta gamma delta. Epsilon zeta eta theta. Iota kappa mu."},
    )
    summary = topic.summaries[0]
    pairs = []
    seen = set()
    for _ in range(rng.randint(1, 10)):
        sent = rng.choice(summary.sentences)
        start = rng.randrange(sent.char_offset, sent.end - 2)
        end = rng.randrange(start + 1, sent.end + 1)
        s_iu = _iu("s1", start, end)
        d_start = rng.randrange(0, 40)
        d_iu = _iu("d1", d_start, d_start + rng.randint(2, 10))
        pair = _pair(s_iu, d_iu)
        if pair.key in seen:
            continue
        seen.add(pair.key)
        pairs.append(pair)
    return AlignmentSet("t1", pairs), topic


def test_stats_match_independent_recount():
    rng = random.Random(22)
    for _ in range(50):
        aligned, topic = _random_stats_fixture(rng)
        stats = dataset_stats([(aligned, topic)])
        expected = oracles.recount_stats([(aligned, topic)])
        assert stats.n_alignments == expected["n_alignments"]
        assert stats.n_salient_ius == expected["n_salient_ius"]
        assert stats.n_clusters == expected["n_clusters"]
        assert stats.cluster_size_mean == pytest.approx(expected["cluster_size_mean"])
        assert stats.cluster_size_std == pytest.approx(expected["cluster_size_std"])
        assert stats.clusters_per_sentence_mean == pytest.approx(
            expected["clusters_per_sentence_mean"]
        )
        assert stats.clusters_per_sentence_std == pytest.approx(
            expected["clusters_per_sentence_std"]
        )
