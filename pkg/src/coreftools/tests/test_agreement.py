import itertools
import random

import numpy as np
import pytest
from modules.agreement import (
    RELIABILITY_THRESHOLD,
    AgreementTable,
    agreement_to_json,
    build_agreement_table,
    corpus_agreement,
    document_agreement,
    format_agreement,
    is_reliable,
    jaccard,
    krippendorff_alpha,
    masi_delta,
    passonneau_delta,
)
from modules.errors import AgreementError
from modules.model import AnnotationSet, Mention

A, B, C, D, E = range(5)

MENTIONS = [Mention(i, "1", i + 1, i + 1) for i in range(5)]


def _annotation(name, *chains):
    return AnnotationSet.from_chains(name, chains)


@pytest.mark.parametrize(
    "b,c,passonneau,masi",
    [
        ({A, B, C, D}, {A, B, C, D}, 0.0, 0.0),
        ({A, C, D}, {A, B, C, D}, 1 / 3, 0.5),
        ({A, E}, {A, B, C, D}, 1.0, 1.0),
        ({A, B, E}, {A, B, C, D}, 2 / 3, 1 - (2 / 5) * (1 / 3)),
    ],
)
def test_deltas(b, c, passonneau, masi):
    b, c = frozenset(b), frozenset(c)
    assert passonneau_delta(b, c) == pytest.approx(passonneau)
    assert passonneau_delta(c, b) == pytest.approx(passonneau)
    assert masi_delta(b, c) == pytest.approx(masi)
    assert masi_delta(c, b) == pytest.approx(masi)


def test_jaccard():
    assert jaccard(frozenset({A, C, D}), frozenset({A, B, C, D})) == pytest.approx(0.75)


def test_build_agreement_table_unassigned():
    table = build_agreement_table(MENTIONS[:2], [_annotation("x", {A, B}), _annotation("y")])
    assert table.classes == (frozenset({A, B}), frozenset({A}), frozenset({B}))
    assert table.counts.tolist() == [[1, 1, 0], [1, 0, 1]]
    assert table.marginals.tolist() == [2, 1, 1]


def test_build_agreement_table_rows_sum_to_annotators():
    annotations = [_annotation("x", {A, B}), _annotation("y", {C, D}), _annotation("z")]
    table = build_agreement_table(MENTIONS[:4], annotations)
    assert table.counts.sum(axis=1).tolist() == [3, 3, 3, 3]


def test_unanimous_alpha():
    annotations = [_annotation(name, {A, B}, {C, D, E}) for name in "xyz"]
    table = build_agreement_table(MENTIONS, annotations)
    assert krippendorff_alpha(table, passonneau_delta) == 1.0
    assert krippendorff_alpha(table, masi_delta) == 1.0


def test_alpha_needs_two_annotators():
    table = build_agreement_table(MENTIONS, [_annotation("x", {A, B})])
    with pytest.raises(AgreementError):
        krippendorff_alpha(table, passonneau_delta)


def _transcribed_alpha(table, delta):
    r, m = len(table.objects), table.annotators
    observed = 0.0
    for i in range(r):
        for b, c in itertools.combinations(range(len(table.classes)), 2):
            observed += (
                table.counts[i, b] * table.counts[i, c] * delta(table.classes[b], table.classes[c])
            )
    expected = 0.0
    marginals = table.counts.sum(axis=0)
    for b, c in itertools.combinations(range(len(table.classes)), 2):
        expected += marginals[b] * marginals[c] * delta(table.classes[b], table.classes[c])
    if expected == 0:
        return 1.0
    return 1 - (r * m - 1) / m * observed / expected


def test_alpha_one_deviating_annotator():
    annotations = [
        _annotation("x", {A, B, C}),
        _annotation("y", {A, B, C}),
        _annotation("z", {A, B}),
    ]
    table = build_agreement_table(MENTIONS[:3], annotations)
    for delta in (passonneau_delta, masi_delta):
        expected = _transcribed_alpha(table, delta)
        assert krippendorff_alpha(table, delta) == pytest.approx(expected, abs=1e-12)
        assert expected < 1.0


@pytest.mark.parametrize("seed", range(50))
def test_alpha_matches_transcribed_formula(seed):
    rng = random.Random(seed)
    mentions = MENTIONS[: rng.randint(2, 5)]
    ids = [m.id for m in mentions]
    annotations = []
    for n in range(rng.randint(2, 4)):
        chains = {}
        for mention_id in ids:
            if rng.random() < 0.8:
                chains.setdefault(rng.randint(0, 2), set()).add(mention_id)
        annotations.append(_annotation(f"a{n}", *chains.values()))
    table = build_agreement_table(mentions, annotations)
    for delta in (passonneau_delta, masi_delta):
        alpha = krippendorff_alpha(table, delta)
        assert alpha == pytest.approx(_transcribed_alpha(table, delta), abs=1e-12)
        assert alpha <= 1.0


def test_alpha_random_labels_near_chance():
    rng = random.Random(7)
    r, m = 200, 10
    counts = np.zeros((r, 2), dtype=np.int64)
    for i in range(r):
        for _ in range(m):
            counts[i, rng.randint(0, 1)] += 1
    table = AgreementTable(tuple(range(r)), (frozenset({A, B}), frozenset({C, D})), counts, m)
    assert abs(krippendorff_alpha(table, passonneau_delta)) <= 0.15


def test_document_and_corpus_agreement():
    first = document_agreement(
        "d1", MENTIONS, [_annotation("x", {A, B}), _annotation("y", {A, B})]
    )
    assert (first.annotators, first.mentions, first.annotated) == (2, 5, 2)
    assert first.iaa1 == 1.0
    second = document_agreement(
        "d2", MENTIONS[:2], [_annotation("x", {A, B}), _annotation("y")]
    )
    corpus = corpus_agreement([first, second])
    assert corpus.mentions == 7
    assert corpus.weighted_iaa1 == pytest.approx((5 * 1.0 + 2 * second.iaa1) / 7)
    assert corpus.mean_iaa1 == pytest.approx((1.0 + second.iaa1) / 2)
    report = format_agreement([first, second], corpus)
    assert report.splitlines()[1].startswith("d1")
    assert agreement_to_json([first], corpus_agreement([first]))["corpus"]["documents"] == 1


def test_reliable_values_are_marked():
    assert is_reliable(0.8)
    assert not is_reliable(RELIABILITY_THRESHOLD)
    agreed = document_agreement(
        "d1", MENTIONS, [_annotation("x", {A, B}), _annotation("y", {A, B})]
    )
    split = document_agreement(
        "d2", MENTIONS[:2], [_annotation("x", {A, B}), _annotation("y")]
    )
    lines = format_agreement([agreed, split], corpus_agreement([agreed, split])).splitlines()
    assert lines[1].endswith("100.00*  100.00*")
    assert "*" not in lines[2]
    assert lines[-1] == f"* alpha above {RELIABILITY_THRESHOLD}, reliable"
    report = agreement_to_json([agreed, split], corpus_agreement([agreed, split]))
    assert [d["reliable"] for d in report["documents"]] == [True, False]
    assert report["threshold"] == RELIABILITY_THRESHOLD


def test_corpus_agreement_empty():
    assert corpus_agreement([]).documents == 0
