from modules.adjudicator import tally_links
from modules.model import AnnotationSet, Mention
from modules.review import (
    ChainCategory,
    classify_annotator_chains,
    classify_chain,
    format_review,
    link_support_histogram,
    review_to_json,
)

A, B, C, D, E, F = range(6)

MENTIONS = [Mention(i, "1", i + 1, i + 1) for i in range(6)]

GOLD = AnnotationSet.from_chains("gold", [{A, B, C}, {D, E}])


def test_classify_chain():
    gold_mentions = frozenset({A, B, C, D, E})
    abc, de = frozenset({A, B, C}), frozenset({D, E})
    assert classify_chain(frozenset({A, B, C}), abc, gold_mentions) == ChainCategory.EXACT
    assert classify_chain(frozenset({A, B}), abc, gold_mentions) == ChainCategory.MISSING_MENTIONS
    assert (
        classify_chain(frozenset({A, B, F}), abc, gold_mentions)
        == ChainCategory.MISSING_MENTIONS
    )
    assert (
        classify_chain(frozenset({A, B, D}), abc, gold_mentions)
        == ChainCategory.FOREIGN_MENTIONS
    )
    assert (
        classify_chain(frozenset({D, E, F}), de, gold_mentions) == ChainCategory.UNCHAINED_EXTRA
    )
    assert classify_chain(frozenset({F}), None, gold_mentions) == ChainCategory.ONLY_UNCHAINED


def test_classify_annotator_chains():
    annotations = [
        AnnotationSet.from_chains("x", [{A, B, C}, {D, E, F}]),
        AnnotationSet.from_chains("y", [{A, B}, {C, D, E}]),
    ]
    report = classify_annotator_chains(annotations, GOLD)
    x, y = report.per_annotator["x"], report.per_annotator["y"]
    assert x[ChainCategory.EXACT] == 1
    assert x[ChainCategory.UNCHAINED_EXTRA] == 1
    assert y[ChainCategory.MISSING_MENTIONS] == 1
    assert y[ChainCategory.FOREIGN_MENTIONS] == 1
    assert sum(report.total.values()) == 4


def test_link_support_histogram():
    annotations = [
        AnnotationSet.from_chains("x", [{A, B, C}]),
        AnnotationSet.from_chains("y", [{A, B}, {C, D}]),
    ]
    histogram = link_support_histogram(tally_links(MENTIONS, annotations), GOLD, bins=4)
    # (A,B) by both; (A,C), (B,C), (C,D) by one annotator
    assert [(b.coref, b.non_coref) for b in histogram] == [(0, 0), (0, 0), (2, 1), (1, 0)]
    assert (histogram[2].lower, histogram[3].upper) == (0.5, 1.0)


def test_format_and_json():
    annotations = [AnnotationSet.from_chains("x", [{A, B, C}])]
    histogram = link_support_histogram(tally_links(MENTIONS, annotations), GOLD)
    report = classify_annotator_chains(annotations, GOLD)
    text = format_review(histogram, report)
    assert text.splitlines()[-1].startswith("total")
    as_json = review_to_json(histogram, report)
    assert as_json["annotators"]["x"]["exact"] == 1
    assert len(as_json["histogram"]) == 10
