"""Pairwise features of a candidate link ``(m1, m2)`` where ``m1`` precedes ``m2``.

Base features are the mention types, type agreement, head and head lemma matches, equal
last proper noun parts, the acronym relation and head substrings. The asymmetric acronym
and substring features also come reversed and as the disjunction of both directions.
Every type feature is conjoined with every match feature so that matches can be weighted
per mention type.

All features are binary; a ``FeatureVector`` lists the names of the active ones.
"""

import itertools

import numpy as np
from modules.baseline.mentions import (
    MentionType,
    MentionTyper,
    mention_head,
    strip_apostrophe,
    strip_case,
)
from modules.model import Document, Mention
from scipy.sparse import csr_matrix

TYPE_FEATURES = tuple(
    [f"m1_{t.value}" for t in MentionType]
    + [f"m2_{t.value}" for t in MentionType]
    + [f"both_{t.value}" for t in MentionType]
)

DIRECTED_FEATURES = ("acronym", "head_substring", "head_lemma_substring")

MATCH_FEATURES = (
    ("head_match", "head_lemma_match", "last_proper_part_match")
    + tuple(
        f"{name}{suffix}" for name in DIRECTED_FEATURES for suffix in ("", "_reverse", "_any")
    )
)

CONJUNCTION_FEATURES = tuple(
    f"{t}&{m}" for t, m in itertools.product(TYPE_FEATURES, MATCH_FEATURES)
)

FEATURE_NAMES = TYPE_FEATURES + MATCH_FEATURES + CONJUNCTION_FEATURES
"""
The fixed feature space, in model file order.
"""

FEATURE_INDEX = {name: index for index, name in enumerate(FEATURE_NAMES)}


def is_acronym(short: tuple, long: tuple) -> bool:
    """Whether the case stripped surface of ``short`` spells the initials of ``long``.

    ``long`` needs at least two tokens.
    """
    if len(long) < 2:
        return False
    letters = strip_apostrophe("".join(t.surface for t in short)).casefold()
    initials = "".join(t.surface[0] for t in long).casefold()
    return letters == initials


def _contains(needle: str, haystack: str) -> bool:
    return bool(needle) and needle.casefold() in haystack.casefold()


def extract_features(m1: Mention, m2: Mention, doc: Document, typer: MentionTyper) -> frozenset:
    """Active features of the link ``(m1, m2)``.

    :param m1: The earlier mention.
    :param m2: The later mention.
    :param doc: The document of both mentions.
    :param typer: Mention typing for ``doc``.
    :returns: The names of the active features.
    """
    type1, type2 = typer.classify(m1), typer.classify(m2)
    head1, head2 = mention_head(m1, doc), mention_head(m2, doc)
    tokens1, tokens2 = doc.tokens_of(m1), doc.tokens_of(m2)

    active_types = [f"m1_{type1.value}", f"m2_{type2.value}"]
    if type1 == type2:
        active_types.append(f"both_{type1.value}")

    directed = {
        "acronym": (is_acronym(tokens1, tokens2), is_acronym(tokens2, tokens1)),
        "head_substring": (
            _contains(head1.surface, head2.surface),
            _contains(head2.surface, head1.surface),
        ),
        "head_lemma_substring": (
            _contains(head1.lemma, head2.lemma),
            _contains(head2.lemma, head1.lemma),
        ),
    }
    active_matches = []
    if head1.surface.casefold() == head2.surface.casefold():
        active_matches.append("head_match")
    if head1.lemma.casefold() == head2.lemma.casefold():
        active_matches.append("head_lemma_match")
    if (
        type1 == type2 == MentionType.PROPER_NOUN
        and strip_case(tokens1[-1]).casefold() == strip_case(tokens2[-1]).casefold()
    ):
        active_matches.append("last_proper_part_match")
    for name, (forward, reverse) in directed.items():
        if forward:
            active_matches.append(name)
        if reverse:
            active_matches.append(f"{name}_reverse")
        if forward or reverse:
            active_matches.append(f"{name}_any")

    conjunctions = [f"{t}&{m}" for t in active_types for m in active_matches]
    return frozenset(active_types + active_matches + conjunctions)


def to_matrix(vectors) -> csr_matrix:
    """Stack feature vectors into a sparse ``(n, len(FEATURE_NAMES))`` matrix."""
    rows, cols = [], []
    for row, vector in enumerate(vectors):
        for col in sorted(FEATURE_INDEX[name] for name in vector):
            rows.append(row)
            cols.append(col)
    data = np.ones(len(rows))
    return csr_matrix((data, (rows, cols)), shape=(len(vectors), len(FEATURE_NAMES)))
