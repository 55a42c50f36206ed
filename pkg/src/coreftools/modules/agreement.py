"""Inter-annotator agreement on coreference annotations.

Agreement is Krippendorff's alpha where mentions are the objects and the chains the
annotators produced are the classes. Two distances between chains are supported:
Passonneau's graded match (``passonneau_delta``) and MASI (``masi_delta``).
"""

from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from modules.errors import AgreementError
from modules.model import AnnotationSet, Mention

RELIABILITY_THRESHOLD = 0.67
"""
Annotations with an alpha above this value are commonly considered reliable.
"""


def is_reliable(alpha: float) -> bool:
    return alpha > RELIABILITY_THRESHOLD


def _percent(alpha: float) -> str:
    return f"{100 * alpha:>8.2f}" + ("*" if is_reliable(alpha) else " ")


class AgreementTable(NamedTuple):
    """Counts ``counts[i, b]`` of how often object ``i`` was put into class ``b``."""

    objects: tuple
    classes: tuple
    counts: np.ndarray
    annotators: int

    @property
    def marginals(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def build_agreement_table(
    mentions: Iterable[Mention], annotations: Sequence[AnnotationSet]
) -> AgreementTable:
    """Label every declared mention with the member set of the chain each annotator put
    it in. A mention outside all chains of an annotator gets the singleton set of itself.

    :param mentions: The declared mentions (the objects).
    :param annotations: One annotation set per annotator.
    :returns: The agreement table; identical member sets are one class.
    """
    objects = tuple(m.id for m in mentions)
    classes = {}
    rows = []
    for mention_id in objects:
        row = {}
        for annotation in annotations:
            label = annotation.chain_of.get(mention_id, frozenset([mention_id]))
            index = classes.setdefault(label, len(classes))
            row[index] = row.get(index, 0) + 1
        rows.append(row)
    counts = np.zeros((len(objects), len(classes)), dtype=np.int64)
    for i, row in enumerate(rows):
        for index, count in row.items():
            counts[i, index] = count
    return AgreementTable(objects, tuple(classes), counts, len(annotations))


def passonneau_match(b: frozenset, c: frozenset) -> float:
    """Graded match of two chains: 1 if equal, 2/3 if one contains the other,
    1/3 if they share at least two mentions, 0 otherwise."""
    if b == c:
        return 1.0
    if b < c or c < b:
        return 2 / 3
    if len(b & c) >= 2:
        return 1 / 3
    return 0.0


def passonneau_delta(b: frozenset, c: frozenset) -> float:
    return 1.0 - passonneau_match(b, c)


def jaccard(b: frozenset, c: frozenset) -> float:
    union = b | c
    return len(b & c) / len(union) if union else 1.0


def masi_delta(b: frozenset, c: frozenset) -> float:
    """MASI distance: one minus Jaccard similarity times the graded match."""
    return 1.0 - jaccard(b, c) * passonneau_match(b, c)


def distance_matrix(classes: Sequence, delta: Callable) -> np.ndarray:
    size = len(classes)
    matrix = np.zeros((size, size))
    for b in range(size):
        for c in range(b + 1, size):
            matrix[b, c] = matrix[c, b] = delta(classes[b], classes[c])
    return matrix


def krippendorff_alpha(table: AgreementTable, delta: Callable) -> float:
    """Krippendorff's alpha of an agreement table.

    Observed disagreement sums ``n_bi * n_ci * delta(b, c)`` over objects ``i`` and class
    pairs ``b < c``; expected disagreement sums ``n_b * n_c * delta(b, c)`` over the same
    class pairs. Alpha is ``1 - (r*m - 1) / m * observed / expected`` and 1 if the
    expected disagreement is zero.

    :param table: The agreement table.
    :param delta: A symmetric distance between classes with ``delta(b, b) == 0``.
    :raise AgreementError: If there are fewer than two annotators or no objects.
    """
    if table.annotators < 2:
        raise AgreementError(f"agreement needs at least 2 annotators, got {table.annotators}")
    objects = len(table.objects)
    if objects < 1:
        raise AgreementError("agreement needs at least one mention")
    distances = distance_matrix(table.classes, delta)
    counts = table.counts.astype(float)
    observed = 0.5 * float(np.sum((counts @ distances) * counts))
    marginals = table.marginals.astype(float)
    expected = 0.5 * float(marginals @ distances @ marginals)
    if expected == 0:
        return 1.0
    m = table.annotators
    return 1.0 - ((objects * m - 1) / m) * observed / expected


class DocumentAgreement(NamedTuple):
    doc_id: str
    annotators: int
    mentions: int
    annotated: int
    iaa1: float
    iaa2: float


class CorpusAgreement(NamedTuple):
    documents: int
    mentions: int
    weighted_iaa1: float
    weighted_iaa2: float
    mean_iaa1: float
    mean_iaa2: float


def document_agreement(
    doc_id: str, mentions: Sequence[Mention], annotations: Sequence[AnnotationSet]
) -> DocumentAgreement:
    """IAA₁ (Passonneau distance) and IAA₂ (MASI distance) of one document.

    :raise AgreementError: If fewer than two annotations are given.
    """
    table = build_agreement_table(mentions, annotations)
    annotated = {i for a in annotations for chain in a.chains if len(chain) > 1 for i in chain}
    return DocumentAgreement(
        doc_id=doc_id,
        annotators=len(annotations),
        mentions=len(table.objects),
        annotated=len(annotated & set(table.objects)),
        iaa1=krippendorff_alpha(table, passonneau_delta),
        iaa2=krippendorff_alpha(table, masi_delta),
    )


def corpus_agreement(records: Sequence[DocumentAgreement]) -> CorpusAgreement:
    """Aggregate per-document agreement, weighted by mention count and as a plain mean."""
    total = sum(r.mentions for r in records)
    if not records:
        return CorpusAgreement(0, 0, 0.0, 0.0, 0.0, 0.0)
    return CorpusAgreement(
        documents=len(records),
        mentions=total,
        weighted_iaa1=sum(r.iaa1 * r.mentions for r in records) / total if total else 0.0,
        weighted_iaa2=sum(r.iaa2 * r.mentions for r in records) / total if total else 0.0,
        mean_iaa1=sum(r.iaa1 for r in records) / len(records),
        mean_iaa2=sum(r.iaa2 for r in records) / len(records),
    )


def format_agreement(records: Sequence[DocumentAgreement], corpus: CorpusAgreement) -> str:
    """Text table of the document and corpus values in percent; reliable values are
    marked with ``*``."""
    lines = [f"{'document':<24}{'ann':>5}{'ment':>7}{'used':>7}{'IAA1':>8} {'IAA2':>8}"]
    for r in records:
        lines.append(
            f"{r.doc_id:<24}{r.annotators:>5}{r.mentions:>7}{r.annotated:>7}"
            f"{_percent(r.iaa1)}{_percent(r.iaa2)}"
        )
    lines.append(
        f"{'weighted':<24}{'':>5}{corpus.mentions:>7}{'':>7}"
        f"{_percent(corpus.weighted_iaa1)}{_percent(corpus.weighted_iaa2)}"
    )
    lines.append(
        f"{'mean':<24}{'':>5}{'':>7}{'':>7}"
        f"{_percent(corpus.mean_iaa1)}{_percent(corpus.mean_iaa2)}"
    )
    lines.append(f"* alpha above {RELIABILITY_THRESHOLD}, reliable")
    return "\n".join(lines) + "\n"


def agreement_to_json(records: Sequence[DocumentAgreement], corpus: CorpusAgreement) -> dict:
    return {
        "documents": [
            {**r._asdict(), "reliable": is_reliable(r.iaa1) and is_reliable(r.iaa2)}
            for r in records
        ],
        "corpus": corpus._asdict(),
        "threshold": RELIABILITY_THRESHOLD,
    }
