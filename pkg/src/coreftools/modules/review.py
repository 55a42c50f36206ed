"""Analysis of individual annotations against the adjudicated gold standard.

Two views are offered: how many annotators supported the links that ended up coreferent
or not coreferent in the gold standard, and which kinds of mistakes each annotator made
in their chains.
"""

from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from modules.adjudicator import PairTally
from modules.model import AnnotationSet
from scipy.optimize import linear_sum_assignment
from utils.list_helper import flatten


class HistogramBin(NamedTuple):
    lower: float
    upper: float
    coref: int
    non_coref: int


class ChainCategory(Enum):
    """How an annotator's chain relates to its best matching gold chain.

    - ``EXACT``: the chain equals a gold chain.
    - ``MISSING_MENTIONS``: its gold mentions are a strict part of one gold chain,
        possibly together with mentions in no gold chain.
    - ``FOREIGN_MENTIONS``: it contains mentions of another gold chain than its match.
    - ``UNCHAINED_EXTRA``: it covers its gold chain and adds mentions in no gold chain.
    - ``ONLY_UNCHAINED``: none of its mentions is in a gold chain.
    """

    EXACT = "exact"
    MISSING_MENTIONS = "missing mentions"
    FOREIGN_MENTIONS = "foreign mentions"
    UNCHAINED_EXTRA = "unchained extra"
    ONLY_UNCHAINED = "only unchained"


class MistakeReport(NamedTuple):
    per_annotator: dict
    total: dict


def _same_chain(gold: AnnotationSet, a: int, b: int) -> bool:
    chain = gold.chain_of.get(a)
    return chain is not None and b in chain


def link_support_histogram(tally: PairTally, gold: AnnotationSet, bins: int = 10) -> list:
    """Distribute the annotated links by the share of annotators supporting them.

    A link supported by ``w`` of ``k`` annotators falls into bin ``floor(w / k * bins)``,
    unanimous links into the last bin.

    :returns: One ``HistogramBin`` per bin, counting links coreferent and not coreferent
        in ``gold``.
    """
    coref = [0] * bins
    non_coref = [0] * bins
    k = tally.annotators
    for (a, b), w in tally.counts.items():
        index = min(w * bins // k, bins - 1) if k else 0
        if _same_chain(gold, a, b):
            coref[index] += 1
        else:
            non_coref[index] += 1
    return [
        HistogramBin(i / bins, (i + 1) / bins, coref[i], non_coref[i]) for i in range(bins)
    ]


def _links(size: int) -> int:
    return size * (size - 1) // 2


def _match_chains(chains: Sequence[frozenset], gold_chains: Sequence[frozenset]) -> list:
    """One-to-one matching maximizing shared links; unmatched chains map to ``None``."""
    matched = [None] * len(chains)
    if not chains or not gold_chains:
        return matched
    shared = np.array([[_links(len(c & g)) for g in gold_chains] for c in chains], dtype=float)
    rows, cols = linear_sum_assignment(shared, maximize=True)
    for row, col in zip(rows, cols):
        if shared[row, col] > 0:
            matched[row] = gold_chains[col]
    return matched


def classify_chain(chain: frozenset, match, gold_mentions: frozenset) -> ChainCategory:
    in_gold = chain & gold_mentions
    if not in_gold:
        return ChainCategory.ONLY_UNCHAINED
    if match is None or not in_gold <= match:
        return ChainCategory.FOREIGN_MENTIONS
    if chain == match:
        return ChainCategory.EXACT
    if in_gold < match:
        return ChainCategory.MISSING_MENTIONS
    return ChainCategory.UNCHAINED_EXTRA


def classify_annotator_chains(
    annotations: Sequence[AnnotationSet], gold: AnnotationSet
) -> MistakeReport:
    """Count the chain categories of every annotator; single-mention chains are skipped."""
    gold_chains = sorted((c for c in gold.chains if len(c) > 1), key=min)
    gold_mentions = frozenset(flatten(gold_chains))
    per_annotator = {}
    total = {category: 0 for category in ChainCategory}
    for annotation in annotations:
        chains = sorted((c for c in annotation.chains if len(c) > 1), key=min)
        counts = {category: 0 for category in ChainCategory}
        for chain, match in zip(chains, _match_chains(chains, gold_chains)):
            category = classify_chain(chain, match, gold_mentions)
            counts[category] += 1
            total[category] += 1
        per_annotator[annotation.annotator_id] = counts
    return MistakeReport(per_annotator, total)


def format_review(histogram: Sequence[HistogramBin], report: MistakeReport) -> str:
    lines = ["link support    coref  non-coref"]
    for b in histogram:
        label = f"{100 * b.lower:.0f}-{100 * b.upper:.0f}%"
        lines.append(f"{label:<12}{b.coref:>9}{b.non_coref:>11}")
    lines.append("")
    header = "".join(f"{c.value:>18}" for c in ChainCategory)
    lines.append(f"{'annotator':<20}{header}")
    for annotator, counts in report.per_annotator.items():
        row = "".join(f"{counts[c]:>18}" for c in ChainCategory)
        lines.append(f"{annotator:<20}{row}")
    row = "".join(f"{report.total[c]:>18}" for c in ChainCategory)
    lines.append(f"{'total':<20}{row}")
    return "\n".join(lines) + "\n"


def review_to_json(histogram: Sequence[HistogramBin], report: MistakeReport) -> dict:
    return {
        "histogram": [b._asdict() for b in histogram],
        "annotators": {
            annotator: {c.value: n for c, n in counts.items()}
            for annotator, counts in report.per_annotator.items()
        },
        "total": {c.value: n for c, n in report.total.items()},
    }
