"""Coreference scoring: MUC, B³, CEAF (mention and entity based), BLANC and LEA.

Every metric compares a key (gold) and a response (system) given as iterables of chains,
each chain a set of hashable mention identifiers. Mentions are matched by equality, so
callers pass spans ``(sentence_no, from_ix, to_ix)`` when comparing files.

Metrics do not drop singletons; use ``modules.model.normalize_chains`` first when the
corpus convention excludes them. Recall and precision are kept as numerator/denominator
pairs so that scores over several documents can be accumulated before dividing.
"""

from collections import Counter, defaultdict
from enum import Enum
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from modules.errors import MetricError
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class Metric(Enum):
    MUC = "muc"
    BCUB = "bcub"
    CEAFM = "ceafm"
    CEAFE = "ceafe"
    BLANC = "blanc"
    LEA = "lea"


ALL_METRICS = tuple(Metric)

CONLL_METRICS = (Metric.MUC, Metric.BCUB, Metric.CEAFE)
"""
The three metrics averaged into the CoNLL score.
"""


def parse_metrics(text: str) -> list:
    """Parse a comma separated metric list such as ``"muc,lea"``; ``"all"`` selects all.

    :raise ValueError: On an unknown metric name.
    """
    names = [name.strip().lower() for name in text.split(",") if name.strip()]
    if not names or "all" in names:
        return list(ALL_METRICS)
    metrics = []
    for name in names:
        try:
            metric = Metric(name)
        except ValueError:
            known = ", ".join(m.value for m in ALL_METRICS)
            raise ValueError(f"unknown metric '{name}', expected one of {known} or all")
        if metric not in metrics:
            metrics.append(metric)
    return metrics


class RatioPair(NamedTuple):
    numerator: float = 0.0
    denominator: float = 0.0

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator if self.denominator else 0.0

    def __add__(self, other):
        return RatioPair(self.numerator + other.numerator, self.denominator + other.denominator)


def f_measure(recall: float, precision: float) -> float:
    if recall + precision == 0:
        return 0.0
    return 2 * recall * precision / (recall + precision)


class MetricScore(NamedTuple):
    """Score of one metric. For BLANC, ``f1`` is the BLANC value and ``coref`` /
    ``non_coref`` hold the coreference and non-coreference link scores."""

    metric: Optional[Metric]
    recall: RatioPair
    precision: RatioPair
    f1: float
    coref: Optional["MetricScore"] = None
    non_coref: Optional["MetricScore"] = None


def make_score(metric: Metric, recall: RatioPair, precision: RatioPair) -> MetricScore:
    return MetricScore(metric, recall, precision, f_measure(recall.ratio, precision.ratio))


def _as_sets(chains: Iterable) -> list:
    return [frozenset(c) for c in chains if len(c) > 0]


def _owner(chains: Sequence) -> dict:
    return {mention: index for index, chain in enumerate(chains) for mention in chain}


def _link(size: int) -> int:
    return size * (size - 1) // 2


def _muc_side(key: Sequence, response: Sequence) -> RatioPair:
    owner = _owner(response)
    numerator = denominator = 0
    for chain in key:
        partitions = set()
        uncovered = 0
        for mention in chain:
            index = owner.get(mention)
            if index is None:
                uncovered += 1
            else:
                partitions.add(index)
        numerator += len(chain) - (len(partitions) + uncovered)
        denominator += len(chain) - 1
    return RatioPair(numerator, denominator)


def score_muc(key: Iterable, response: Iterable) -> MetricScore:
    """MUC: the number of links needed to rebuild every key chain from its partition by
    the response, over the minimum number of links of the key chains."""
    key, response = _as_sets(key), _as_sets(response)
    return make_score(Metric.MUC, _muc_side(key, response), _muc_side(response, key))


def _bcub_side(key: Sequence, response: Sequence) -> RatioPair:
    owner = _owner(response)
    numerator = 0.0
    for chain in key:
        overlaps = Counter(owner[m] for m in chain if m in owner)
        numerator += sum(count * count for count in overlaps.values()) / len(chain)
    return RatioPair(numerator, sum(len(chain) for chain in key))


def score_bcub(key: Iterable, response: Iterable) -> MetricScore:
    key, response = _as_sets(key), _as_sets(response)
    return make_score(Metric.BCUB, _bcub_side(key, response), _bcub_side(response, key))


def _overlap_counts(key: Sequence, response: Sequence) -> dict:
    """Sizes of the non-empty intersections ``|K_i ∩ R_j|`` keyed by ``(i, j)``."""
    owner = _owner(response)
    counts = defaultdict(int)
    for i, chain in enumerate(key):
        for mention in chain:
            j = owner.get(mention)
            if j is not None:
                counts[(i, j)] += 1
    return dict(sorted(counts.items()))


def optimal_alignment(similarities: dict, n_key: int, n_response: int) -> float:
    """Total similarity of the best one-to-one mapping between key and response chains.

    The bipartite similarity graph is split into connected components, each solved by
    ``scipy.optimize.linear_sum_assignment``.

    :param similarities: Non-zero similarities keyed by ``(key index, response index)``.
    :param n_key: Number of key chains.
    :param n_response: Number of response chains.
    :returns: The maximal total similarity.
    """
    if not similarities:
        return 0.0
    rows = np.array([i for i, _ in similarities], dtype=np.int64)
    cols = np.array([n_key + j for _, j in similarities], dtype=np.int64)
    size = n_key + n_response
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    _, labels = connected_components(graph, directed=False)

    components = defaultdict(list)
    for (i, j), value in similarities.items():
        components[labels[i]].append((i, j, value))
    total = 0.0
    for label in sorted(components):
        entries = components[label]
        key_index = {i: n for n, i in enumerate(sorted({i for i, _, _ in entries}))}
        response_index = {j: n for n, j in enumerate(sorted({j for _, j, _ in entries}))}
        matrix = np.zeros((len(key_index), len(response_index)))
        for i, j, value in entries:
            matrix[key_index[i], response_index[j]] = value
        row_ind, col_ind = linear_sum_assignment(matrix, maximize=True)
        total += float(matrix[row_ind, col_ind].sum())
    return total


def score_ceaf(key: Iterable, response: Iterable, variant: str = "e") -> MetricScore:
    """CEAF with the mention based (``"m"``) or entity based (``"e"``) similarity.

    :raise ValueError: If ``variant`` is neither ``"m"`` nor ``"e"``.
    """
    key, response = _as_sets(key), _as_sets(response)
    counts = _overlap_counts(key, response)
    if variant == "m":
        metric = Metric.CEAFM
        similarities = {pair: float(count) for pair, count in counts.items()}
        key_total = sum(len(c) for c in key)
        response_total = sum(len(c) for c in response)
    elif variant == "e":
        metric = Metric.CEAFE
        similarities = {
            (i, j): 2.0 * count / (len(key[i]) + len(response[j]))
            for (i, j), count in counts.items()
        }
        key_total = len(key)
        response_total = len(response)
    else:
        raise ValueError(f"unknown CEAF variant '{variant}'")
    best = optimal_alignment(similarities, len(key), len(response))
    return make_score(metric, RatioPair(best, key_total), RatioPair(best, response_total))


class LinkCounts(NamedTuple):
    """Sizes of the coreference link sets C and non-coreference link sets N of key and
    response, and of their intersections."""

    coref_key: int
    coref_response: int
    coref_common: int
    non_coref_key: int
    non_coref_response: int
    non_coref_common: int


def count_links(key: Sequence, response: Sequence) -> LinkCounts:
    """Count BLANC link sets without enumerating links.

    Non-coreference links shared by key and response are the pairs of mentions known
    to both sides that neither side links.
    """
    key_mentions = set().union(*key) if key else set()
    response_mentions = set().union(*response) if response else set()
    common = key_mentions & response_mentions

    coref_key = sum(_link(len(c)) for c in key)
    coref_response = sum(_link(len(c)) for c in response)
    coref_common = sum(_link(count) for count in _overlap_counts(key, response).values())
    key_in_common = sum(_link(len(c & common)) for c in key)
    response_in_common = sum(_link(len(c & common)) for c in response)
    return LinkCounts(
        coref_key=coref_key,
        coref_response=coref_response,
        coref_common=coref_common,
        non_coref_key=_link(len(key_mentions)) - coref_key,
        non_coref_response=_link(len(response_mentions)) - coref_response,
        non_coref_common=_link(len(common)) - key_in_common - response_in_common + coref_common,
    )


def blanc_from_parts(coref: MetricScore, non_coref: MetricScore) -> MetricScore:
    """Combine link scores into BLANC.

    Without any coreference link on either side BLANC is the non-coreference F; without
    any non-coreference link it is the coreference F.
    """
    no_coref = coref.recall.denominator == 0 and coref.precision.denominator == 0
    no_non_coref = non_coref.recall.denominator == 0 and non_coref.precision.denominator == 0
    if no_coref:
        parts = [non_coref]
    elif no_non_coref:
        parts = [coref]
    else:
        parts = [coref, non_coref]
    recall = RatioPair(sum(p.recall.ratio for p in parts), len(parts))
    precision = RatioPair(sum(p.precision.ratio for p in parts), len(parts))
    blanc = sum(p.f1 for p in parts) / len(parts)
    return MetricScore(Metric.BLANC, recall, precision, blanc, coref, non_coref)


def score_blanc(key: Iterable, response: Iterable) -> MetricScore:
    key, response = _as_sets(key), _as_sets(response)
    counts = count_links(key, response)
    coref = make_score(
        Metric.BLANC,
        RatioPair(counts.coref_common, counts.coref_key),
        RatioPair(counts.coref_common, counts.coref_response),
    )
    non_coref = make_score(
        Metric.BLANC,
        RatioPair(counts.non_coref_common, counts.non_coref_key),
        RatioPair(counts.non_coref_common, counts.non_coref_response),
    )
    return blanc_from_parts(coref, non_coref)


def _lea_side(key: Sequence, response: Sequence) -> RatioPair:
    owner = _owner(response)
    numerator = 0.0
    for chain in key:
        if len(chain) == 1:
            (mention,) = chain
            index = owner.get(mention)
            resolution = 1.0 if index is not None and len(response[index]) == 1 else 0.0
        else:
            overlaps = Counter(owner[m] for m in chain if m in owner)
            resolved = sum(_link(count) for count in overlaps.values())
            resolution = resolved / _link(len(chain))
        numerator += len(chain) * resolution
    return RatioPair(numerator, sum(len(chain) for chain in key))


def score_lea(key: Iterable, response: Iterable) -> MetricScore:
    """LEA: every entity counts by its size and is resolved by the share of its links
    found in the other side. A singleton entity counts as resolved only if the other side
    has the same singleton."""
    key, response = _as_sets(key), _as_sets(response)
    return make_score(Metric.LEA, _lea_side(key, response), _lea_side(response, key))


SCORERS = {
    Metric.MUC: score_muc,
    Metric.BCUB: score_bcub,
    Metric.CEAFM: lambda key, response: score_ceaf(key, response, "m"),
    Metric.CEAFE: lambda key, response: score_ceaf(key, response, "e"),
    Metric.BLANC: score_blanc,
    Metric.LEA: score_lea,
}


def score(key: Iterable, response: Iterable, metrics: Iterable = ALL_METRICS) -> dict:
    """Score one document with several metrics.

    :returns: A ``dict`` of ``Metric`` to ``MetricScore`` in the requested order.
    """
    key, response = _as_sets(key), _as_sets(response)
    return {metric: SCORERS[metric](key, response) for metric in metrics}


def accumulate(scores: Sequence, metric: Optional[Metric] = None) -> MetricScore:
    """Micro-average scores of one metric: numerators and denominators are summed in
    input order before dividing.

    :param scores: The per-document scores.
    :param metric: The metric of an empty ``scores``.
    :raise MetricError: If the scores belong to different metrics.
    """
    metrics = {s.metric for s in scores}
    if len(metrics) > 1:
        names = sorted(m.value for m in metrics if m is not None)
        raise MetricError(f"cannot accumulate scores of different metrics: {names}")
    if metrics:
        metric = metrics.pop()
    if metric == Metric.BLANC and scores:
        coref = _sum_scores([s.coref for s in scores], metric)
        non_coref = _sum_scores([s.non_coref for s in scores], metric)
        return blanc_from_parts(coref, non_coref)
    return _sum_scores(scores, metric)


def _sum_scores(scores: Sequence, metric: Optional[Metric]) -> MetricScore:
    recall = RatioPair()
    precision = RatioPair()
    for s in scores:
        recall = recall + s.recall
        precision = precision + s.precision
    return MetricScore(metric, recall, precision, f_measure(recall.ratio, precision.ratio))


def score_documents(pairs: Iterable, metrics: Iterable = ALL_METRICS) -> dict:
    """Score several documents and accumulate per metric.

    :param pairs: ``(key, response)`` chain collections, one per document.
    :returns: A ``dict`` of ``Metric`` to the accumulated ``MetricScore``.
    """
    metrics = list(metrics)
    per_metric = {metric: [] for metric in metrics}
    for key, response in pairs:
        for metric, result in score(key, response, metrics).items():
            per_metric[metric].append(result)
    return {metric: accumulate(results, metric) for metric, results in per_metric.items()}


def conll_average(scores: dict) -> Optional[float]:
    """Mean F1 of MUC, B³ and CEAF_e, or ``None`` if one of them was not computed."""
    if not all(metric in scores for metric in CONLL_METRICS):
        return None
    return sum(scores[metric].f1 for metric in CONLL_METRICS) / len(CONLL_METRICS)


def format_report(scores: dict) -> str:
    """Aligned text table with recall, precision and F1 in percent and the raw ratios."""
    lines = [f"{'metric':<8}{'R':>9}{'P':>9}{'F1':>9}   recall   precision"]
    for metric, s in scores.items():
        lines.append(
            f"{metric.value:<8}{100 * s.recall.ratio:>9.2f}{100 * s.precision.ratio:>9.2f}"
            f"{100 * s.f1:>9.2f}   {s.recall.numerator:g}/{s.recall.denominator:g}"
            f"   {s.precision.numerator:g}/{s.precision.denominator:g}"
        )
    average = conll_average(scores)
    if average is not None:
        lines.append(f"{'conll':<8}{'':>9}{'':>9}{100 * average:>9.2f}")
    return "\n".join(lines) + "\n"


def _score_to_json(s: MetricScore) -> dict:
    result = {
        "P": s.precision.ratio,
        "R": s.recall.ratio,
        "F1": s.f1,
        "num": {"recall": s.recall.numerator, "precision": s.precision.numerator},
        "den": {"recall": s.recall.denominator, "precision": s.precision.denominator},
    }
    if s.coref is not None:
        result["coref"] = _score_to_json(s.coref)
        result["non_coref"] = _score_to_json(s.non_coref)
    return result


def report_to_json(scores: dict) -> dict:
    """Machine readable report: metric name to ``{P, R, F1, num, den}``."""
    result = {metric.value: _score_to_json(s) for metric, s in scores.items()}
    average = conll_average(scores)
    if average is not None:
        result["conll"] = average
    return result
