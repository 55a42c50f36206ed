"""Automatic adjudication of several coreference annotations into one gold standard.

The gold partition G minimizes the divergence from all annotations::

    cost(G) = sum over pairs in one chain of G:        commit * (k - w+)
            + sum over pairs in different chains of G: omit * w+

where ``w+`` is the number of the ``k`` annotators that put the pair into one chain.
Two hard constraints hold: overlapping mentions are never coreferent, and mentions are
only coreferent if at least one annotator linked them. Forced links given by hand are
added as further hard constraints; a forced must-link may join mentions no annotator
linked.

The mention graph with an edge for every linked pair falls apart into connected
components that are solved independently and exactly by branch and bound.
"""

import itertools
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np
from joblib import Parallel, delayed
from modules.errors import AdjudicationError, ParseError
from modules.model import AnnotationSet, Chain, Mention, natural_span_key, overlaps
from utils.env import JOBS, get_env_int
from utils.list_helper import pairs
from utils.logger import log_info

GOLD_ANNOTATOR = "gold"

ORACLE_LIMIT = 10
"""
Largest component ``enumerate_oracle`` accepts.
"""


class Weights(NamedTuple):
    """Cost of omitting a link some annotators made and of committing a link some
    annotators did not make."""

    omit: int = 2
    commit: int = 1


def parse_weights(text: str) -> Weights:
    """Parse ``"omit,commit"`` such as ``"2,1"``.

    :raise ValueError: If the text is not two non-negative integers.
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ValueError(f"weights must be two non-negative integers 'omit,commit', got '{text}'")
    return Weights(int(parts[0]), int(parts[1]))


def _pair(a: int, b: int) -> tuple:
    return (a, b) if a < b else (b, a)


class PairTally(NamedTuple):
    """Number of annotators linking each mention pair; pairs nobody linked are absent."""

    counts: dict
    annotators: int

    def coref(self, a: int, b: int) -> int:
        return self.counts.get(_pair(a, b), 0)


class ForcedLinks(NamedTuple):
    must: tuple = ()
    cannot: tuple = ()


def parse_forced_links(text: str) -> ForcedLinks:
    """Parse manual overrides, one ``must <id> <id>`` or ``cannot <id> <id>`` per line.

    Empty lines and text after ``#`` are ignored.

    :raise ParseError: On any other line.
    """
    must, cannot = [], []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("must", "cannot"):
            raise ParseError(
                f"expected 'must <id> <id>' or 'cannot <id> <id>': '{line}'", line_no
            )
        try:
            pair = _pair(int(parts[1]), int(parts[2]))
        except ValueError:
            raise ParseError(f"mention ids must be integers: '{line}'", line_no)
        if pair[0] == pair[1]:
            raise ParseError(f"a mention cannot be linked to itself: '{line}'", line_no)
        (must if parts[0] == "must" else cannot).append(pair)
    return ForcedLinks(tuple(must), tuple(cannot))


class ComponentReport(NamedTuple):
    size: int
    nodes: int
    cost: int


class AdjudicationResult(NamedTuple):
    gold: AnnotationSet
    cost: int
    components: tuple


def tally_links(mentions: Iterable[Mention], annotations: Sequence[AnnotationSet]) -> PairTally:
    """Count, for every mention pair, the annotators that put both mentions in one chain."""
    counts = {}
    for annotation in annotations:
        for chain in annotation.chains:
            for pair in pairs(sorted(chain)):
                counts[pair] = counts.get(pair, 0) + 1
    return PairTally(dict(sorted(counts.items())), len(annotations))


def objective_cost(
    candidate: AnnotationSet,
    tally: PairTally,
    k: Optional[int] = None,
    weights: Weights = Weights(),
) -> int:
    """Divergence of a candidate partition from the annotations summarized in ``tally``.

    :param candidate: The candidate gold standard.
    :param tally: The link counts.
    :param k: The number of annotators; defaults to ``tally.annotators``.
    :param weights: Omission and commission weights.
    """
    k = tally.annotators if k is None else k
    total_linked = sum(tally.counts.values())
    same_cost = 0
    same_linked = 0
    for chain in candidate.chains:
        for a, b in itertools.combinations(sorted(chain), 2):
            w = tally.coref(a, b)
            same_cost += weights.commit * (k - w)
            same_linked += w
    return same_cost + weights.omit * (total_linked - same_linked)


INFEASIBLE = 1 << 40


class _Component:
    """Pairwise costs and constraints of one component, nodes in document order."""

    def __init__(self, nodes, by_id, tally, weights, must_groups, cannot):
        self.nodes = nodes
        n = len(nodes)
        k = tally.annotators
        self.allowed = np.zeros((n, n), dtype=bool)
        self.must = np.zeros((n, n), dtype=bool)
        self.same = np.zeros((n, n), dtype=np.int64)
        self.diff = np.zeros((n, n), dtype=np.int64)
        for i, j in itertools.combinations(range(n), 2):
            a, b = nodes[i], nodes[j]
            w = tally.coref(a, b)
            forced = must_groups[a] == must_groups[b]
            allowed = (w >= 1 or forced) and _pair(a, b) not in cannot
            allowed = allowed and not overlaps(by_id[a], by_id[b])
            self.allowed[i, j] = self.allowed[j, i] = allowed
            self.must[i, j] = self.must[j, i] = forced
            self.same[i, j] = self.same[j, i] = weights.commit * (k - w)
            self.diff[i, j] = self.diff[j, i] = weights.omit * w
        self.delta = self.same - self.diff
        self.blocked = (~self.allowed).astype(np.int64)
        self.tied = self.must.astype(np.int64)

    def partition_cost(self, labels: Sequence) -> Optional[int]:
        """Cost of a complete labelling, ``None`` if it violates a constraint."""
        cost = 0
        for i, j in itertools.combinations(range(len(labels)), 2):
            if labels[i] == labels[j]:
                if not self.allowed[i, j]:
                    return None
                cost += int(self.same[i, j])
            else:
                if self.must[i, j]:
                    return None
                cost += int(self.diff[i, j])
        return cost

    def chains(self, labels: Sequence) -> list:
        clusters = {}
        for node, label in zip(self.nodes, labels):
            clusters.setdefault(label, []).append(node)
        return [Chain(members) for _, members in sorted(clusters.items())]


def _greedy_labels(component: _Component) -> list:
    """Feasible start solution: merge clusters while a merge lowers the cost."""
    n = len(component.nodes)
    clusters = []
    for t in range(n):
        for members in clusters:
            if component.must[members, t].any():
                members.append(t)
                break
        else:
            clusters.append([t])

    def gain(a, b):
        block = np.ix_(a, b)
        if not component.allowed[block].all():
            return None
        return int(component.delta[block].sum())

    while True:
        best = None
        for x, y in itertools.combinations(range(len(clusters)), 2):
            delta = gain(clusters[x], clusters[y])
            if delta is not None and delta < 0 and (best is None or delta < best[0]):
                best = (delta, x, y)
        if best is None:
            break
        _, x, y = best
        clusters[x] = sorted(clusters[x] + clusters[y])
        del clusters[y]
    return _relabel(clusters, n)


def _relabel(clusters: list, n: int) -> list:
    """Restricted growth labels: clusters numbered by their first node."""
    labels = [0] * n
    for index, members in enumerate(sorted(clusters, key=min)):
        for node in members:
            labels[node] = index
    return labels


class _Search:
    """Depth first search over the cluster assignments of nodes ``start..n-1`` in node
    order, clusters numbered by their first node.

    The lower bound of a partial assignment is its cost, plus the cheapest feasible
    cluster of every later node against the placed nodes, plus ``suffix[t]``, the
    optimal cost among the later nodes ``t..n-1`` alone.
    """

    def __init__(self, component: _Component, suffix: list, start: int):
        n = len(component.nodes)
        self.component = component
        self.suffix = suffix
        self.start = start
        self.n = n
        self.labels = [0] * n
        self.open = 0
        self.nodes = 0
        self.best = INFEASIBLE
        self.best_labels = None
        self.found = None
        # per node: summed omission cost to all placed nodes
        self.placed_diff = np.zeros(n, dtype=np.int64)
        # per node and cluster: change in cost when joining instead of staying apart
        self.joined = np.zeros((n, n), dtype=np.int64)
        # per node and cluster: placed members it may not join, and must join
        self.blocked = np.zeros((n, n), dtype=np.int64)
        self.tied = np.zeros((n, n), dtype=np.int64)

    def options(self, t: int) -> list:
        """Feasible clusters for node ``t`` with the cost of its pairs to placed nodes."""
        k = self.open
        base = int(self.placed_diff[t])
        costs = self.joined[t, :k].tolist()
        blocked = self.blocked[t, :k].tolist()
        tied = np.flatnonzero(self.tied[t, :k]).tolist()
        if len(tied) > 1:
            return []
        result = [(c, base + costs[c]) for c in (tied or range(k)) if not blocked[c]]
        if not tied:
            result.append((k, base))
        return result

    def place(self, t: int, cluster: int, sign: int = 1):
        self.labels[t] = cluster
        self.placed_diff += sign * self.component.diff[t]
        self.joined[:, cluster] += sign * self.component.delta[t]
        self.blocked[:, cluster] += sign * self.component.blocked[t]
        self.tied[:, cluster] += sign * self.component.tied[t]

    def remaining(self, t: int) -> int:
        """Least cost of the pairs between the nodes up to ``t`` and the later nodes."""
        if t + 1 >= self.n:
            return 0
        rows = slice(t + 1, self.n)
        k = self.open
        costs = np.where(self.blocked[rows, :k] == 0, self.joined[rows, :k], INFEASIBLE)
        tied = self.tied[rows, :k] > 0
        n_tied = tied.sum(axis=1)
        best = np.where(
            n_tied == 0,
            np.minimum(costs.min(axis=1), 0),
            np.where(tied, costs, INFEASIBLE).min(axis=1),
        )
        if n_tied.max() > 1 or best.max() >= INFEASIBLE:
            return INFEASIBLE
        return int(self.placed_diff[rows].sum() + best.sum())

    def _step(self, t: int, cluster: int, cost: int):
        """Place ``t`` and get the lower bound below it, or ``None`` if it is infeasible."""
        opening = cluster == self.open
        if opening:
            self.open += 1
        self.place(t, cluster)
        remaining = self.remaining(t)
        return opening, (None if remaining >= INFEASIBLE else cost + remaining)

    def _undo(self, t: int, cluster: int, opening: bool):
        self.place(t, cluster, -1)
        if opening:
            self.open -= 1

    def minimize(self, upper: int) -> int:
        """Optimal cost of the nodes ``start..n-1``, or ``upper`` if none is lower."""
        self.best = upper
        self._minimize(self.start, 0)
        return self.best

    def _minimize(self, t: int, cost: int):
        self.nodes += 1
        if t == self.n:
            self.best = cost
            self.best_labels = list(self.labels)
            return
        for cluster, step in sorted(self.options(t), key=lambda option: option[1]):
            if cost + step + self.suffix[t + 1] >= self.best:
                break
            opening, bound = self._step(t, cluster, cost + step)
            if bound is not None and bound + self.suffix[t + 1] < self.best:
                self._minimize(t + 1, cost + step)
            self._undo(t, cluster, opening)

    def first_within(self, target: int) -> Optional[list]:
        """The first labelling in lexicographic order whose cost is at most ``target``."""
        self._first(self.start, 0, target)
        return self.found

    def _first(self, t: int, cost: int, target: int) -> bool:
        self.nodes += 1
        if t == self.n:
            self.found = list(self.labels)
            return True
        for cluster, step in self.options(t):
            opening, bound = self._step(t, cluster, cost + step)
            done = (
                bound is not None
                and bound + self.suffix[t + 1] <= target
                and self._first(t + 1, cost + step, target)
            )
            self._undo(t, cluster, opening)
            if done:
                return True
        return False


def _insert(component: _Component, start: int, labels: list, cost: int):
    """Cheapest feasible way to add node ``start`` to a labelling of the nodes after it.

    :returns: ``(cost, labels)``, or ``(INFEASIBLE, None)``.
    """
    n = len(component.nodes)
    later = list(range(start + 1, n))
    clusters = {}
    for node in later:
        clusters.setdefault(labels[node], []).append(node)
    base = int(component.diff[start, later].sum())
    partners = int(component.must[start, later].sum())
    options = [] if partners else [(base, n + start)]
    for label, members in clusters.items():
        if component.allowed[start, members].all() and (
            int(component.must[start, members].sum()) == partners
        ):
            options.append((base + int(component.delta[start, members].sum()), label))
    if not options:
        return INFEASIBLE, None
    extra, label = min(options, key=lambda option: option[0])
    seeded = list(labels)
    seeded[start] = label
    return cost + extra, seeded


def _branch_and_bound(component: _Component):
    """Exact minimum by branch and bound.

    The optimal costs of the node suffixes ``t..n-1`` are solved first, from the shortest,
    each seeded with the previous optimum, and bound every later search. Among optimal
    labellings the lexicographically smallest one is returned.
    """
    n = len(component.nodes)
    suffix = [0] * (n + 1)
    labels = [0] * n
    explored = 0
    for start in range(n - 1, -1, -1):
        upper, seed = _insert(component, start, labels, suffix[start + 1])
        if start == 0:
            greedy = _greedy_labels(component)
            greedy_cost = component.partition_cost(greedy)
            if greedy_cost is not None and greedy_cost < upper:
                upper, seed = greedy_cost, greedy
        search = _Search(component, suffix, start)
        suffix[start] = search.minimize(upper)
        explored += search.nodes
        if suffix[start] >= INFEASIBLE:
            raise AdjudicationError("forced links admit no feasible solution")
        labels = search.best_labels or seed
    search = _Search(component, suffix, 0)
    labels = search.first_within(suffix[0])
    explored += search.nodes
    if labels is None:
        raise AdjudicationError("forced links admit no feasible solution")
    return labels, suffix[0], explored


def restricted_growth_strings(n: int):
    """All set partitions of ``n`` elements as restricted growth strings, in lexicographic
    order."""
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def extend(t, used):
        if t == n:
            yield tuple(labels)
            return
        for cluster in range(used + 1):
            labels[t] = cluster
            yield from extend(t + 1, max(used, cluster + 1))

    yield from extend(1, 1)


def _enumerate(component: _Component):
    best_labels, best_cost, nodes = None, None, 0
    for labels in restricted_growth_strings(len(component.nodes)):
        nodes += 1
        cost = component.partition_cost(labels)
        if cost is not None and (best_cost is None or cost < best_cost):
            best_labels, best_cost = list(labels), cost
    if best_labels is None:
        raise AdjudicationError("forced links admit no feasible solution")
    return best_labels, best_cost, nodes


def _must_groups(mention_ids: Sequence[int], forced: ForcedLinks, by_id: dict) -> dict:
    """Map every mention to a representative of its must-link group.

    :raise AdjudicationError: If forced links refer to unknown mentions or contradict
        each other or the overlap constraint.
    """
    for a, b in forced.must + forced.cannot:
        for mention_id in (a, b):
            if mention_id not in by_id:
                raise AdjudicationError(f"forced link refers to unknown mention {mention_id}")
    graph = nx.Graph()
    graph.add_nodes_from(mention_ids)
    graph.add_edges_from(forced.must)
    groups = {}
    for group in nx.connected_components(graph):
        representative = min(group)
        for mention_id in group:
            groups[mention_id] = representative
        for a, b in itertools.combinations(sorted(group), 2):
            if overlaps(by_id[a], by_id[b]):
                raise AdjudicationError(f"forced links join overlapping mentions {a} and {b}")
    for a, b in forced.cannot:
        if groups[a] == groups[b]:
            raise AdjudicationError(f"mentions {a} and {b} are forced both together and apart")
    return groups


def _solve(nodes, by_id, tally, weights, must_groups, cannot, solver):
    component = _Component(nodes, by_id, tally, weights, must_groups, cannot)
    labels, cost, explored = solver(component)
    return component.chains(labels), cost, explored


def _adjudicate(
    mentions: Sequence[Mention],
    annotations: Sequence[AnnotationSet],
    weights: Weights,
    forced: Optional[ForcedLinks],
    order_key: Callable,
    solver: Callable,
    component_limit: Optional[int],
    n_jobs: Optional[int],
) -> AdjudicationResult:
    if not annotations:
        raise AdjudicationError("adjudication needs at least one annotation")
    forced = forced or ForcedLinks()
    mentions = sorted(mentions, key=lambda m: (order_key(m), m.id))
    by_id = {m.id: m for m in mentions}
    position = {m.id: i for i, m in enumerate(mentions)}
    tally = tally_links(mentions, annotations)
    for a, b in tally.counts:
        if a not in by_id or b not in by_id:
            unknown = a if a not in by_id else b
            raise AdjudicationError(f"annotations link undeclared mention {unknown}")
    must_groups = _must_groups(list(by_id), forced, by_id)
    cannot = set(forced.cannot)

    graph = nx.Graph()
    graph.add_nodes_from(by_id)
    graph.add_edges_from(tally.counts)
    graph.add_edges_from(forced.must)
    components = sorted(
        (sorted(c, key=position.get) for c in nx.connected_components(graph)),
        key=lambda c: position[c[0]],
    )
    if component_limit is not None:
        largest = max((len(c) for c in components), default=0)
        if largest > component_limit:
            raise AdjudicationError(
                f"component of {largest} mentions exceeds the limit of {component_limit}"
            )
    log_info(
        f"adjudicating {len(mentions)} mentions from {tally.annotators} annotations in "
        f"{len(components)} components, largest {max((len(c) for c in components), default=0)}"
    )
    n_jobs = get_env_int(JOBS, 1) if n_jobs is None else n_jobs
    solved = Parallel(n_jobs=n_jobs)(
        delayed(_solve)(c, by_id, tally, weights, must_groups, cannot, solver)
        for c in components
    )
    chains = []
    reports = []
    for nodes, (component_chains, cost, explored) in zip(components, solved):
        if len(nodes) > 1:
            log_info(f"component of {len(nodes)} mentions: {explored} nodes, cost {cost}")
        chains.extend(c for c in component_chains if len(c) > 1)
        reports.append(ComponentReport(len(nodes), explored, cost))
    chains.sort(key=lambda c: min(position[i] for i in c))
    gold = AnnotationSet(GOLD_ANNOTATOR, tuple(chains))
    return AdjudicationResult(gold, sum(r.cost for r in reports), tuple(reports))


def adjudicate(
    mentions: Sequence[Mention],
    annotations: Sequence[AnnotationSet],
    weights: Weights = Weights(),
    forced: Optional[ForcedLinks] = None,
    order_key: Callable = natural_span_key,
    n_jobs: Optional[int] = None,
) -> AdjudicationResult:
    """Find the gold standard of least divergence from the annotations.

    :param mentions: The declared mentions.
    :param annotations: One annotation set per annotator, ``k = len(annotations)``.
    :param weights: Omission and commission weights.
    :param forced: Manual must-link and cannot-link pairs, enforced as hard constraints.
    :param order_key: Document order of mentions, ``Document.order_key`` when known.
        Ties between optimal solutions go to the one whose chain labels, read in this
        order with chains numbered by first mention, are lexicographically smallest.
    :param n_jobs: joblib workers for the components; defaults to ``COREFTOOLS_JOBS``.
    :returns: The gold standard without singletons, its cost and per-component reports.
    :raise AdjudicationError: If there is no annotation or the forced links contradict.
    """
    return _adjudicate(
        mentions, annotations, weights, forced, order_key, _branch_and_bound, None, n_jobs
    )


def enumerate_oracle(
    mentions: Sequence[Mention],
    annotations: Sequence[AnnotationSet],
    weights: Weights = Weights(),
    forced: Optional[ForcedLinks] = None,
    order_key: Callable = natural_span_key,
    limit: int = ORACLE_LIMIT,
) -> AdjudicationResult:
    """Same contract as ``adjudicate``, solved by enumerating every partition of every
    component. Meant for checking the solver on small inputs.

    :raise AdjudicationError: If a component has more than ``limit`` mentions.
    """
    return _adjudicate(mentions, annotations, weights, forced, order_key, _enumerate, limit, 1)
