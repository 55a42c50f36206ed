"""Building coreference chains from scored candidate links.

Candidates are all links from a mention to its predecessors, except links from a pronoun
to a later non-pronoun. Both builders go through mentions in document order and never
create a chain with overlapping mentions; chains of a single mention are dropped.
"""

from typing import Callable, Sequence

from modules.baseline.features import extract_features
from modules.baseline.mentions import MentionType, MentionTyper
from modules.baseline.training import LinearModel
from modules.model import Chain, Document, Mention, overlaps


class _Chains:
    """Disjoint chains with merging that refuses overlapping mentions."""

    def __init__(self, mentions: Sequence[Mention]):
        self.by_id = {m.id: m for m in mentions}
        self.chain = {m.id: m.id for m in mentions}
        self.members = {m.id: [m.id] for m in mentions}

    def merge(self, a: int, b: int) -> bool:
        chain_a, chain_b = self.chain[a], self.chain[b]
        if chain_a == chain_b:
            return False
        for x in self.members[chain_a]:
            for y in self.members[chain_b]:
                if overlaps(self.by_id[x], self.by_id[y]):
                    return False
        keep, drop = min(chain_a, chain_b), max(chain_a, chain_b)
        for mention_id in self.members[drop]:
            self.chain[mention_id] = keep
        self.members[keep].extend(self.members.pop(drop))
        return True

    def result(self, position: dict) -> tuple:
        chains = [Chain(ids) for ids in self.members.values() if len(ids) > 1]
        return tuple(sorted(chains, key=lambda c: min(position[i] for i in c)))


def candidate_links(ordered: Sequence[Mention], is_pronoun: Callable) -> list:
    """``(m1, m2)`` id pairs with ``m1`` before ``m2``, grouped by ``m2`` in order."""
    links = []
    for j, m2 in enumerate(ordered):
        for m1 in ordered[:j]:
            if is_pronoun(m1) and not is_pronoun(m2):
                continue
            links.append((m1.id, m2.id))
    return links


def merge_links(ordered: Sequence[Mention], coreferent: set) -> tuple:
    """Merge the chains of every coreferent link, scanning second mentions in document order
    and first mentions from the start; merges that would join overlapping mentions are
    skipped.

    :param ordered: The mentions in document order.
    :param coreferent: Predicted coreferent ``(m1, m2)`` id pairs.
    """
    position = {m.id: i for i, m in enumerate(ordered)}
    chains = _Chains(ordered)
    for j, m2 in enumerate(ordered):
        for m1 in ordered[:j]:
            if (m1.id, m2.id) in coreferent:
                chains.merge(m1.id, m2.id)
    return chains.result(position)


def best_links(ordered: Sequence[Mention], scores: dict, threshold: float) -> tuple:
    """Join every mention to the chain of its best scored predecessor if that score is
    above ``threshold`` and the chain gets no overlapping mentions.

    Ties go to the closest predecessor.

    :param ordered: The mentions in document order.
    :param scores: Scores of the candidate ``(m1, m2)`` id pairs.
    :param threshold: Least score, exclusive, for a merge.
    """
    position = {m.id: i for i, m in enumerate(ordered)}
    chains = _Chains(ordered)
    for j, m2 in enumerate(ordered):
        best = None
        for m1 in ordered[:j]:
            value = scores.get((m1.id, m2.id))
            if value is not None and (best is None or value >= best[0]):
                best = (value, m1.id)
        if best is not None and best[0] > threshold:
            chains.merge(best[1], m2.id)
    return chains.result(position)


def _ordered(mentions, doc: Document) -> list:
    return sorted(mentions, key=lambda m: (doc.order_key(m), m.id))


def _pronoun_test(typer: MentionTyper) -> Callable:
    return lambda m: typer.classify(m) == MentionType.PRONOUN


def build_chains_merge(mentions, model: LinearModel, doc: Document, typer: MentionTyper) -> tuple:
    """Chains from a classification model: every link predicted coreferent is merged."""
    ordered = _ordered(mentions, doc)
    by_id = {m.id: m for m in ordered}
    coreferent = {
        (a, b)
        for a, b in candidate_links(ordered, _pronoun_test(typer))
        if model.is_coreferent(extract_features(by_id[a], by_id[b], doc, typer))
    }
    return merge_links(ordered, coreferent)


def build_chains_best_link(
    mentions, model: LinearModel, doc: Document, typer: MentionTyper, threshold: float
) -> tuple:
    """Chains from a regression model with the best link strategy."""
    ordered = _ordered(mentions, doc)
    by_id = {m.id: m for m in ordered}
    scores = {
        (a, b): model.score(extract_features(by_id[a], by_id[b], doc, typer))
        for a, b in candidate_links(ordered, _pronoun_test(typer))
    }
    return best_links(ordered, scores, threshold)
