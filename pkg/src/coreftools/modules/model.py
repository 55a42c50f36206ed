"""Domain types shared by every coreftools module: documents, mentions, chains and
annotation sets, together with document ordering and partition validation.

All types are immutable. A chain is a ``frozenset`` of mention ids; mentions are matched
across files by their span ``(sentence_no, from_ix, to_ix)``, never by id.
"""

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Optional

from modules.errors import AddressingError, InvalidDocumentError

Chain = frozenset
"""
A coreference chain: the ids of its member mentions.
"""


class Token(NamedTuple):
    """One annotated token. ``dep_head`` is a sentence-local word index, 0 for the root."""

    surface: str
    lemma: str
    pos: str
    dep_head: int
    dep_rel: str
    word_ix: int


class Sentence(NamedTuple):
    sentence_no: str
    tokens: tuple


class Mention(NamedTuple):
    """A contiguous, inclusive token span ``from_ix..to_ix`` of one sentence."""

    id: int
    sentence_no: str
    from_ix: int
    to_ix: int

    @property
    def span(self):
        return (self.sentence_no, self.from_ix, self.to_ix)

    @property
    def length(self):
        return self.to_ix - self.from_ix + 1


@dataclass(frozen=True)
class Document:
    """A document made of ordered sentences; sentence order defines document order.

    :raise InvalidDocumentError: If the document is empty, a sentence number repeats,
        word indices are not exactly ``1..n`` or a dependency head points outside
        its sentence.
    """

    doc_id: str
    sentences: tuple
    genre: Optional[str] = None

    def __post_init__(self):
        if not self.sentences:
            raise InvalidDocumentError(f"document '{self.doc_id}' has no sentences")
        seen = set()
        for sentence in self.sentences:
            if sentence.sentence_no in seen:
                raise InvalidDocumentError(f"duplicate sentence number '{sentence.sentence_no}'")
            seen.add(sentence.sentence_no)
            if not sentence.tokens:
                raise InvalidDocumentError(f"sentence '{sentence.sentence_no}' has no tokens")
            length = len(sentence.tokens)
            for position, token in enumerate(sentence.tokens, start=1):
                if token.word_ix != position:
                    raise InvalidDocumentError(
                        f"sentence '{sentence.sentence_no}': expected word index {position}, "
                        f"got {token.word_ix}"
                    )
                if not 0 <= token.dep_head <= length:
                    raise InvalidDocumentError(
                        f"sentence '{sentence.sentence_no}': head {token.dep_head} of word "
                        f"{token.word_ix} is outside the sentence"
                    )
                if not token.surface:
                    raise InvalidDocumentError(
                        f"sentence '{sentence.sentence_no}': word {token.word_ix} is empty"
                    )

    @cached_property
    def sentence_positions(self):
        return {s.sentence_no: i for i, s in enumerate(self.sentences)}

    @cached_property
    def sentence_offsets(self):
        """Global offset of the first token of every sentence, by sentence number."""
        offsets = {}
        total = 0
        for sentence in self.sentences:
            offsets[sentence.sentence_no] = total
            total += len(sentence.tokens)
        return offsets

    @property
    def token_count(self):
        return sum(len(s.tokens) for s in self.sentences)

    def sentence(self, sentence_no: str) -> Sentence:
        """Get a sentence by number.

        :raise AddressingError: If the document has no such sentence.
        """
        position = self.sentence_positions.get(sentence_no)
        if position is None:
            raise AddressingError(f"unknown sentence '{sentence_no}' in document '{self.doc_id}'")
        return self.sentences[position]

    def check_mention(self, mention: Mention):
        """Make sure ``mention`` addresses tokens of this document.

        :raise AddressingError: If the sentence is unknown or the span is out of bounds.
        """
        length = len(self.sentence(mention.sentence_no).tokens)
        if not 1 <= mention.from_ix <= mention.to_ix <= length:
            raise AddressingError(
                f"mention {mention.id} spans {mention.from_ix}..{mention.to_ix} but sentence "
                f"'{mention.sentence_no}' has {length} words"
            )

    def tokens_of(self, mention: Mention) -> tuple:
        self.check_mention(mention)
        return self.sentence(mention.sentence_no).tokens[mention.from_ix - 1 : mention.to_ix]

    def span_text(self, mention: Mention) -> str:
        return " ".join(t.surface for t in self.tokens_of(mention))

    def global_offset(self, mention: Mention) -> int:
        """0-based offset of the mention's first token in the whole document."""
        self.check_mention(mention)
        return self.sentence_offsets[mention.sentence_no] + mention.from_ix - 1

    def order_key(self, mention: Mention):
        self.sentence(mention.sentence_no)
        return (self.sentence_positions[mention.sentence_no], mention.from_ix, mention.to_ix)


@dataclass(frozen=True)
class AnnotationSet:
    """The chains produced by one annotator or system.

    Mentions that appear in no chain are unassigned. Use ``validate_partition`` to check
    that the chains are disjoint.
    """

    annotator_id: str
    chains: tuple

    @classmethod
    def from_chains(cls, annotator_id: str, chains: Iterable[Iterable[int]]):
        """Build an annotation set with chains ordered by their smallest member id."""
        frozen = [Chain(c) for c in chains]
        frozen.sort(key=lambda c: (min(c) if c else -1, sorted(c)))
        return cls(annotator_id, tuple(frozen))

    @cached_property
    def chain_of(self):
        """Map of mention id to the chain containing it (last one wins on duplicates)."""
        return {mention_id: chain for chain in self.chains for mention_id in chain}

    @property
    def mention_ids(self):
        return frozenset(self.chain_of)


class Severity(Enum):
    WARNING = "warning"
    ERROR = "error"


class Violation(NamedTuple):
    severity: Severity
    message: str
    mention_ids: tuple = ()


def document_order_compare(a: Mention, b: Mention, doc: Document) -> int:
    """Compare two mentions in document order.

    The order is lexicographic on (sentence position, ``from_ix``, ``to_ix``).

    :returns: ``-1``, ``0`` or ``1`` if ``a`` is before, at the same span as, or after ``b``.
    :raise AddressingError: If a mention refers to a sentence not in ``doc``.
    """
    key_a = doc.order_key(a)
    key_b = doc.order_key(b)
    return (key_a > key_b) - (key_a < key_b)


def overlaps(a: Mention, b: Mention) -> bool:
    return (
        a.sentence_no == b.sentence_no and a.from_ix <= b.to_ix and b.from_ix <= a.to_ix
    )


_DIGITS = re.compile(r"(\d+)")


def natural_span_key(mention: Mention):
    """Total order on spans when no document is at hand.

    Sentence numbers are compared piecewise, numeric parts as numbers, so that
    ``"s2"`` sorts before ``"s10"``.
    """
    parts = tuple(
        (0, int(part), "") if part.isdigit() else (1, 0, part)
        for part in _DIGITS.split(mention.sentence_no)
        if part
    )
    return (parts, mention.sentence_no, mention.from_ix, mention.to_ix)


def order_key_for(doc: Optional[Document]) -> Callable[[Mention], tuple]:
    return doc.order_key if doc is not None else natural_span_key


def validate_partition(annotation: AnnotationSet, mentions: Iterable[Mention], gold=False):
    """Check that an annotation set is a partition over the declared mentions.

    :param annotation: The annotation to check.
    :param mentions: The declared mentions.
    :param gold: Overlapping coreferent mentions are errors in a gold standard and
        only warnings in raw annotations.
    :returns: A ``list`` of ``Violation``, empty if the annotation is clean.
    """
    declared = {m.id: m for m in mentions}
    violations = []
    owner = {}
    for index, chain in enumerate(annotation.chains):
        if not chain:
            violations.append(Violation(Severity.ERROR, f"chain {index} is empty"))
            continue
        for mention_id in sorted(chain):
            if mention_id in owner:
                violations.append(
                    Violation(
                        Severity.ERROR,
                        f"mention {mention_id} is in chains {owner[mention_id]} and {index}",
                        (mention_id,),
                    )
                )
            else:
                owner[mention_id] = index
            if mention_id not in declared:
                violations.append(
                    Violation(Severity.ERROR, f"unknown mention id {mention_id}", (mention_id,))
                )
        if len(chain) < 2:
            violations.append(
                Violation(Severity.WARNING, f"chain {index} has a single mention", tuple(chain))
            )
        known = sorted(declared[i] for i in chain if i in declared)
        for i, first in enumerate(known):
            for second in known[i + 1 :]:
                if overlaps(first, second):
                    violations.append(
                        Violation(
                            Severity.ERROR if gold else Severity.WARNING,
                            f"overlapping mentions {first.id} and {second.id} in chain {index}",
                            (first.id, second.id),
                        )
                    )
    return violations


def normalize_chains(chains: Iterable) -> list:
    """Drop singleton chains, the normalization applied to keys and responses before scoring."""
    return [Chain(c) for c in chains if len(c) > 1]


def canonicalize(mentions: Iterable[Mention], chains: Iterable, order_key=natural_span_key):
    """Renumber mentions ``0..n-1`` in document order and sort chains by smallest member.

    :param mentions: The mentions; chains refer to their ids.
    :param chains: The chains over mention ids.
    :param order_key: The document order, ``Document.order_key`` if a document is known.
    :returns: ``(mentions, chains)`` as tuples in canonical form.
    """
    ordered = sorted(mentions, key=lambda m: (order_key(m), m.id))
    renumber = {m.id: new_id for new_id, m in enumerate(ordered)}
    new_mentions = tuple(m._replace(id=renumber[m.id]) for m in ordered)
    new_chains = sorted((Chain(renumber[i] for i in c) for c in chains if c), key=min)
    return new_mentions, tuple(new_chains)


def chains_as_spans(mentions: Iterable[Mention], chains: Iterable) -> list:
    """Translate chains over mention ids into chains over spans, the form used for scoring."""
    by_id = {m.id: m for m in mentions}
    return [frozenset(by_id[i].span for i in c) for c in chains]
