"""Rule based mention detection and mention typing.

Detected mentions are the union of

- noun phrases: a noun and the contiguous tokens before it that belong to its dependency
  subtree, keeping only maximal spans,
- pronouns: single tokens whose lemma is in the pronoun list,
- named entities: nouns with a capitalized lemma,
- repeated capitalized nouns: nouns whose capitalized surface, without the case suffix
  after an apostrophe, occurs at least twice in the document.
"""

from enum import Enum
from typing import Optional

from modules.errors import ConfigurationError
from modules.model import Document, Mention, Token
from utils.env import PRONOUNS, get_env
from utils.path import default_pronouns_file

NOUN_TAGS = ("noun", "prop", "propn")
"""
Lower case POS tag prefixes treated as nouns.
"""

APOSTROPHES = ("'", "’")


class MentionType(Enum):
    PRONOUN = "pronoun"
    PROPER_NOUN = "properNoun"
    NOUN_PHRASE = "nounPhrase"


def load_pronouns(path: Optional[str] = None) -> frozenset:
    """Read a pronoun lemma list, one lemma per line, ``#`` starting a comment.

    :param path: The list to read; defaults to ``COREFTOOLS_PRONOUNS`` or the shipped
        Turkish list.
    :raise ConfigurationError: If the file cannot be read or holds no lemma.
    """
    path = path or get_env(PRONOUNS) or default_pronouns_file
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as ex:
        raise ConfigurationError(f"cannot read pronoun list '{path}': {ex}")
    lemmas = frozenset(
        line.split("#", 1)[0].strip().casefold()
        for line in lines
        if line.split("#", 1)[0].strip()
    )
    if not lemmas:
        raise ConfigurationError(f"pronoun list '{path}' is empty")
    return lemmas


def is_noun(token: Token) -> bool:
    return token.pos.casefold().startswith(NOUN_TAGS)


def is_capitalized(text: str) -> bool:
    return bool(text) and text[0].isupper()


def strip_apostrophe(surface: str) -> str:
    for apostrophe in APOSTROPHES:
        surface = surface.split(apostrophe, 1)[0]
    return surface


def has_apostrophe(surface: str) -> bool:
    return any(a in surface for a in APOSTROPHES)


def strip_case(token: Token) -> str:
    """The token without case markers: the text before an apostrophe, else the lemma."""
    if has_apostrophe(token.surface):
        return strip_apostrophe(token.surface)
    return token.lemma


def check_annotations(doc: Document):
    """Make sure every token has the lemma, POS and dependency relation rules rely on.

    :raise ConfigurationError: On the first token lacking one of them.
    """
    for sentence in doc.sentences:
        for token in sentence.tokens:
            fields = (("lemma", token.lemma), ("POS", token.pos), ("REL", token.dep_rel))
            missing = [name for name, value in fields if not value]
            if missing:
                raise ConfigurationError(
                    f"word {token.word_ix} of sentence '{sentence.sentence_no}' lacks "
                    f"{', '.join(missing)}; mention detection needs dependency annotations"
                )


def _in_subtree(tokens: tuple, word_ix: int, head_ix: int) -> bool:
    current = word_ix
    for _ in range(len(tokens)):
        if current == head_ix:
            return True
        if current == 0:
            return False
        current = tokens[current - 1].dep_head
    return False


def noun_phrase_spans(tokens: tuple) -> list:
    """Maximal ``(from_ix, to_ix)`` spans of nouns with their preceding dependents."""
    spans = []
    for token in tokens:
        if not is_noun(token):
            continue
        start = token.word_ix
        while start > 1 and _in_subtree(tokens, start - 1, token.word_ix):
            start -= 1
        spans.append((start, token.word_ix))
    return [
        span
        for span in spans
        if not any(o != span and o[0] <= span[0] and span[1] <= o[1] for o in spans)
    ]


def detect_mentions(doc: Document, pronouns: frozenset) -> tuple:
    """Mark mention candidates with the detection rules.

    :param doc: A document with lemma, POS and dependency annotations.
    :param pronouns: Case folded pronoun lemmas.
    :returns: The mentions in document order with ids ``0..n-1``.
    :raise ConfigurationError: If annotations are missing.
    """
    check_annotations(doc)
    surface_counts = {}
    for sentence in doc.sentences:
        for token in sentence.tokens:
            if is_noun(token) and is_capitalized(token.surface):
                key = strip_apostrophe(token.surface)
                surface_counts[key] = surface_counts.get(key, 0) + 1

    spans = set()
    for sentence in doc.sentences:
        for start, end in noun_phrase_spans(sentence.tokens):
            spans.add((sentence.sentence_no, start, end))
        for token in sentence.tokens:
            single = (sentence.sentence_no, token.word_ix, token.word_ix)
            if token.lemma.casefold() in pronouns:
                spans.add(single)
            elif is_noun(token) and is_capitalized(token.lemma):
                spans.add(single)
            elif is_noun(token) and surface_counts.get(strip_apostrophe(token.surface), 0) >= 2:
                spans.add(single)

    ordered = sorted(spans, key=lambda s: (doc.sentence_positions[s[0]], s[1], s[2]))
    return tuple(Mention(i, *span) for i, span in enumerate(ordered))


def mention_head(mention: Mention, doc: Document) -> Token:
    """Start at the mention's last token and follow dependency heads while they stay
    inside the mention."""
    tokens = doc.sentence(mention.sentence_no).tokens
    doc.check_mention(mention)
    current = mention.to_ix
    for _ in range(mention.length):
        head = tokens[current - 1].dep_head
        if not mention.from_ix <= head <= mention.to_ix or head == current:
            break
        current = head
    return tokens[current - 1]


class MentionTyper:
    """Assigns mention types within one document.

    Proper noun strings are the case stripped forms of all capitalized tokens that are
    not sentence initial; a head with such a form is a proper noun anywhere, including
    at the start of a sentence.
    """

    def __init__(self, doc: Document, pronouns: frozenset):
        self.doc = doc
        self.pronouns = pronouns
        self.proper_nouns = frozenset(
            strip_case(token)
            for sentence in doc.sentences
            for token in sentence.tokens
            if token.word_ix > 1 and is_capitalized(token.surface)
        )
        self._types = {}

    def classify(self, mention: Mention) -> MentionType:
        if mention.span not in self._types:
            self._types[mention.span] = self._classify(mention)
        return self._types[mention.span]

    def _classify(self, mention: Mention) -> MentionType:
        head = mention_head(mention, self.doc)
        if head.lemma.casefold() in self.pronouns:
            return MentionType.PRONOUN
        if strip_case(head) in self.proper_nouns:
            return MentionType.PROPER_NOUN
        return MentionType.NOUN_PHRASE


def classify_mention_type(mention: Mention, doc: Document, pronouns: frozenset) -> MentionType:
    return MentionTyper(doc, pronouns).classify(mention)
