"""Reader and writer for the CoNLL coreference format.

Each document is delimited by ``#begin document (<id>); part 000`` and ``#end document``.
Token rows carry the document id, the 0-based token index within the sentence, the surface
and, in the last column, the coreference field. Sentences end with a blank line.

The coreference field is ``-`` or a ``|``-separated list of ``(n`` (a mention of chain
``n`` starts here), ``n)`` (it ends here) and ``(n)`` (single-token mention).
"""

import re
from typing import NamedTuple, Optional

from modules.errors import InvalidAnnotationError, InvalidDocumentError, ParseError
from modules.model import Chain, Document, Mention, Sentence, Token, canonicalize
from utils.list_helper import pairs
from utils.logger import log_warning

BEGIN_PATTERN = re.compile(r"^#begin document \((.*)\)(?:; part (\d+))?\s*$")
END_PATTERN = re.compile(r"^#end document\s*$")
ENTRY_PATTERN = re.compile(r"^(\()?(\d+)(\))?$")

EMPTY_FIELD = "-"


class ConllRow(NamedTuple):
    doc_id: str
    index: int
    surface: str
    coref: str


class ConllSpan(NamedTuple):
    """A mention read from a CoNLL file, addressed by 0-based sentence position."""

    chain: int
    sentence: int
    from_ix: int
    to_ix: int


class ConllDocument(NamedTuple):
    doc_id: str
    part: str
    sentences: tuple
    spans: tuple


class ConllFile(NamedTuple):
    documents: tuple


def parse_coref_field(field: str, line: int):
    """Split a coreference field into opened, single and closed chain numbers.

    :raise ParseError: If an entry is not ``(n``, ``n)`` or ``(n)``.
    """
    opens, singles, closes = [], [], []
    if field == EMPTY_FIELD:
        return opens, singles, closes
    for entry in field.split("|"):
        match = ENTRY_PATTERN.match(entry)
        if match is None or not (match.group(1) or match.group(3)):
            raise ParseError(f"invalid coreference entry '{entry}'", line)
        chain = int(match.group(2))
        if match.group(1) and match.group(3):
            singles.append(chain)
        elif match.group(1):
            opens.append(chain)
        else:
            closes.append(chain)
    return opens, singles, closes


class _DocumentBuilder:
    """Collects the rows of one document and pairs mention brackets per chain."""

    def __init__(self, doc_id: str, part: str, line: int):
        self.doc_id = doc_id
        self.part = part
        self.line = line
        self.sentences = []
        self.current = []
        self.spans = []
        self.stacks = {}

    def add_row(self, columns, line: int):
        if len(columns) < 4:
            raise ParseError(f"expected at least 4 columns, got {len(columns)}", line)
        try:
            index = int(columns[1])
        except ValueError:
            raise ParseError(f"token index '{columns[1]}' is not an integer", line)
        if index != len(self.current):
            raise ParseError(f"expected token index {len(self.current)}, got {index}", line)
        row = ConllRow(columns[0], index, columns[2], columns[-1])
        sentence = len(self.sentences)
        word_ix = index + 1
        opens, singles, closes = parse_coref_field(row.coref, line)
        for chain in closes:
            stack = self.stacks.get(chain)
            if not stack:
                raise ParseError(f"chain {chain} closed without being opened", line)
            self.spans.append(ConllSpan(chain, sentence, stack.pop(), word_ix))
        for chain in singles:
            self.spans.append(ConllSpan(chain, sentence, word_ix, word_ix))
        for chain in opens:
            self.stacks.setdefault(chain, []).append(word_ix)
        self.current.append(row)

    def end_sentence(self, line: int):
        if not self.current:
            return
        self._check_balanced(line, "sentence")
        self.sentences.append(tuple(self.current))
        self.current = []

    def finish(self, line: int) -> ConllDocument:
        self.end_sentence(line)
        self._check_balanced(line, "document")
        return ConllDocument(self.doc_id, self.part, tuple(self.sentences), tuple(self.spans))

    def _check_balanced(self, line: int, unit: str):
        open_chains = sorted(chain for chain, stack in self.stacks.items() if stack)
        if open_chains:
            raise ParseError(
                f"unbalanced parentheses: chains {open_chains} still open at end of {unit}", line
            )


def parse_conll(data: bytes) -> ConllFile:
    """Parse a CoNLL file holding one or more documents.

    :param data: The raw UTF-8 file content.
    :returns: The documents with their rows and bracket-paired mention spans.
    :raise ParseError: On unbalanced parentheses, rows outside a document, malformed
        rows or coreference fields.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as ex:
        raise ParseError(f"input is not UTF-8: {ex}")
    documents = []
    builder = None
    line_no = 0
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        begin = BEGIN_PATTERN.match(line)
        if begin:
            if builder is not None:
                raise ParseError("document begins before the previous one ended", line_no)
            builder = _DocumentBuilder(begin.group(1), begin.group(2) or "000", line_no)
        elif END_PATTERN.match(line):
            if builder is None:
                raise ParseError("#end document without #begin document", line_no)
            documents.append(builder.finish(line_no))
            builder = None
        elif line.startswith("#"):
            continue
        elif not line.strip():
            if builder is not None:
                builder.end_sentence(line_no)
        else:
            if builder is None:
                raise ParseError("token row outside of a document", line_no)
            builder.add_row(line.split(), line_no)
    if builder is not None:
        raise ParseError(f"document '{builder.doc_id}' is not ended", line_no)
    return ConllFile(tuple(documents))


def conll_to_document(conll_doc: ConllDocument) -> Document:
    """Build a plain ``Document`` from CoNLL surfaces; sentences are numbered from 1."""
    sentences = []
    for position, rows in enumerate(conll_doc.sentences, start=1):
        tokens = tuple(Token(r.surface, r.surface, "", 0, "", r.index + 1) for r in rows)
        sentences.append(Sentence(str(position), tokens))
    return Document(conll_doc.doc_id, tuple(sentences))


def read_conll_chains(conll_doc: ConllDocument, doc: Optional[Document] = None):
    """Turn the spans of a CoNLL document into mentions and chains.

    :param conll_doc: The parsed CoNLL document.
    :param doc: If given, sentence numbers are taken from it and token counts must match;
        otherwise sentences are numbered ``"1"``, ``"2"``, ...
    :returns: ``(mentions, chains)`` in canonical form.
    :raise ParseError: If the token counts do not match ``doc``.
    """
    if doc is not None:
        if len(doc.sentences) != len(conll_doc.sentences):
            raise ParseError(
                f"document '{conll_doc.doc_id}' has {len(conll_doc.sentences)} sentences in "
                f"CoNLL but {len(doc.sentences)} in the document"
            )
        for position, (rows, sentence) in enumerate(zip(conll_doc.sentences, doc.sentences)):
            if len(rows) != len(sentence.tokens):
                raise ParseError(
                    f"sentence {position + 1} of document '{conll_doc.doc_id}' has "
                    f"{len(rows)} tokens in CoNLL but {len(sentence.tokens)} in the document"
                )
        numbers = [s.sentence_no for s in doc.sentences]
    else:
        numbers = [str(position + 1) for position in range(len(conll_doc.sentences))]

    mentions = []
    members = {}
    for span in conll_doc.spans:
        mention = Mention(len(mentions), numbers[span.sentence], span.from_ix, span.to_ix)
        mentions.append(mention)
        members.setdefault(span.chain, []).append(mention.id)
    chains = [Chain(ids) for _, ids in sorted(members.items())]
    order_key = doc.order_key if doc is not None else _position_key(numbers)
    return canonicalize(mentions, chains, order_key)


def _crossing(a: Mention, b: Mention) -> bool:
    first, second = sorted((a, b), key=lambda m: (m.from_ix, -m.to_ix))
    return (
        first.sentence_no == second.sentence_no
        and first.from_ix < second.from_ix < first.to_ix < second.to_ix
    )


def _check_brackets(chains, by_id: dict):
    """Crossing mentions of one chain read back as other spans.

    :raise InvalidAnnotationError: If two mentions of one chain cross.
    """
    for number, chain in enumerate(chains):
        for a, b in pairs(sorted(chain)):
            if _crossing(by_id[a], by_id[b]):
                raise InvalidAnnotationError(
                    f"mentions {by_id[a].span} and {by_id[b].span} of chain {number} cross "
                    "and cannot be written to CoNLL"
                )


def _position_key(numbers):
    positions = {number: i for i, number in enumerate(numbers)}
    return lambda m: (positions[m.sentence_no], m.from_ix, m.to_ix)


def write_conll(doc: Document, mentions, chains, doc_id: Optional[str] = None) -> bytes:
    """Serialize a document with its chains as CoNLL.

    Chains are numbered ``0..n-1`` in canonical order. Mentions in no chain cannot be
    represented and are dropped with a warning.

    :param doc: The document providing the token rows.
    :param mentions: The mentions chains refer to.
    :param chains: The chains over mention ids.
    :param doc_id: Overrides the document id.
    :raise AddressingError: If a mention lies outside ``doc``.
    :raise InvalidAnnotationError: If two mentions of one chain cross.
    :raise InvalidDocumentError: If a surface contains whitespace.
    """
    mentions = tuple(mentions)
    for mention in mentions:
        doc.check_mention(mention)
    mentions, chains = canonicalize(mentions, chains, doc.order_key)
    by_id = {m.id: m for m in mentions}
    doc_id = doc.doc_id if doc_id is None else doc_id
    _check_brackets(chains, by_id)

    chained = {i for chain in chains for i in chain}
    dropped = [m.id for m in mentions if m.id not in chained]
    if dropped:
        log_warning(f"{len(dropped)} mentions without a chain are not written to CoNLL")

    opens, singles, closes = {}, {}, {}
    for number, chain in enumerate(chains):
        for mention in (by_id[i] for i in sorted(chain)):
            start = (mention.sentence_no, mention.from_ix)
            end = (mention.sentence_no, mention.to_ix)
            if mention.from_ix == mention.to_ix:
                singles.setdefault(start, []).append((number, 0))
            else:
                opens.setdefault(start, []).append((number, -mention.to_ix))
                closes.setdefault(end, []).append((number, -mention.from_ix))

    lines = [f"#begin document ({doc_id}); part 000"]
    for sentence in doc.sentences:
        for token in sentence.tokens:
            if any(ch.isspace() for ch in token.surface):
                raise InvalidDocumentError(
                    f"surface '{token.surface}' in sentence '{sentence.sentence_no}' "
                    "contains whitespace"
                )
            position = (sentence.sentence_no, token.word_ix)
            entries = [f"({n}" for n, _ in sorted(opens.get(position, []))]
            entries += [f"({n})" for n, _ in sorted(singles.get(position, []))]
            entries += [f"{n})" for n, _ in sorted(closes.get(position, []))]
            field = "|".join(entries) if entries else EMPTY_FIELD
            lines.append(f"{doc_id}\t{token.word_ix - 1}\t{token.surface}\t{field}")
        lines.append("")
    lines.append("#end document")
    return ("\n".join(lines) + "\n").encode("utf-8")
