"""Reader and writer for the document XML format.

A document looks like this::

    <document id="d1" genre="news">
      <S No="00016112313.1">
        <W IX="1" LEM="ankara" POS="Noun" REL="SUBJECT" HEAD="2">Ankara'dan</W>
        <W IX="2" LEM="gel" POS="Verb" REL="SENTENCE" HEAD="0">geldi</W>
      </S>
    </document>
"""

from lxml import etree
from modules.errors import InvalidDocumentError, ParseError
from modules.model import Document, Sentence, Token

PARSER_OPTIONS = {"remove_blank_text": True, "resolve_entities": False, "no_network": True}
"""
Options of the lxml parser used for every XML input. Entities are never resolved.
"""


def make_parser():
    return etree.XMLParser(**PARSER_OPTIONS)


def parse_xml_root(data: bytes, expected_tag: str):
    """Parse XML bytes and check the root element.

    :raise ParseError: On malformed XML or an unexpected root element.
    """
    try:
        root = etree.fromstring(data, make_parser())
    except etree.XMLSyntaxError as ex:
        raise ParseError(ex.msg, ex.lineno)
    if root.tag != expected_tag:
        raise ParseError(
            f"expected root element <{expected_tag}>, got <{root.tag}>", root.sourceline
        )
    return root


def required_attribute(element, name: str) -> str:
    value = element.get(name)
    if value is None:
        raise ParseError(f"<{element.tag}> lacks attribute '{name}'", element.sourceline)
    return value


def int_attribute(element, name: str, default=None) -> int:
    value = element.get(name)
    if value is None:
        if default is not None:
            return default
        raise ParseError(f"<{element.tag}> lacks attribute '{name}'", element.sourceline)
    try:
        return int(value)
    except ValueError:
        raise ParseError(
            f"attribute '{name}' of <{element.tag}> is not an integer: '{value}'",
            element.sourceline,
        )


def parse_document_xml(data: bytes) -> Document:
    """Parse a document XML file.

    :param data: The raw UTF-8 file content.
    :returns: The ``Document`` with sentence order preserved.
    :raise ParseError: On malformed XML, a duplicate sentence number or word indices
        that are not ``1..n`` in order.
    """
    root = parse_xml_root(data, "document")
    doc_id = required_attribute(root, "id")
    sentences = []
    seen = set()
    for s_el in root.iterchildren("S"):
        sentence_no = required_attribute(s_el, "No")
        if sentence_no in seen:
            raise ParseError(f"duplicate sentence number '{sentence_no}'", s_el.sourceline)
        seen.add(sentence_no)
        w_elements = list(s_el.iterchildren("W"))
        tokens = []
        for position, w_el in enumerate(w_elements, start=1):
            word_ix = int_attribute(w_el, "IX")
            if word_ix != position:
                raise ParseError(
                    f"sentence '{sentence_no}': expected word index {position}, got {word_ix}",
                    w_el.sourceline,
                )
            head = int_attribute(w_el, "HEAD", default=0)
            if not 0 <= head <= len(w_elements):
                raise ParseError(
                    f"sentence '{sentence_no}': head {head} is outside the sentence",
                    w_el.sourceline,
                )
            surface = (w_el.text or "").strip()
            if not surface:
                raise ParseError(f"sentence '{sentence_no}': empty word", w_el.sourceline)
            tokens.append(
                Token(
                    surface=surface,
                    lemma=w_el.get("LEM", ""),
                    pos=w_el.get("POS", ""),
                    dep_head=head,
                    dep_rel=w_el.get("REL", ""),
                    word_ix=word_ix,
                )
            )
        sentences.append(Sentence(sentence_no, tuple(tokens)))
    try:
        return Document(doc_id, tuple(sentences), root.get("genre"))
    except InvalidDocumentError as ex:
        raise ParseError(str(ex), root.sourceline)


def write_document_xml(doc: Document) -> bytes:
    """Serialize a document in canonical form (attributes in fixed order, two-space indent)."""
    root = etree.Element("document")
    root.set("id", doc.doc_id)
    if doc.genre is not None:
        root.set("genre", doc.genre)
    for sentence in doc.sentences:
        s_el = etree.SubElement(root, "S")
        s_el.set("No", sentence.sentence_no)
        for token in sentence.tokens:
            w_el = etree.SubElement(s_el, "W")
            w_el.set("IX", str(token.word_ix))
            w_el.set("LEM", token.lemma)
            w_el.set("POS", token.pos)
            w_el.set("REL", token.dep_rel)
            w_el.set("HEAD", str(token.dep_head))
            w_el.text = token.surface
    return to_bytes(root)


def to_bytes(root) -> bytes:
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8")
