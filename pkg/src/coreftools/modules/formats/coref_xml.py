"""Reader and writer for the coreference XML format.

Mentions address tokens by sentence number and word indices; the element text is only
for readability and is ignored when parsing::

    <coreference document="d1">
      <mentions>
        <mention id="0" sentenceNo="00016112313.1" fromWordIX="1" toWordIX="1">Ali</mention>
        <mention id="1" sentenceNo="00016112313.2" fromWordIX="1" toWordIX="1">O</mention>
      </mentions>
      <chains>
        <chain>
          <mentionRef id="0"/>
          <mentionRef id="1"/>
        </chain>
      </chains>
    </coreference>
"""

from typing import NamedTuple, Optional

from lxml import etree
from modules.errors import ParseError
from modules.formats.document_xml import int_attribute, parse_xml_root, to_bytes
from modules.model import Chain, Document, Mention, canonicalize, order_key_for


class CorefXmlFile(NamedTuple):
    """A parsed coreference file; ``texts`` maps mention ids to their informational text."""

    doc_id: str
    mentions: tuple
    chains: tuple
    texts: Optional[dict] = None


def parse_coref_xml(data: bytes) -> CorefXmlFile:
    """Parse a coreference XML file.

    A missing or empty ``<chains>`` section gives zero chains; the mentions can then be
    used as given mentions.

    :param data: The raw UTF-8 file content.
    :returns: The declared mentions and chains.
    :raise ParseError: On malformed XML, invalid or duplicate mentions, or chains
        referencing undeclared mention ids.
    """
    root = parse_xml_root(data, "coreference")
    doc_id = root.get("document", "")
    mentions = []
    texts = {}
    declared = set()
    for mentions_el in root.iterchildren("mentions"):
        for m_el in mentions_el.iterchildren("mention"):
            mention_id = int_attribute(m_el, "id")
            sentence_no = m_el.get("sentenceNo")
            if sentence_no is None:
                raise ParseError("<mention> lacks attribute 'sentenceNo'", m_el.sourceline)
            from_ix = int_attribute(m_el, "fromWordIX")
            to_ix = int_attribute(m_el, "toWordIX")
            if mention_id < 0:
                raise ParseError(f"negative mention id {mention_id}", m_el.sourceline)
            if mention_id in declared:
                raise ParseError(f"duplicate mention id {mention_id}", m_el.sourceline)
            if not 1 <= from_ix <= to_ix:
                raise ParseError(
                    f"mention {mention_id} has invalid span {from_ix}..{to_ix}", m_el.sourceline
                )
            declared.add(mention_id)
            mentions.append(Mention(mention_id, sentence_no, from_ix, to_ix))
            texts[mention_id] = (m_el.text or "").strip()
    chains = []
    for chains_el in root.iterchildren("chains"):
        for c_el in chains_el.iterchildren("chain"):
            members = []
            for ref_el in c_el.iterchildren("mentionRef"):
                mention_id = int_attribute(ref_el, "id")
                if mention_id not in declared:
                    raise ParseError(
                        f"chain references undeclared mention {mention_id}", ref_el.sourceline
                    )
                if mention_id in members:
                    raise ParseError(
                        f"mention {mention_id} is listed twice in one chain", ref_el.sourceline
                    )
                members.append(mention_id)
            if not members:
                raise ParseError("empty chain", c_el.sourceline)
            chains.append(Chain(members))
    return CorefXmlFile(doc_id, tuple(mentions), tuple(chains), texts)


def write_coref_xml(
    mentions,
    chains,
    doc: Optional[Document] = None,
    doc_id: Optional[str] = None,
    texts: Optional[dict] = None,
) -> bytes:
    """Serialize mentions and chains in canonical form.

    Mention ids are renumbered in document order and chains are sorted by their smallest
    member. With a document, mention text is regenerated from its tokens; without one,
    mentions are ordered by span and their text is taken from ``texts``.

    :param mentions: The mentions to write.
    :param chains: Chains over the ids of ``mentions``.
    :param doc: The document the mentions address.
    :param doc_id: Overrides the document id written to the root element.
    :param texts: Mention texts by original mention id, used without ``doc``.
    :raise AddressingError: If a mention lies outside ``doc``.
    """
    mentions = tuple(mentions)
    if doc is not None:
        for mention in mentions:
            doc.check_mention(mention)
        text_of = doc.span_text
    else:
        by_span = {m.span: (texts or {}).get(m.id, "") for m in mentions}
        text_of = lambda mention: by_span[mention.span]  # noqa: E731
    mentions, chains = canonicalize(mentions, chains, order_key_for(doc))

    root = etree.Element("coreference")
    if doc_id is None:
        doc_id = doc.doc_id if doc is not None else ""
    root.set("document", doc_id)
    mentions_el = etree.SubElement(root, "mentions")
    for mention in mentions:
        m_el = etree.SubElement(mentions_el, "mention")
        m_el.set("id", str(mention.id))
        m_el.set("sentenceNo", mention.sentence_no)
        m_el.set("fromWordIX", str(mention.from_ix))
        m_el.set("toWordIX", str(mention.to_ix))
        m_el.text = text_of(mention)
    chains_el = etree.SubElement(root, "chains")
    for chain in chains:
        c_el = etree.SubElement(chains_el, "chain")
        for mention_id in sorted(chain):
            etree.SubElement(c_el, "mentionRef").set("id", str(mention_id))
    return to_bytes(root)
