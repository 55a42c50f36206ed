"""Conversion between the coreference XML and CoNLL formats."""

from enum import Enum
from typing import Iterable, Optional

from modules.errors import ParseError
from modules.formats.conll import conll_to_document, parse_conll, read_conll_chains, write_conll
from modules.formats.coref_xml import parse_coref_xml, write_coref_xml
from modules.model import Document


class Format(Enum):
    CONLL = "conll"
    XML = "xml"


def _match_document(doc_id: str, documents: dict, single: bool) -> Optional[Document]:
    if doc_id in documents:
        return documents[doc_id]
    if single and len(documents) == 1:
        return next(iter(documents.values()))
    return None


def convert(
    source: Format, target: Format, data: bytes, documents: Iterable[Document] = ()
) -> dict:
    """Convert a coreference file between formats.

    XML to CoNLL needs the document, which provides the token rows. CoNLL to XML uses a
    matching document when one is given (by id, or the only one for a single-document
    file) and otherwise derives sentences from the CoNLL surfaces.

    :param source: The format of ``data``.
    :param target: The format to produce.
    :param data: The raw input file.
    :param documents: Documents the input refers to.
    :returns: A ``dict`` of document id to the converted file content, in input order.
    :raise ParseError: If the input cannot be parsed or no document matches an XML input.
    """
    documents = {doc.doc_id: doc for doc in documents}
    if source == target:
        raise ValueError(f"source and target format are both '{source.value}'")

    if source == Format.XML:
        coref = parse_coref_xml(data)
        doc = _match_document(coref.doc_id, documents, single=True)
        if doc is None:
            raise ParseError(f"no document given for coreference file '{coref.doc_id}'")
        doc_id = coref.doc_id or doc.doc_id
        return {doc_id: write_conll(doc, coref.mentions, coref.chains, doc_id)}

    results = {}
    conll = parse_conll(data)
    for conll_doc in conll.documents:
        if conll_doc.doc_id in results:
            raise ParseError(f"document '{conll_doc.doc_id}' occurs twice")
        doc = _match_document(conll_doc.doc_id, documents, single=len(conll.documents) == 1)
        mentions, chains = read_conll_chains(conll_doc, doc)
        if doc is None:
            doc = conll_to_document(conll_doc)
        results[conll_doc.doc_id] = write_coref_xml(mentions, chains, doc, conll_doc.doc_id)
    return results
