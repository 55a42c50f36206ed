"""Input and output helpers shared by the subcommands."""

import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from modules.errors import InvalidAnnotationError, UsageError
from modules.formats.conll import parse_conll, read_conll_chains
from modules.formats.converter import Format
from modules.formats.coref_xml import CorefXmlFile, parse_coref_xml
from modules.formats.document_xml import parse_document_xml
from modules.model import (
    AnnotationSet,
    Document,
    Mention,
    Severity,
    chains_as_spans,
    validate_partition,
)
from utils.logger import log_warning
from utils.path import mkdir


def read_bytes(path: str) -> bytes:
    """Read an input file.

    :raise UsageError: If the file does not exist.
    """
    if not os.path.isfile(path):
        raise UsageError(f"input file '{path}' does not exist")
    with open(path, "rb") as f:
        return f.read()


def read_text(path: str) -> str:
    return read_bytes(path).decode("utf-8")


def load_document(path: str) -> Document:
    return parse_document_xml(read_bytes(path))


def load_documents(paths: Optional[Sequence[str]]) -> list:
    return [load_document(p) for p in paths or ()]


def load_coref(path: str) -> CorefXmlFile:
    return parse_coref_xml(read_bytes(path))


def annotator_name(path: str) -> str:
    return Path(path).stem


def detect_format(path: str, explicit: Optional[str] = None) -> Format:
    if explicit:
        return Format(explicit)
    return Format.CONLL if Path(path).suffix.lower() in (".conll", ".txt") else Format.XML


def align_annotation(
    given: Sequence[Mention], coref: CorefXmlFile, annotator_id: str, gold: bool = False
):
    """Express an annotation file's chains over the ids of the given mentions.

    Mentions are matched by span. Chain members whose span is not a given mention are
    left out with a warning.

    :raise InvalidAnnotationError: If the aligned chains are no partition.
    """
    by_span = {m.span: m.id for m in given}
    by_id = {m.id: m for m in coref.mentions}
    chains = []
    skipped = 0
    for chain in coref.chains:
        ids = set()
        for mention_id in chain:
            span = by_id[mention_id].span
            if span in by_span:
                ids.add(by_span[span])
            else:
                skipped += 1
        if ids:
            chains.append(ids)
    if skipped:
        log_warning(f"annotation '{annotator_id}': {skipped} chain members are no given mention")
    annotation = AnnotationSet.from_chains(annotator_id, chains)
    check_annotation(annotation, given, gold)
    return annotation


def check_annotation(annotation: AnnotationSet, given: Sequence[Mention], gold: bool = False):
    """Log the warnings of ``validate_partition`` and fail on its errors.

    :raise InvalidAnnotationError: If the chains are no partition of the given mentions.
    """
    errors = []
    for violation in validate_partition(annotation, given, gold):
        if violation.severity == Severity.ERROR:
            errors.append(violation.message)
        else:
            log_warning(f"annotation '{annotation.annotator_id}': {violation.message}")
    if errors:
        message = "; ".join(errors)
        raise InvalidAnnotationError(f"annotation '{annotation.annotator_id}': {message}")


def load_annotations(given: Sequence[Mention], paths: Sequence[str]) -> list:
    return [align_annotation(given, load_coref(p), annotator_name(p)) for p in paths]


def load_scoring_chains(path: str, fmt: Format, documents: Sequence[Document]) -> dict:
    """Chains over spans per document id, from a CoNLL or coreference XML file."""
    data = read_bytes(path)
    if fmt == Format.XML:
        coref = parse_coref_xml(data)
        return {coref.doc_id: chains_as_spans(coref.mentions, coref.chains)}
    by_id = {doc.doc_id: doc for doc in documents}
    result = {}
    for conll_doc in parse_conll(data).documents:
        mentions, chains = read_conll_chains(conll_doc, by_id.get(conll_doc.doc_id))
        result[conll_doc.doc_id] = chains_as_spans(mentions, chains)
    return result


def emit(data, out: Optional[str] = None):
    """Write ``str`` or ``bytes`` to ``out`` or to standard output."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out:
        parent = os.path.dirname(out)
        if parent:
            mkdir(parent)
        with open(out, "wb") as f:
            f.write(data)
    else:
        sys.stdout.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def emit_json(obj, out: Optional[str] = None):
    emit(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", out)
