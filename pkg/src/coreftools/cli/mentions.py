from cli.common import emit, load_document
from modules.baseline.mentions import detect_mentions, load_pronouns
from modules.formats.coref_xml import write_coref_xml
from utils.logger import log_info


def register(subparsers):
    parser = subparsers.add_parser(
        "detect-mentions",
        help="Detect mention candidates in a document",
        description="Rule based mention detection on the dependency annotation. Writes "
        "coreference XML with the detected mentions and no chains.",
    )
    parser.add_argument("--doc", required=True, help="Document XML")
    parser.add_argument("--pronouns", help="Pronoun lemma list (default: $COREFTOOLS_PRONOUNS)")
    parser.add_argument("--out", help="Coreference XML (default: standard output)")
    parser.set_defaults(handler=run)


def run(args):
    doc = load_document(args.doc)
    mentions = detect_mentions(doc, load_pronouns(args.pronouns))
    log_info(f"detected {len(mentions)} mentions in '{doc.doc_id}'")
    emit(write_coref_xml(mentions, (), doc), args.out)
