from cli.common import emit, load_annotations, load_coref, load_document, read_text
from modules.adjudicator import adjudicate, parse_forced_links, parse_weights
from modules.formats.coref_xml import write_coref_xml
from modules.model import order_key_for
from utils.logger import log_info


def register(subparsers):
    parser = subparsers.add_parser(
        "adjudicate",
        help="Build a gold standard from several annotations",
        description="Find the partition of the given mentions that diverges least from "
        "the annotations, with overlapping or never linked mentions kept apart.",
    )
    parser.add_argument("--mentions", required=True, help="Coreference XML with the mentions")
    parser.add_argument(
        "--annotations", nargs="+", required=True, help="Coreference XML file per annotator"
    )
    parser.add_argument(
        "--weights", default="2,1", help="Omission and commission weight 'omit,commit'"
    )
    parser.add_argument(
        "--force", help="File of 'must <id> <id>' and 'cannot <id> <id>' lines"
    )
    parser.add_argument(
        "--doc", help="Document XML; orders mentions and fills in the mention text"
    )
    parser.add_argument("--out", help="Gold coreference XML (default: standard output)")
    parser.set_defaults(handler=run)


def run(args):
    weights = parse_weights(args.weights)
    given = load_coref(args.mentions)
    annotations = load_annotations(given.mentions, args.annotations)
    forced = parse_forced_links(read_text(args.force)) if args.force else None
    doc = load_document(args.doc) if args.doc else None
    order_key = order_key_for(doc)

    result = adjudicate(given.mentions, annotations, weights, forced, order_key)
    sizes = sorted((r.size for r in result.components if r.size > 1), reverse=True)
    log_info(f"gold standard of {len(result.gold.chains)} chains at cost {result.cost}")
    log_info(f"component sizes: {sizes or 'none above 1'}")

    data = write_coref_xml(
        given.mentions, result.gold.chains, doc, given.doc_id or None, given.texts
    )
    emit(data, args.out)
