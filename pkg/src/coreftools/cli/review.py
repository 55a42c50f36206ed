from cli.common import align_annotation, emit, emit_json, load_annotations, load_coref
from modules.adjudicator import GOLD_ANNOTATOR, tally_links
from modules.review import (
    classify_annotator_chains,
    format_review,
    link_support_histogram,
    review_to_json,
)


def register(subparsers):
    parser = subparsers.add_parser(
        "review",
        help="Compare annotations with the gold standard",
        description="Histogram of annotator support for gold links and non-links, and "
        "the chain mistakes of every annotator.",
    )
    parser.add_argument("--mentions", required=True, help="Coreference XML with the mentions")
    parser.add_argument(
        "--annotations", nargs="+", required=True, help="Coreference XML file per annotator"
    )
    parser.add_argument("--gold", required=True, help="Adjudicated coreference XML")
    parser.add_argument("--bins", type=int, default=10, help="Histogram bins (default: 10)")
    parser.add_argument("--json", action="store_true", help="Write a JSON report")
    parser.add_argument("--out", help="Report file (default: standard output)")
    parser.set_defaults(handler=run)


def run(args):
    if args.bins < 1:
        raise ValueError(f"--bins must be positive, got {args.bins}")
    given = load_coref(args.mentions)
    annotations = load_annotations(given.mentions, args.annotations)
    gold = align_annotation(given.mentions, load_coref(args.gold), GOLD_ANNOTATOR, gold=True)
    histogram = link_support_histogram(tally_links(given.mentions, annotations), gold, args.bins)
    report = classify_annotator_chains(annotations, gold)
    if args.json:
        emit_json(review_to_json(histogram, report), args.out)
    else:
        emit(format_review(histogram, report), args.out)
