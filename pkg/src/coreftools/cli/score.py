from cli.common import detect_format, emit, emit_json, load_documents, load_scoring_chains
from modules.metrics import format_report, parse_metrics, report_to_json, score_documents
from modules.model import normalize_chains
from utils.list_helper import unique_in_order
from utils.logger import log_info, log_warning


def register(subparsers):
    parser = subparsers.add_parser("score", help="Score a response against a key")
    parser.add_argument("--key", required=True, help="Key file (CoNLL or coreference XML)")
    parser.add_argument("--response", required=True, help="Response file, same format options")
    parser.add_argument(
        "--metrics",
        default="all",
        help="Comma separated metrics out of muc, bcub, ceafm, ceafe, blanc, lea or all",
    )
    parser.add_argument("--format", choices=["conll", "xml"], help="Input format of both files")
    parser.add_argument(
        "--doc", nargs="+", help="Document XML files providing sentence numbers for CoNLL input"
    )
    parser.add_argument(
        "--keep-singletons", action="store_true", help="Do not drop single-mention chains"
    )
    parser.add_argument("--json", action="store_true", help="Write a JSON report")
    parser.add_argument("--out", help="Report file (default: standard output)")
    parser.set_defaults(handler=run)


def run(args):
    metrics = parse_metrics(args.metrics)
    documents = load_documents(args.doc)
    key = load_scoring_chains(args.key, detect_format(args.key, args.format), documents)
    response = load_scoring_chains(
        args.response, detect_format(args.response, args.format), documents
    )
    for doc_id in response:
        if doc_id not in key:
            log_warning(f"response document '{doc_id}' is not in the key, scored as spurious")
    doc_ids = unique_in_order(list(key) + list(response))
    scores = score_documents(
        (_document_chains(key, response, doc_id, args.keep_singletons) for doc_id in doc_ids),
        metrics,
    )
    log_info(f"scored {len(doc_ids)} documents")

    if args.json:
        emit_json(report_to_json(scores), args.out)
    else:
        emit(format_report(scores), args.out)


def _document_chains(key, response, doc_id, keep_singletons):
    if doc_id not in response:
        log_warning(f"key document '{doc_id}' has no response, scored as empty")
    key_chains = key.get(doc_id, [])
    response_chains = response.get(doc_id, [])
    if keep_singletons:
        return key_chains, response_chains
    return normalize_chains(key_chains), normalize_chains(response_chains)
