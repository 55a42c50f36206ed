from cli.common import emit, emit_json, load_annotations, load_coref
from joblib import Parallel, delayed
from modules.agreement import (
    agreement_to_json,
    corpus_agreement,
    document_agreement,
    format_agreement,
)
from modules.errors import UsageError
from utils.env import JOBS, get_env_int


def register(subparsers):
    parser = subparsers.add_parser(
        "iaa",
        help="Inter-annotator agreement",
        description="Krippendorff's alpha with Passonneau (IAA1) and MASI (IAA2) distances. "
        "Repeat --mentions/--annotations for several documents.",
    )
    parser.add_argument(
        "--mentions",
        action="append",
        required=True,
        help="Coreference XML with the given mentions of one document",
    )
    parser.add_argument(
        "--annotations",
        action="append",
        nargs="+",
        required=True,
        help="Coreference XML files of the annotators of that document",
    )
    parser.add_argument("--json", action="store_true", help="Write a JSON report")
    parser.add_argument("--out", help="Report file (default: standard output)")
    parser.set_defaults(handler=run)


def _load(mentions_path, annotation_paths):
    given = load_coref(mentions_path)
    return given.doc_id, given.mentions, load_annotations(given.mentions, annotation_paths)


def run(args):
    if len(args.mentions) != len(args.annotations):
        raise UsageError("every --mentions needs one --annotations list")
    loaded = [_load(m, a) for m, a in zip(args.mentions, args.annotations)]
    records = Parallel(n_jobs=get_env_int(JOBS, 1))(
        delayed(document_agreement)(doc_id, mentions, annotations)
        for doc_id, mentions, annotations in loaded
    )
    corpus = corpus_agreement(records)
    if args.json:
        emit_json(agreement_to_json(records, corpus), args.out)
    else:
        emit(format_agreement(records, corpus), args.out)
