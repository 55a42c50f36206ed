import os

from cli.common import emit, load_documents, read_bytes
from modules.errors import UsageError
from modules.formats.converter import Format, convert
from utils.file_name_formatter import format_file_name
from utils.logger import log_info
from utils.path import mkdir


def register(subparsers):
    parser = subparsers.add_parser(
        "convert",
        help="Convert between coreference XML and CoNLL",
        description="XML input needs the document XML for its tokens. CoNLL input with "
        "several documents gives one XML file per document in the --out directory.",
    )
    parser.add_argument("--from", dest="source", required=True, choices=[f.value for f in Format])
    parser.add_argument("--to", dest="target", choices=[f.value for f in Format])
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, help="Input files")
    parser.add_argument("--doc", nargs="+", help="Document XML files of the inputs")
    parser.add_argument("--out", help="Output file or directory (default: standard output)")
    parser.add_argument(
        "--name-template",
        default="{DOC}.xml",
        help="File names in the --out directory; {DOC} and {GENRE} are replaced",
    )
    parser.set_defaults(handler=run)


def run(args):
    source = Format(args.source)
    target = Format(args.target) if args.target else _other(source)
    documents = load_documents(args.doc)
    results = {}
    for path in args.inputs:
        for doc_id, data in convert(source, target, read_bytes(path), documents).items():
            if doc_id in results:
                raise UsageError(f"document '{doc_id}' is in more than one input")
            results[doc_id] = data
    log_info(f"converted {len(results)} documents to {target.value}")

    if target == Format.CONLL or len(results) == 1:
        emit(b"".join(results.values()), args.out)
        return
    if not args.out:
        raise UsageError("several documents need an --out directory")
    genres = {doc.doc_id: doc.genre or "" for doc in documents}
    mkdir(args.out)
    names = set()
    for doc_id, data in results.items():
        name = format_file_name(args.name_template, doc_id, genres.get(doc_id, ""))
        if name in names:
            raise UsageError(f"--name-template gives '{name}' for more than one document")
        names.add(name)
        emit(data, os.path.join(args.out, name))


def _other(source: Format) -> Format:
    return Format.XML if source == Format.CONLL else Format.CONLL
