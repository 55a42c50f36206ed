from cli.common import (
    annotator_name,
    check_annotation,
    emit,
    emit_json,
    load_coref,
    load_document,
    load_documents,
)
from modules.baseline.evaluation import (
    cross_validate,
    cross_validation_to_json,
    format_cross_validation,
    predict_document,
    train_model,
)
from modules.baseline.mentions import load_pronouns
from modules.baseline.training import (
    CorpusDocument,
    MentionSource,
    Method,
    TrainConfig,
    load_model,
    save_model,
)
from modules.errors import UsageError
from modules.formats.coref_xml import write_coref_xml
from modules.metrics import parse_metrics
from modules.model import AnnotationSet
from utils.logger import log_info


def register(subparsers):
    parser = subparsers.add_parser(
        "baseline",
        help="Train, apply and evaluate the mention-pair baseline",
        description="Linear mention-pair models on gold (gm) or predicted (pm) mentions.",
    )
    commands = parser.add_subparsers(dest="baseline_command", metavar="action")
    commands.required = True

    train = commands.add_parser("train", help="Train a model on annotated documents")
    _add_corpus_arguments(train)
    _add_config_arguments(train)
    train.add_argument("--model", required=True, help="Model file to write")
    train.set_defaults(handler=run_train)

    predict = commands.add_parser("predict", help="Predict chains for one document")
    predict.add_argument("--model", required=True, help="Model file written by train")
    predict.add_argument("--doc", required=True, help="Document XML")
    predict.add_argument(
        "--mentions", help="Coreference XML with given mentions (default: detect mentions)"
    )
    predict.add_argument("--pronouns", help="Pronoun lemma list (default: $COREFTOOLS_PRONOUNS)")
    predict.add_argument(
        "--best-link-threshold",
        type=float,
        default=TrainConfig().best_link_threshold,
        help="Least score of a best link for regression models",
    )
    predict.add_argument("--out", help="Coreference XML (default: standard output)")
    predict.set_defaults(handler=run_predict)

    crossval = commands.add_parser("crossval", help="Leave-one-out evaluation")
    _add_corpus_arguments(crossval)
    _add_config_arguments(crossval)
    crossval.add_argument("--metrics", default="all", help="Comma separated metrics or all")
    crossval.add_argument("--json", action="store_true", help="Write a JSON report")
    crossval.add_argument("--out", help="Report file (default: standard output)")
    crossval.set_defaults(handler=run_crossval)


def _add_corpus_arguments(parser):
    parser.add_argument("--docs", nargs="+", required=True, help="Document XML files")
    parser.add_argument(
        "--gold", nargs="+", required=True, help="Gold coreference XML files, one per document"
    )
    parser.add_argument("--method", choices=[m.value for m in Method], default="svc")
    parser.add_argument(
        "--setup",
        choices=[s.value for s in MentionSource],
        default="gm",
        help="Train and evaluate on gold (gm) or predicted (pm) mentions",
    )
    parser.add_argument("--pronouns", help="Pronoun lemma list (default: $COREFTOOLS_PRONOUNS)")


def _add_config_arguments(parser):
    defaults = TrainConfig()
    parser.add_argument("--epochs", type=int, default=defaults.epochs)
    parser.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    parser.add_argument("--l2-lambda", type=float, default=defaults.l2_lambda)
    parser.add_argument("--seed", type=int, default=defaults.seed)
    parser.add_argument("--neg-window", type=int, default=defaults.neg_window)
    parser.add_argument(
        "--best-link-threshold", type=float, default=defaults.best_link_threshold
    )
    parser.add_argument(
        "--no-class-balancing", action="store_true", help="Weigh all examples equally"
    )


def _config(args) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        l2_lambda=args.l2_lambda,
        seed=args.seed,
        neg_window=args.neg_window,
        best_link_threshold=args.best_link_threshold,
        class_balancing=not args.no_class_balancing,
    ).validate()


def load_corpus(doc_paths, gold_paths) -> list:
    """Pair documents with their gold files by position.

    :raise UsageError: If the counts differ or a gold file names another document.
    :raise InvalidAnnotationError: If gold chains share or overlap mentions.
    """
    if len(doc_paths) != len(gold_paths):
        raise UsageError(f"{len(doc_paths)} documents but {len(gold_paths)} gold files")
    corpus = []
    for doc, gold_path in zip(load_documents(doc_paths), gold_paths):
        gold = load_coref(gold_path)
        if gold.doc_id and gold.doc_id != doc.doc_id:
            raise UsageError(f"gold file '{gold_path}' is for document '{gold.doc_id}'")
        for mention in gold.mentions:
            doc.check_mention(mention)
        annotation = AnnotationSet.from_chains(annotator_name(gold_path), gold.chains)
        check_annotation(annotation, gold.mentions, gold=True)
        corpus.append(CorpusDocument(doc, gold.mentions, gold.chains))
    return corpus


def run_train(args):
    cfg = _config(args)
    corpus = load_corpus(args.docs, args.gold)
    model = train_model(
        corpus, cfg, Method(args.method), MentionSource(args.setup), load_pronouns(args.pronouns)
    )
    save_model(model, args.model)
    log_info(f"trained {args.method} model on {len(corpus)} documents")


def run_predict(args):
    model = load_model(args.model)
    doc = load_document(args.doc)
    mentions = None
    if args.mentions:
        mentions = load_coref(args.mentions).mentions
        for mention in mentions:
            doc.check_mention(mention)
    cfg = TrainConfig(best_link_threshold=args.best_link_threshold)
    mentions, chains = predict_document(doc, model, load_pronouns(args.pronouns), cfg, mentions)
    log_info(f"predicted {len(chains)} chains over {len(mentions)} mentions")
    emit(write_coref_xml(mentions, chains, doc), args.out)


def run_crossval(args):
    cfg = _config(args)
    metrics = parse_metrics(args.metrics)
    corpus = load_corpus(args.docs, args.gold)
    report = cross_validate(
        corpus,
        cfg,
        Method(args.method),
        MentionSource(args.setup),
        load_pronouns(args.pronouns),
        metrics,
    )
    if args.json:
        emit_json(cross_validation_to_json(report), args.out)
    else:
        emit(format_cross_validation(report), args.out)
