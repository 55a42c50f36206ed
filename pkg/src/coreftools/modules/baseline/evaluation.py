"""Prediction with a trained link model and leave-one-out evaluation of the baseline."""

from typing import NamedTuple, Optional, Sequence

from joblib import Parallel, delayed
from modules.baseline.chains import build_chains_best_link, build_chains_merge
from modules.baseline.mentions import MentionTyper, detect_mentions
from modules.baseline.training import (
    CorpusDocument,
    LinearModel,
    MentionSource,
    Method,
    TrainConfig,
    generate_training_examples,
    train_linear,
)
from modules.errors import TrainingError
from modules.metrics import (
    ALL_METRICS,
    RatioPair,
    accumulate,
    format_report,
    report_to_json,
    score,
)
from modules.model import Document, chains_as_spans, normalize_chains
from utils.env import JOBS, get_env_int
from utils.logger import log_info

NO_GENRE = "-"


def predict_document(
    doc: Document,
    model: LinearModel,
    pronouns: frozenset,
    cfg: TrainConfig = TrainConfig(),
    mentions: Optional[Sequence] = None,
):
    """Predict chains for a document.

    :param doc: The document.
    :param model: A classification model builds chains by merging all predicted links,
        a regression model by best links.
    :param pronouns: Pronoun lemmas.
    :param cfg: Provides the best link threshold.
    :param mentions: Candidate mentions; detected when not given.
    :returns: ``(mentions, chains)`` with chains over mention ids, without singletons.
    """
    if mentions is None:
        mentions = detect_mentions(doc, pronouns)
    typer = MentionTyper(doc, pronouns)
    if model.method == Method.SVC:
        chains = build_chains_merge(mentions, model, doc, typer)
    else:
        chains = build_chains_best_link(mentions, model, doc, typer, cfg.best_link_threshold)
    return tuple(mentions), chains


def train_model(
    corpus: Sequence[CorpusDocument],
    cfg: TrainConfig,
    method: Method,
    source: MentionSource,
    pronouns: frozenset,
) -> LinearModel:
    examples = generate_training_examples(corpus, source, cfg, pronouns)
    return train_linear(examples, cfg, method)


class FoldResult(NamedTuple):
    doc_id: str
    genre: str
    scores: dict
    mention_recall: RatioPair
    mention_precision: RatioPair


class GenreReport(NamedTuple):
    documents: int
    scores: dict
    mention_recall: RatioPair
    mention_precision: RatioPair


class CrossValidationReport(NamedTuple):
    overall: GenreReport
    genres: dict
    folds: tuple


def gold_chain_mentions(item: CorpusDocument) -> tuple:
    """The gold mentions that are part of a chain of at least two mentions."""
    chained = {i for chain in normalize_chains(item.chains) for i in chain}
    return tuple(m for m in item.mentions if m.id in chained)


def run_fold(
    corpus: Sequence[CorpusDocument],
    held_out: int,
    cfg: TrainConfig,
    method: Method,
    source: MentionSource,
    pronouns: frozenset,
    metrics: Sequence,
) -> FoldResult:
    """Train on every document but one and score the held out document."""
    training = [item for i, item in enumerate(corpus) if i != held_out]
    model = train_model(training, cfg, method, source, pronouns)
    item = corpus[held_out]
    gold_mentions = gold_chain_mentions(item)
    candidates = gold_mentions if source == MentionSource.GOLD else None
    mentions, chains = predict_document(item.doc, model, pronouns, cfg, candidates)

    key = chains_as_spans(item.mentions, normalize_chains(item.chains))
    response = chains_as_spans(mentions, normalize_chains(chains))
    gold_spans = {m.span for m in gold_mentions}
    found_spans = {m.span for m in mentions}
    correct = len(gold_spans & found_spans)
    return FoldResult(
        doc_id=item.doc.doc_id,
        genre=item.doc.genre or NO_GENRE,
        scores=score(key, response, metrics),
        mention_recall=RatioPair(correct, len(gold_spans)),
        mention_precision=RatioPair(correct, len(found_spans)),
    )


def summarize(folds: Sequence[FoldResult], metrics: Sequence) -> GenreReport:
    recall = RatioPair()
    precision = RatioPair()
    for fold in folds:
        recall = recall + fold.mention_recall
        precision = precision + fold.mention_precision
    scores = {metric: accumulate([f.scores[metric] for f in folds], metric) for metric in metrics}
    return GenreReport(len(folds), scores, recall, precision)


def cross_validate(
    corpus: Sequence[CorpusDocument],
    cfg: TrainConfig,
    method: Method,
    source: MentionSource,
    pronouns: frozenset,
    metrics: Sequence = ALL_METRICS,
    n_jobs: Optional[int] = None,
) -> CrossValidationReport:
    """Leave-one-out evaluation with one fold per document.

    Scores are accumulated over documents, overall and per genre (documents without a
    genre count as genre ``-``).

    :raise TrainingError: If the corpus has fewer than two documents.
    """
    if len(corpus) < 2:
        raise TrainingError("leave-one-out evaluation needs at least 2 documents")
    metrics = list(metrics)
    n_jobs = get_env_int(JOBS, 1) if n_jobs is None else n_jobs
    log_info(f"cross-validating {method.value}/{source.value} on {len(corpus)} documents")
    folds = Parallel(n_jobs=n_jobs)(
        delayed(run_fold)(corpus, i, cfg, method, source, pronouns, metrics)
        for i in range(len(corpus))
    )
    genres = {}
    for fold in folds:
        genres.setdefault(fold.genre, []).append(fold)
    return CrossValidationReport(
        overall=summarize(folds, metrics),
        genres={genre: summarize(items, metrics) for genre, items in sorted(genres.items())},
        folds=tuple(folds),
    )


def _mention_line(report: GenreReport) -> str:
    return (
        f"mentions  R {100 * report.mention_recall.ratio:.2f}"
        f"  P {100 * report.mention_precision.ratio:.2f}"
    )


def format_cross_validation(report: CrossValidationReport) -> str:
    parts = []
    for genre, genre_report in report.genres.items():
        parts.append(f"genre {genre} ({genre_report.documents} documents)\n")
        parts.append(_mention_line(genre_report) + "\n")
        parts.append(format_report(genre_report.scores))
        parts.append("\n")
    parts.append(f"overall ({report.overall.documents} documents)\n")
    parts.append(_mention_line(report.overall) + "\n")
    parts.append(format_report(report.overall.scores))
    return "".join(parts)


def _genre_to_json(report: GenreReport) -> dict:
    return {
        "documents": report.documents,
        "mentions": {
            "R": report.mention_recall.ratio,
            "P": report.mention_precision.ratio,
        },
        "scores": report_to_json(report.scores),
    }


def cross_validation_to_json(report: CrossValidationReport) -> dict:
    return {
        "overall": _genre_to_json(report.overall),
        "genres": {genre: _genre_to_json(r) for genre, r in report.genres.items()},
    }
