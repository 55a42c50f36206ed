"""Training examples and linear link models.

Positive examples link every chain mention to its closest predecessor in the same chain.
Negative examples are all non-coreferent links spanning fewer than ``neg_window`` mentions.
When training for predicted mentions, spurious mentions found by mention detection are
sampled into the mention list so they contribute negative links.

Links are scored by linear models trained by stochastic gradient descent with an L2
penalty: hinge loss for classification (``svc``) and epsilon insensitive loss for
regression (``svr``).
"""

import random
from collections import namedtuple
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from modules.baseline.features import FEATURE_INDEX, FEATURE_NAMES, extract_features, to_matrix
from modules.baseline.mentions import MentionTyper, detect_mentions
from modules.errors import ParseError, TrainingError
from modules.model import Document
from sklearn.linear_model import SGDClassifier, SGDRegressor

MODEL_FORMAT_VERSION = 1
"""
Version written to and expected in model files.
"""

SVR_EPSILON = 0.1
"""
Width of the insensitive zone of the regression loss.
"""


class Method(Enum):
    SVC = "svc"
    SVR = "svr"


class MentionSource(Enum):
    """Whether coreference runs on gold mentions (``gm``) or detected ones (``pm``)."""

    GOLD = "gm"
    PREDICTED = "pm"


class TrainConfig(
    namedtuple(
        "TrainConfig",
        "epochs learning_rate l2_lambda seed neg_window best_link_threshold class_balancing",
        defaults=(20, 0.05, 1e-4, 0, 100, 0.1, True),
    )
):
    """Training settings; ``seed`` fixes every random choice.

    - epochs: passes over the training examples
    - learning_rate: initial step size, decreasing with the inverse square root of steps
    - l2_lambda: strength of the L2 penalty
    - neg_window: negative links span fewer than this many mentions
    - best_link_threshold: least score of a best link that joins a chain
    - class_balancing: weight examples inversely to their class size
    """

    def validate(self):
        """:raise ValueError: If a setting is not positive."""
        for name in ("epochs", "learning_rate", "l2_lambda", "neg_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ValueError(f"seed must not be negative, got {self.seed}")
        return self


class CorpusDocument(NamedTuple):
    """A document with its gold mentions and chains over their ids."""

    doc: Document
    mentions: tuple
    chains: tuple


class Example(NamedTuple):
    doc_id: str
    first: int
    second: int
    features: frozenset
    label: int


class ExampleSet(NamedTuple):
    examples: tuple
    weights: np.ndarray


def closest_predecessor_pairs(chains, position: dict) -> list:
    """Links of every chain mention to the previous mention of the same chain."""
    pairs = []
    for chain in chains:
        ordered = sorted(chain, key=position.get)
        pairs.extend(zip(ordered, ordered[1:]))
    return pairs


def _sample_spurious(item: CorpusDocument, pronouns, rng: random.Random) -> list:
    gold_spans = {m.span for m in item.mentions}
    detected = [m for m in detect_mentions(item.doc, pronouns) if m.span not in gold_spans]
    count = min(len(detected), len(item.mentions))
    picked = sorted(rng.sample(range(len(detected)), count))
    next_id = max((m.id for m in item.mentions), default=-1) + 1
    return [detected[i]._replace(id=next_id + n) for n, i in enumerate(picked)]


def document_examples(item: CorpusDocument, mentions, typer: MentionTyper, cfg: TrainConfig):
    ordered = sorted(mentions, key=lambda m: (item.doc.order_key(m), m.id))
    position = {m.id: i for i, m in enumerate(ordered)}
    chain_of = {i: n for n, chain in enumerate(item.chains) for i in chain}
    positives = set(closest_predecessor_pairs(item.chains, position))
    examples = []
    for j, m2 in enumerate(ordered):
        for i in range(max(0, j - cfg.neg_window + 1), j):
            m1 = ordered[i]
            coreferent = m1.id in chain_of and chain_of.get(m1.id) == chain_of.get(m2.id)
            if coreferent and (m1.id, m2.id) not in positives:
                continue
            features = extract_features(m1, m2, item.doc, typer)
            examples.append(Example(item.doc.doc_id, m1.id, m2.id, features, int(coreferent)))
    # positives farther apart than the window are still examples
    found = {(e.first, e.second) for e in examples if e.label}
    for first, second in sorted(positives - found, key=lambda p: position[p[1]]):
        m1, m2 = ordered[position[first]], ordered[position[second]]
        features = extract_features(m1, m2, item.doc, typer)
        examples.append(Example(item.doc.doc_id, first, second, features, 1))
    return examples


def balanced_weights(labels: Sequence[int], enabled: bool = True) -> np.ndarray:
    """Weights ``n / (2 * n_class)`` so both classes weigh the same in total.

    Examples of a single class all weigh 1.
    """
    labels = np.asarray(labels)
    weights = np.ones(len(labels))
    if not enabled or len(np.unique(labels)) < 2:
        return weights
    for value in (0, 1):
        weights[labels == value] = len(labels) / (2 * int(np.sum(labels == value)))
    return weights


def generate_training_examples(
    corpus: Sequence[CorpusDocument],
    source: MentionSource,
    cfg: TrainConfig,
    pronouns: frozenset,
) -> ExampleSet:
    """Labelled links of all training documents.

    :param corpus: Documents with gold chains.
    :param source: With predicted mentions, as many spurious detected mentions as there
        are gold mentions (or all there are) are sampled into every document.
    :param cfg: Training settings.
    :param pronouns: Pronoun lemmas for mention typing and detection.
    :returns: The examples in document order with class balanced weights.
    """
    rng = random.Random(cfg.seed)
    examples = []
    for item in corpus:
        mentions = list(item.mentions)
        if source == MentionSource.PREDICTED:
            mentions += _sample_spurious(item, pronouns, rng)
        typer = MentionTyper(item.doc, pronouns)
        examples.extend(document_examples(item, mentions, typer, cfg))
    labels = [e.label for e in examples]
    return ExampleSet(tuple(examples), balanced_weights(labels, cfg.class_balancing))


class LinearModel(NamedTuple):
    """A linear link scorer over ``FEATURE_NAMES``."""

    weights: np.ndarray
    bias: float
    method: Method

    def score(self, features: frozenset) -> float:
        total = sum(self.weights[FEATURE_INDEX[name]] for name in sorted(features))
        return float(self.bias + total)

    def is_coreferent(self, features: frozenset) -> bool:
        """Classification decision; a score of exactly 0 is not coreferent."""
        return self.score(features) > 0


def zero_model(method: Method) -> LinearModel:
    return LinearModel(np.zeros(len(FEATURE_NAMES)), 0.0, method)


def train_linear(example_set: ExampleSet, cfg: TrainConfig, method: Method) -> LinearModel:
    """Fit a linear model to the examples.

    Classification uses ``SGDClassifier`` with hinge loss, regression ``SGDRegressor`` with
    epsilon insensitive loss on targets 1 and 0. Both run all epochs with a fixed seed.
    If all examples have the same features the result is the zero model, which
    predicts non-coreference.

    :raise TrainingError: If there are no examples or, for classification, only one class.
    """
    examples = example_set.examples
    if not examples:
        raise TrainingError("no training examples")
    labels = np.array([e.label for e in examples])
    if method == Method.SVC and len(set(labels.tolist())) < 2:
        raise TrainingError("classification needs coreferent and non-coreferent examples")
    if len({e.features for e in examples}) == 1:
        return zero_model(method)

    matrix = to_matrix([e.features for e in examples])
    common = dict(
        penalty="l2",
        alpha=cfg.l2_lambda,
        learning_rate="invscaling",
        eta0=cfg.learning_rate,
        max_iter=cfg.epochs,
        tol=None,
        shuffle=True,
        random_state=cfg.seed,
    )
    if method == Method.SVC:
        estimator = SGDClassifier(loss="hinge", **common)
        estimator.fit(matrix, labels, sample_weight=example_set.weights)
        weights = estimator.coef_[0]
    else:
        estimator = SGDRegressor(loss="epsilon_insensitive", epsilon=SVR_EPSILON, **common)
        estimator.fit(matrix, labels.astype(float), sample_weight=example_set.weights)
        weights = estimator.coef_
    return LinearModel(np.array(weights, dtype=float), float(estimator.intercept_[0]), method)


def save_model(model: LinearModel, path: str):
    """Write a model as a tab separated text file of feature names and weights."""
    lines = [
        "# coreftools linear link model",
        f"version\t{MODEL_FORMAT_VERSION}",
        f"method\t{model.method.value}",
        f"bias\t{model.bias!r}",
    ]
    lines += [f"{name}\t{float(w)!r}" for name, w in zip(FEATURE_NAMES, model.weights)]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_model(path: str) -> LinearModel:
    """Read a model written by ``save_model``. Features missing from the file weigh 0.

    :raise ParseError: On a malformed line, an unknown feature or an unsupported version.
    """
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    header = {}
    weights = np.zeros(len(FEATURE_NAMES))
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"expected 'name<TAB>value': '{line}'", line_no)
        name, value = parts
        if name in ("version", "method"):
            header[name] = value
            continue
        try:
            number = float(value)
        except ValueError:
            raise ParseError(f"'{value}' is not a number", line_no)
        if name == "bias":
            header["bias"] = number
        elif name in FEATURE_INDEX:
            weights[FEATURE_INDEX[name]] = number
        else:
            raise ParseError(f"unknown feature '{name}'", line_no)
    if header.get("version") != str(MODEL_FORMAT_VERSION):
        raise ParseError(f"unsupported model version '{header.get('version')}'")
    try:
        method = Method(header.get("method"))
    except ValueError:
        raise ParseError(f"unknown model method '{header.get('method')}'")
    return LinearModel(weights, float(header.get("bias", 0.0)), method)
