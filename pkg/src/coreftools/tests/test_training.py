import numpy as np
import pytest
from modules.baseline.features import FEATURE_NAMES, extract_features
from modules.baseline.mentions import MentionTyper
from modules.baseline.training import (
    CorpusDocument,
    Example,
    ExampleSet,
    LinearModel,
    MentionSource,
    Method,
    TrainConfig,
    balanced_weights,
    closest_predecessor_pairs,
    document_examples,
    generate_training_examples,
    load_model,
    save_model,
    train_linear,
    zero_model,
)
from modules.errors import ParseError, TrainingError
from modules.model import Mention
from tests.corpus import MENTION_DOC, PRONOUN_LEMMAS, name_corpus, name_document

NAME_LEMMAS = frozenset()


def test_closest_predecessor_pairs():
    chains = [frozenset({0, 2, 5}), frozenset({1, 3})]
    position = {i: i for i in range(6)}
    assert closest_predecessor_pairs(chains, position) == [(0, 2), (2, 5), (1, 3)]


def test_closest_predecessor_pairs_follow_positions():
    position = {0: 2, 1: 0, 2: 1}
    assert closest_predecessor_pairs([frozenset({0, 1, 2})], position) == [(1, 2), (2, 0)]


def test_document_examples_window():
    item = name_document("w", seed=3)
    typer = MentionTyper(item.doc, NAME_LEMMAS)
    examples = document_examples(item, item.mentions, typer, TrainConfig(neg_window=2))
    positives = {(e.first, e.second) for e in examples if e.label}
    assert positives == set(closest_predecessor_pairs(item.chains, {i: i for i in range(12)}))
    negatives = [e for e in examples if not e.label]
    assert negatives
    assert all(e.second - e.first == 1 for e in negatives)
    assert len(examples) == len({(e.first, e.second) for e in examples})


def test_document_examples_skip_distant_coreferent_links():
    item = name_document("w", seed=3)
    typer = MentionTyper(item.doc, NAME_LEMMAS)
    examples = document_examples(item, item.mentions, typer, TrainConfig())
    chain_of = {i: n for n, chain in enumerate(item.chains) for i in chain}
    for e in examples:
        assert e.label == int(chain_of[e.first] == chain_of[e.second])
        assert e.features == extract_features(
            item.mentions[e.first], item.mentions[e.second], item.doc, typer
        )
    assert sum(e.label for e in examples) == 12 - len(item.chains)


def test_balanced_weights():
    assert np.allclose(balanced_weights([1, 0, 0, 0]), [2, 2 / 3, 2 / 3, 2 / 3])
    assert np.allclose(balanced_weights([1, 0, 0, 0], enabled=False), [1, 1, 1, 1])
    assert np.allclose(balanced_weights([0, 0]), [1, 1])
    assert np.allclose(balanced_weights([1, 1, 1]), [1, 1, 1])
    assert len(balanced_weights([])) == 0


def test_predicted_mentions_add_spurious_negatives():
    item = CorpusDocument(
        MENTION_DOC,
        (Mention(0, "1", 2, 2), Mention(1, "3", 1, 1)),
        (frozenset({0, 1}),),
    )
    gold = generate_training_examples([item], MentionSource.GOLD, TrainConfig(), PRONOUN_LEMMAS)
    predicted = generate_training_examples(
        [item], MentionSource.PREDICTED, TrainConfig(), PRONOUN_LEMMAS
    )
    assert [(e.first, e.second, e.label) for e in gold.examples] == [(0, 1, 1)]
    assert len(predicted.examples) == 6
    assert sum(e.label for e in predicted.examples) == 1
    ids = {e.first for e in predicted.examples} | {e.second for e in predicted.examples}
    assert ids == {0, 1, 2, 3}


def test_training_separates_names():
    corpus = name_corpus(10)
    examples = generate_training_examples(corpus, MentionSource.GOLD, TrainConfig(), NAME_LEMMAS)
    model = train_linear(examples, TrainConfig(), Method.SVC)
    for e in examples.examples:
        assert model.is_coreferent(e.features) == bool(e.label)


def test_training_is_deterministic():
    corpus = name_corpus(6, seed=4)
    cfg = TrainConfig(seed=11)
    for method in Method:
        examples = generate_training_examples(corpus, MentionSource.GOLD, cfg, NAME_LEMMAS)
        first = train_linear(examples, cfg, method)
        second = train_linear(examples, cfg, method)
        assert np.array_equal(first.weights, second.weights)
        assert first.bias == second.bias
        assert first.method == method


def _examples(*rows):
    examples = tuple(
        Example("d", i, i + 1, features, label) for i, (features, label) in enumerate(rows)
    )
    return ExampleSet(examples, balanced_weights([e.label for e in examples]))


def test_training_without_examples():
    with pytest.raises(TrainingError):
        train_linear(ExampleSet((), np.ones(0)), TrainConfig(), Method.SVC)


def test_classification_needs_both_classes():
    examples = _examples((frozenset({"m1_pronoun"}), 0), (frozenset({"m2_pronoun"}), 0))
    with pytest.raises(TrainingError):
        train_linear(examples, TrainConfig(), Method.SVC)


@pytest.mark.parametrize("method", list(Method))
def test_identical_features_give_zero_model(method):
    features = frozenset({"m1_pronoun", "m2_pronoun", "both_pronoun"})
    model = train_linear(_examples((features, 1), (features, 0)), TrainConfig(), method)
    assert not model.weights.any()
    assert model.bias == 0.0
    assert not model.is_coreferent(features)


def test_zero_score_is_not_coreferent():
    model = zero_model(Method.SVC)
    assert model.score(frozenset({"head_match"})) == 0.0
    assert not model.is_coreferent(frozenset({"head_match"}))


def test_model_file_round_trip(tmp_path):
    weights = np.arange(len(FEATURE_NAMES)) / 7
    model = LinearModel(weights, -0.25, Method.SVR)
    path = tmp_path / "model.txt"
    save_model(model, str(path))
    loaded = load_model(str(path))
    assert np.array_equal(loaded.weights, weights)
    assert loaded.bias == -0.25
    assert loaded.method == Method.SVR


def test_model_file_layout(tmp_path):
    path = tmp_path / "model.txt"
    save_model(zero_model(Method.SVC), str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[1:4] == ["version\t1", "method\tsvc", "bias\t0.0"]
    assert len(lines) == 4 + len(FEATURE_NAMES)


def test_missing_features_weigh_zero(tmp_path):
    path = tmp_path / "model.txt"
    path.write_text("version\t1\nmethod\tsvc\nbias\t-1.5\nhead_match\t2.0\n", encoding="utf-8")
    model = load_model(str(path))
    assert model.score(frozenset({"head_match", "m1_pronoun"})) == 0.5


@pytest.mark.parametrize(
    "content,line",
    [
        ("version\t1\nmethod\tsvc\nfoo\t1.0\n", 3),
        ("version\t1\nmethod\tsvc\nbias 1.0\n", 3),
        ("version\t1\nbias\tmuch\n", 2),
        ("version\t2\nmethod\tsvc\n", None),
        ("version\t1\nmethod\tknn\n", None),
        ("method\tsvc\n", None),
    ],
)
def test_malformed_model_files(tmp_path, content, line):
    path = tmp_path / "model.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_model(str(path))
    assert excinfo.value.line == line


@pytest.mark.parametrize(
    "settings",
    [
        {"epochs": 0},
        {"learning_rate": 0.0},
        {"l2_lambda": -1.0},
        {"neg_window": 0},
        {"seed": -1},
    ],
)
def test_invalid_train_config(settings):
    with pytest.raises(ValueError):
        TrainConfig(**settings).validate()


def test_default_train_config_is_valid():
    cfg = TrainConfig().validate()
    assert cfg.neg_window == 100
    assert cfg.class_balancing
