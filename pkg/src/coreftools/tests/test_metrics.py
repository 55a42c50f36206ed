import itertools
import random
import time

import pytest
from modules.errors import MetricError
from modules.metrics import (
    ALL_METRICS,
    Metric,
    accumulate,
    conll_average,
    count_links,
    format_report,
    parse_metrics,
    report_to_json,
    score,
    score_bcub,
    score_blanc,
    score_ceaf,
    score_documents,
    score_lea,
    score_muc,
)
from tests.corpus import random_partition

KEY = [{"a", "b", "c"}, {"d", "e"}]
RESPONSE = [{"a", "b"}, {"c", "d", "e"}]

EXPECTED = {
    Metric.MUC: (2 / 3, 2 / 3),
    Metric.BCUB: (11 / 15, 11 / 15),
    Metric.CEAFM: (4 / 5, 4 / 5),
    Metric.CEAFE: (4 / 5, 4 / 5),
    Metric.BLANC: (7 / 12, 7 / 12),
    Metric.LEA: (3 / 5, 3 / 5),
}


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_hand_computed(metric):
    result = score(KEY, RESPONSE, [metric])[metric]
    recall, precision = EXPECTED[metric]
    assert result.recall.ratio == pytest.approx(recall)
    assert result.precision.ratio == pytest.approx(precision)


def test_muc_raw_counts():
    result = score_muc(KEY, RESPONSE)
    assert tuple(result.recall) == (2, 3)
    assert tuple(result.precision) == (2, 3)


def test_asymmetric_example():
    key = [{1, 2, 3, 4}]
    response = [{1, 2}, {3, 4, 5}]
    muc = score_muc(key, response)
    assert muc.recall.ratio == pytest.approx(2 / 3)
    assert muc.precision.ratio == pytest.approx(2 / 3)
    bcub = score_bcub(key, response)
    assert bcub.recall.ratio == pytest.approx(0.5)
    assert bcub.precision.ratio == pytest.approx((2 * 2 / 2 + 2 * 2 / 3) / 5)


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_identity(metric):
    result = score(KEY, KEY, [metric])[metric]
    assert result.recall.ratio == pytest.approx(1.0)
    assert result.precision.ratio == pytest.approx(1.0)
    assert result.f1 == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(500))
def test_random_key_scores_itself_perfectly(seed):
    rng = random.Random(seed)
    key = random_partition(range(rng.randint(0, 30)), rng, 0.2) + [frozenset({100, 101})]
    for metric, result in score(key, key).items():
        assert result.recall.ratio == pytest.approx(1.0, abs=1e-12), metric
        assert result.precision.ratio == pytest.approx(1.0, abs=1e-12), metric
        assert result.f1 == pytest.approx(1.0, abs=1e-12), metric


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_empty_response(metric):
    result = score(KEY, [], [metric])[metric]
    assert result.recall.ratio == 0.0
    assert result.precision.ratio == 0.0
    assert result.f1 == 0.0


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_both_empty(metric):
    result = score([], [], [metric])[metric]
    assert (result.recall.ratio, result.precision.ratio, result.f1) == (0.0, 0.0, 0.0)


def _random_pair(rng):
    universe = list(range(rng.randint(1, 12)))
    key_mentions = [m for m in universe if rng.random() < 0.9]
    response_mentions = [m for m in universe if rng.random() < 0.9]
    key = random_partition(key_mentions, rng, 0.1)
    response = random_partition(response_mentions, rng, 0.1)
    return key, response


@pytest.mark.parametrize("seed", range(500))
def test_swap_exchanges_recall_and_precision(seed):
    key, response = _random_pair(random.Random(seed))
    forward = score(key, response)
    backward = score(response, key)
    for metric in ALL_METRICS:
        swapped = backward[metric]
        assert forward[metric].recall.ratio == pytest.approx(swapped.precision.ratio, abs=1e-12)
        assert forward[metric].precision.ratio == pytest.approx(swapped.recall.ratio, abs=1e-12)
        assert forward[metric].f1 == pytest.approx(swapped.f1, abs=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_scores_are_ratios(seed):
    key, response = _random_pair(random.Random(seed))
    for result in score(key, response).values():
        for value in (result.recall.ratio, result.precision.ratio, result.f1):
            assert 0.0 <= value <= 1.0 + 1e-12


def _exhaustive_ceaf(key, response, phi):
    key, response = [frozenset(c) for c in key], [frozenset(c) for c in response]
    if len(key) > len(response):
        key, response = response, key
        swap = True
    else:
        swap = False
    best = 0.0
    for chosen in itertools.permutations(range(len(response)), len(key)):
        total = sum(
            phi(response[j], k) if swap else phi(k, response[j]) for k, j in zip(key, chosen)
        )
        best = max(best, total)
    return best


@pytest.mark.parametrize("seed", range(200))
def test_ceaf_matches_exhaustive_search(seed):
    rng = random.Random(seed)
    key, response = _random_pair(rng)
    key, response = key[:6], response[:6]

    def phi_m(k, r):
        return len(k & r)

    def phi_e(k, r):
        return 2 * len(k & r) / (len(k) + len(r))

    ceafm = score_ceaf(key, response, "m")
    ceafe = score_ceaf(key, response, "e")
    assert ceafm.recall.numerator == pytest.approx(_exhaustive_ceaf(key, response, phi_m))
    assert ceafe.recall.numerator == pytest.approx(_exhaustive_ceaf(key, response, phi_e))


def _links(chains):
    mentions = sorted(set().union(*chains)) if chains else []
    coref = set()
    for chain in chains:
        coref |= set(itertools.combinations(sorted(chain), 2))
    every = set(itertools.combinations(mentions, 2))
    return coref, every - coref


@pytest.mark.parametrize("seed", range(100))
def test_blanc_counts_match_link_sets(seed):
    key, response = _random_pair(random.Random(seed))
    key_coref, key_non = _links(key)
    response_coref, response_non = _links(response)
    counts = count_links([frozenset(c) for c in key], [frozenset(c) for c in response])
    assert counts.coref_key == len(key_coref)
    assert counts.coref_response == len(response_coref)
    assert counts.coref_common == len(key_coref & response_coref)
    assert counts.non_coref_key == len(key_non)
    assert counts.non_coref_response == len(response_non)
    assert counts.non_coref_common == len(key_non & response_non)


def test_blanc_without_coreference_links():
    result = score_blanc([{1}, {2}, {3}], [{1}, {2}, {3}])
    assert result.f1 == pytest.approx(1.0)
    assert result.coref.recall.denominator == 0


def test_blanc_without_non_coreference_links():
    result = score_blanc([{1, 2}], [{1, 2}])
    assert result.f1 == pytest.approx(1.0)
    assert result.non_coref.recall.denominator == 0


def test_lea_examples():
    result = score_lea([{"a", "b", "c"}], [{"a", "b"}, {"c", "d"}])
    assert result.recall.ratio == pytest.approx(1 / 3)
    assert result.precision.ratio == pytest.approx(0.5)
    assert result.f1 == pytest.approx(0.4)
    result = score_lea([{"a", "b"}], [{"a", "b"}, {"x", "y"}])
    assert result.recall.ratio == 1.0
    assert result.precision.ratio == 0.5


def test_lea_singletons():
    assert score_lea([{1}], [{1}]).recall.ratio == 1.0
    assert score_lea([{1}], [{1, 2}]).recall.ratio == 0.0
    assert score_lea([{1, 2}], [{1, 2}, {3}]).precision.ratio == pytest.approx(2 / 3)


def test_adding_a_correct_link_raises_recall():
    key = [{1, 2, 3, 4}]
    partial = [{1, 2}, {3, 4}]
    merged = [{1, 2, 3, 4}]
    for metric in (Metric.MUC, Metric.BCUB, Metric.LEA, Metric.BLANC):
        before = score(key, partial, [metric])[metric].recall.ratio
        after = score(key, merged, [metric])[metric].recall.ratio
        assert after > before


@pytest.mark.parametrize("seed", range(300))
def test_removing_a_correct_link_never_raises_f1(seed):
    rng = random.Random(seed)
    key, response = _random_pair(rng)
    key = key + [frozenset({100, 101, 102, 103})]
    # a response chain inside one key chain, then split in two
    correct = frozenset(rng.sample(sorted(key[-1]), rng.randint(2, 4)))
    response = [c - correct for c in response if c - correct] + [correct]
    members = sorted(correct)
    cut = rng.randint(1, len(members) - 1)
    split = response[:-1] + [frozenset(members[:cut]), frozenset(members[cut:])]
    before = score(key, response)
    after = score(key, split)
    for metric in ALL_METRICS:
        assert after[metric].f1 <= before[metric].f1 + 1e-12, metric


def test_ten_thousand_mentions():
    rng = random.Random(7)
    key = []
    mention = 0
    while mention < 10000:
        size = rng.randint(1, 10)
        key.append(set(range(mention, min(mention + size, 10000))))
        mention += size
    response = [set(c) for c in key]
    for moved in rng.sample(range(10000), 500):
        for chain in response:
            chain.discard(moved)
        rng.choice(response).add(moved)
    started = time.perf_counter()
    scores = score(key, response)
    assert time.perf_counter() - started < 5.0
    assert all(0.5 < s.f1 < 1.0 for s in scores.values())


def test_accumulate_sums_before_dividing():
    first = score_muc([{1, 2, 3}], [{1, 2, 3}])
    second = score_muc([{1, 2}], [])
    total = accumulate([first, second])
    assert tuple(total.recall) == (2, 3)
    assert total.recall.ratio == pytest.approx(2 / 3)


def test_accumulate_blanc():
    first = score_blanc([{1, 2}, {3}], [{1, 2}, {3}])
    second = score_blanc([{1, 2}], [{1}, {2}])
    total = accumulate([first, second])
    assert tuple(total.coref.recall) == (1, 2)
    assert tuple(total.non_coref.recall) == (2, 2)
    assert total.f1 == pytest.approx((2 / 3 + 0.8) / 2)


def test_accumulate_mixed_metrics():
    with pytest.raises(MetricError):
        accumulate([score_muc(KEY, RESPONSE), score_bcub(KEY, RESPONSE)])


def test_accumulate_empty():
    total = accumulate([], Metric.LEA)
    assert total.metric == Metric.LEA
    assert total.f1 == 0.0


def test_score_documents():
    scores = score_documents([(KEY, RESPONSE), (KEY, KEY)], [Metric.MUC])
    assert tuple(scores[Metric.MUC].recall) == (5, 6)


def test_parse_metrics():
    assert parse_metrics("all") == list(ALL_METRICS)
    assert parse_metrics("lea, MUC,lea") == [Metric.LEA, Metric.MUC]
    with pytest.raises(ValueError):
        parse_metrics("muc,ceaf")


def test_conll_average_and_report():
    scores = score(KEY, RESPONSE)
    expected = (2 / 3 + 11 / 15 + 4 / 5) / 3
    assert conll_average(scores) == pytest.approx(expected)
    assert conll_average(score(KEY, RESPONSE, [Metric.MUC])) is None
    report = format_report(scores)
    muc_line = f"{'muc':<8}{66.67:>9.2f}{66.67:>9.2f}{66.67:>9.2f}   2/3   2/3"
    assert report.splitlines()[1] == muc_line
    assert report.splitlines()[-1] == f"{'conll':<8}{'':>18}{100 * expected:>9.2f}"
    as_json = report_to_json(scores)
    assert as_json["conll"] == pytest.approx(expected)
    assert as_json["blanc"]["coref"]["R"] == pytest.approx(0.5)
