import utils.list_helper


def test_flatten_numbers():
    arr = [[1, 4, 7], [99, 2]]
    assert utils.list_helper.flatten(arr) == [1, 4, 7, 99, 2]


def test_flatten_sets():
    result = utils.list_helper.flatten([frozenset({3}), frozenset(), [5, 6]])
    assert result == [3, 5, 6]


def test_unique_in_order_no_duplicates():
    assert utils.list_helper.unique_in_order(["d1", "d2", "d3"]) == ["d1", "d2", "d3"]


def test_unique_in_order_several_duplicates():
    result = utils.list_helper.unique_in_order(["d2", "d1", "d2", "d3", "d1"])
    assert result == ["d2", "d1", "d3"]


def test_unique_in_order_empty():
    assert utils.list_helper.unique_in_order([]) == []


def test_pairs():
    assert utils.list_helper.pairs([0, 2, 5]) == [(0, 2), (0, 5), (2, 5)]
    assert utils.list_helper.pairs([7]) == []
