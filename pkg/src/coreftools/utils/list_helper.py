"""list_helper offers tools to work with lists, mostly using the ``itertools`` library."""

import itertools


def flatten(nested_list):
    return list(itertools.chain.from_iterable(nested_list))


def unique_in_order(items):
    """Drop repeated items while keeping the first occurrence of each.

    Items must be hashable.
    """
    seen = set()
    results = []
    for element in items:
        if element not in seen:
            seen.add(element)
            results.append(element)
    return results


def pairs(items):
    """All unordered pairs ``(a, b)`` of ``items`` with ``a`` before ``b``."""
    return list(itertools.combinations(items, 2))
