import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from tripnet.consistency import (
    UnknownLeafError,
    all_consistent_triplets,
    inconsistent_triplets,
    is_consistent,
)
from tripnet.network import network_from_nested
from tripnet.oracle import consistency_bruteforce
from tripnet.simulation import random_network
from tripnet.triplets import Triplet, TripletSet, parse_triplets


def T(x, y, z):
    return Triplet.make(x, y, z)


def test_tree_examples(tree123):
    assert is_consistent(tree123, T("1", "2", "3"))
    assert not is_consistent(tree123, T("1", "3", "2"))
    assert not is_consistent(tree123, T("2", "3", "1"))


def test_gall_displays_two_orientations(gall123):
    # 2 can sit with 1 or with 3, never is 1 and 3 a cherry
    assert is_consistent(gall123, T("1", "2", "3"))
    assert is_consistent(gall123, T("2", "3", "1"))
    assert not is_consistent(gall123, T("1", "3", "2"))


def test_unknown_leaf(tree123):
    with pytest.raises(UnknownLeafError):
        is_consistent(tree123, T("1", "2", "9"))


def test_all_consistent_triplets_of_tree(caterpillar):
    got = all_consistent_triplets(caterpillar)
    assert got == parse_triplets("3,4|2\n3,4|1\n2,4|1\n2,3|1")


def test_all_consistent_needs_three_leaves():
    with pytest.raises(ValueError):
        all_consistent_triplets(network_from_nested(("a", "b")))


def test_inconsistent_list(tree123):
    ts = parse_triplets("1,2|3\n1,3|2")
    assert inconsistent_triplets(tree123, ts) == [T("1", "3", "2")]


def test_tree_shows_one_triplet_per_triple():
    net = random_network(9, 0, 3)
    shown = all_consistent_triplets(net)
    assert len(shown) == 84


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 5), st.integers(0, 2), st.integers(0, 10**6))
def test_agrees_with_bruteforce(n, k, seed):
    net = random_network(n, k, seed)
    if net.n_nodes > 16:
        return
    for x, y, z in combinations(net.leaf_labels, 3):
        for t in (T(x, y, z), T(x, z, y), T(y, z, x)):
            assert is_consistent(net, t) == consistency_bruteforce(net, t)


def test_every_triple_shows_something():
    # each triple is resolved somewhere in any network
    for seed in range(20):
        net = random_network(6, 2, seed)
        shown = all_consistent_triplets(net)
        triples = {frozenset(t.leaves) for t in shown}
        assert len(triples) == 20
