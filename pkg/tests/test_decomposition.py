import pytest
from hypothesis import given, settings, strategies as st

from tripnet.consistency import all_consistent_triplets
from tripnet.decomposition import (
    WeightedLeafGraph,
    block_name,
    induced_triplets,
    is_sn_set,
    restrict_triplets,
    sn_decompose,
    split_components,
)
from tripnet.heights import height_function
from tripnet.simulation import random_network
from tripnet.triplets import Triplet, TripletSet, parse_triplets

CATERPILLAR_TRIPLETS = "3,4|2\n3,4|1\n2,4|1\n2,3|1"

SIX_TAXA_CONTRACTED = {
    ("1", "3+4", "2"), ("1", "3+4", "5+6"), ("2", "3+4", "1"), ("2", "3+4", "5+6"),
    ("2", "5+6", "1"), ("2", "5+6", "3+4"), ("3+4", "5+6", "1"), ("3+4", "5+6", "2"),
}


def graph(ts):
    h, _ = height_function(ts)
    return WeightedLeafGraph.from_heights(h)


def blocks(p):
    return [set(b) for b in p.blocks]


def test_is_sn_set_examples(six_taxa):
    assert is_sn_set({"3", "4"}, six_taxa)
    assert not is_sn_set({"2", "3"}, six_taxa)
    assert is_sn_set(set(six_taxa.universe), six_taxa)
    assert all(is_sn_set({x}, six_taxa) for x in six_taxa.universe)


def test_is_sn_set_subset_check(six_taxa):
    with pytest.raises(ValueError):
        is_sn_set({"9"}, six_taxa)


def test_caterpillar_split_rounds():
    g = graph(parse_triplets(CATERPILLAR_TRIPLETS))
    assert split_components(g) == [frozenset({"1"}), frozenset({"2", "3", "4"})]
    sub = g.subgraph({"2", "3", "4"})
    assert split_components(sub) == [frozenset({"2"}), frozenset({"3", "4"})]


def test_split_two_vertices():
    g = WeightedLeafGraph(["a", "b"], {("a", "b"): 4})
    assert split_components(g) == [frozenset({"a"}), frozenset({"b"})]
    with pytest.raises(ValueError):
        split_components(g)


def test_split_single_vertex():
    with pytest.raises(ValueError):
        split_components(WeightedLeafGraph(["a"], {}))


def test_six_taxa_blocks(six_taxa):
    p = sn_decompose(graph(six_taxa), six_taxa)
    assert blocks(p) == [{"1"}, {"2"}, {"3", "4"}, {"5", "6"}]


def test_tree_blocks():
    ts = parse_triplets("1,2|3")
    assert blocks(sn_decompose(graph(ts), ts)) == [{"1", "2"}, {"3"}]


def test_empty_triplets_all_singletons():
    ts = TripletSet.from_triplets([], ["1", "2", "3", "4"])
    assert blocks(sn_decompose(graph(ts), ts)) == [{"1"}, {"2"}, {"3"}, {"4"}]


def test_six_taxa_contracted(six_taxa):
    p = sn_decompose(graph(six_taxa), six_taxa)
    got = induced_triplets(six_taxa, p)
    assert got.triplets == {Triplet.make(*t) for t in SIX_TAXA_CONTRACTED}
    assert len(got) == 8


def test_six_taxa_block_stats(six_taxa):
    p = sn_decompose(graph(six_taxa), six_taxa)
    stats = dict(zip(p.names(), p.stats))
    assert (stats["3+4"].mc, stats["3+4"].Mc) == (stats["5+6"].mc, stats["5+6"].Mc)
    assert all(s.mc <= s.Mc for s in p.stats)


def test_identity_partition(six_taxa):
    p = sn_decompose(graph(TripletSet.from_triplets([], six_taxa.universe)),
                     TripletSet.from_triplets([], six_taxa.universe))
    assert induced_triplets(six_taxa, p) == six_taxa


def test_partition_must_cover(six_taxa):
    ts = parse_triplets("1,2|3")
    p = sn_decompose(graph(ts), ts)
    with pytest.raises(ValueError):
        induced_triplets(six_taxa, p)


def test_restrict(six_taxa):
    sub = restrict_triplets(six_taxa, {"3", "4"})
    assert len(sub) == 0 and sub.universe == ("3", "4")
    ts = parse_triplets("1,2|3\n4,5|6")
    assert len(restrict_triplets(ts, {"1", "2", "3"})) == 1


def test_block_name():
    assert block_name({"10", "2", "b"}) == "2+10+b"


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10**6))
def test_tree_top_split_is_root_clades(n, seed):
    net = random_network(n, 0, seed)
    ts = all_consistent_triplets(net)
    g = graph(ts)
    top = split_components(g)
    root = net.root
    clades = sorted(
        frozenset(net.labels[v] for v in range(net.n_nodes)
                  if v in net.labels and net.descendants[c] >> v & 1)
        for c in net.children[root])
    assert sorted(top) == clades


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(0, 3), st.integers(0, 10**6))
def test_decomposition_properties(n, k, seed):
    ts = all_consistent_triplets(random_network(n, k, seed))
    p = sn_decompose(graph(ts), ts)
    covered = [x for b in p.blocks for x in b]
    assert sorted(covered) == sorted(ts.universe)
    assert all(is_sn_set(b, ts) for b in p.blocks)
    for t in induced_triplets(ts, p).triplets:
        assert len(set(t.leaves)) == 3
