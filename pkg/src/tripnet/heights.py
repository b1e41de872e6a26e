"""Height functions from triplets: the pair digraph, its repair to a DAG, and
longest-path layering."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .network import Network, check_network
from .triplets import Triplet, TripletSet, label_key

Pair = tuple[str, str]


def make_pair(x: str, y: str) -> Pair:
    return (x, y) if label_key(x) <= label_key(y) else (y, x)


def pair_key(p: Pair) -> tuple:
    return (label_key(p[0]), label_key(p[1]))


@dataclass
class PairDigraph:
    """Digraph on unordered leaf pairs; ``ij|k`` gives arcs ``ij -> ik`` and ``ij -> jk``.

    ``arcs`` maps each surviving arc to the triplets that produced it;
    ``removed`` lists arcs dropped by :func:`break_cycles`, with their triplets.
    """

    universe: tuple[str, ...]
    nodes: tuple[Pair, ...]
    arcs: dict[tuple[Pair, Pair], tuple[Triplet, ...]]
    removed: list[tuple[tuple[Pair, Pair], tuple[Triplet, ...]]] = field(default_factory=list)

    def successors(self) -> dict[Pair, list[Pair]]:
        succ: dict[Pair, list[Pair]] = {p: [] for p in self.nodes}
        for s, t in self.arcs:
            succ[s].append(t)
        for s in succ:
            succ[s].sort(key=pair_key)
        return succ

    def is_acyclic(self) -> bool:
        try:
            _rounds(self)
        except ValueError:
            return False
        return True

    def removed_triplets(self) -> list[Triplet]:
        seen = {t for _, trips in self.removed for t in trips}
        return sorted(seen, key=Triplet.sort_key)

    def to_dot(self) -> str:
        name = {p: f"{p[0]}_{p[1]}" for p in self.nodes}
        lines = ["digraph pairs {"]
        for p in self.nodes:
            lines.append(f'  "{name[p]}";')
        for (s, t) in sorted(self.arcs, key=lambda a: (pair_key(a[0]), pair_key(a[1]))):
            lines.append(f'  "{name[s]}" -> "{name[t]}";')
        for (s, t), _ in self.removed:
            lines.append(f'  "{name[s]}" -> "{name[t]}" [style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HeightFunction:
    """Positive integer weight per unordered leaf pair."""

    universe: tuple[str, ...]
    h: dict[Pair, int]

    def __call__(self, x: str, y: str) -> int:
        return self.h[make_pair(x, y)]

    def max(self) -> int:
        return max(self.h.values(), default=0)


def build_pair_digraph(ts: TripletSet) -> PairDigraph:
    if len(ts.universe) < 3:
        raise ValueError("pair digraph needs at least three leaves")
    nodes = tuple(make_pair(x, y) for x, y in combinations(ts.universe, 2))
    arcs: dict[tuple[Pair, Pair], list[Triplet]] = {}
    for t in ts.sorted():
        src = make_pair(t.a, t.b)
        for dst in (make_pair(t.a, t.c), make_pair(t.b, t.c)):
            arcs.setdefault((src, dst), []).append(t)
    return PairDigraph(ts.universe, nodes, {a: tuple(v) for a, v in arcs.items()})


def break_cycles(g: PairDigraph) -> PairDigraph:
    """Drop every DFS back arc (pairs and successors visited in canonical order).

    Returns a new digraph; removed arcs are appended to ``removed``.
    """
    succ = g.successors()
    color = {p: 0 for p in g.nodes}
    back: list[tuple[Pair, Pair]] = []
    for start in sorted(g.nodes, key=pair_key):
        if color[start]:
            continue
        color[start] = 1
        stack = [(start, iter(succ[start]))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color[nxt] == 1:
                back.append((node, nxt))
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succ[nxt])))
    arcs = dict(g.arcs)
    removed = list(g.removed)
    for a in back:
        removed.append((a, arcs.pop(a)))
    return PairDigraph(g.universe, g.nodes, arcs, removed)


def _rounds(g: PairDigraph) -> dict[Pair, int]:
    """Peeling round per pair: 0 for sinks, else 1 + max over successors."""
    succ = g.successors()
    outdeg = {p: len(s) for p, s in succ.items()}
    pred: dict[Pair, list[Pair]] = {p: [] for p in g.nodes}
    for s, t in g.arcs:
        pred[t].append(s)
    rounds = {}
    frontier = [p for p in g.nodes if outdeg[p] == 0]
    r = 0
    while frontier:
        nxt = []
        for p in frontier:
            rounds[p] = r
            for q in pred[p]:
                outdeg[q] -= 1
                if outdeg[q] == 0:
                    nxt.append(q)
        frontier = nxt
        r += 1
    if len(rounds) != len(g.nodes):
        raise ValueError("pair digraph has a directed cycle")
    return rounds


def layer_heights(g: PairDigraph) -> HeightFunction:
    """Sinks get the longest-path node count ``l_m``; each peeled layer one less."""
    rounds = _rounds(g)
    l_m = 1 + max(rounds.values(), default=0)
    return HeightFunction(g.universe, {p: l_m - r for p, r in rounds.items()})


def height_function(ts: TripletSet) -> tuple[HeightFunction, PairDigraph]:
    """Pair digraph, cycle repair and layering in one go."""
    g = break_cycles(build_pair_digraph(ts))
    return layer_heights(g), g


def max_height_bound(n_leaves: int) -> int:
    return comb(n_leaves, 2)


def heights_from_network(net: Network) -> HeightFunction:
    """h(i, j) = least height among common ancestors of leaves i and j, where a
    node's height is its longest path (in arcs) down to a leaf."""
    check_network(net)
    height = [0] * net.n_nodes
    for v in reversed(net.topological_order):
        if net.children[v]:
            height[v] = 1 + max(height[c] for c in net.children[v])
    desc = net.descendants
    labels = net.leaf_labels
    h = {}
    for x, y in combinations(labels, 2):
        m = (1 << net.leaf_of[x]) | (1 << net.leaf_of[y])
        h[make_pair(x, y)] = min(height[v] for v in range(net.n_nodes) if desc[v] & m == m)
    return HeightFunction(tuple(labels), h)
