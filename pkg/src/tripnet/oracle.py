"""Brute-force ground truth for small instances.

Nothing here shares code with the production consistency check: paths are
enumerated explicitly, and minimum reticulation numbers come from exhaustive
network enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .network import Network, NetworkBuilder, to_json, validate_network
from .triplets import Triplet, TripletSet, label_key


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_leaves: int = 5
    max_reticulations: int = 2
    max_nodes: int = 16


def _all_paths(children, src: int, dst: int) -> list[frozenset[int]]:
    out = []
    path = [src]

    def walk(v):
        if v == dst:
            out.append(frozenset(path))
            return
        for c in children[v]:
            path.append(c)
            walk(c)
            path.pop()

    walk(src)
    return out


def consistency_bruteforce(net: Network, t: Triplet, max_nodes: int = 16) -> bool:
    """Search all (u, v) and all path quadruples for a subdivision of ``t``."""
    if net.n_nodes > max_nodes:
        raise BudgetExceeded(f"network has {net.n_nodes} nodes (cap {max_nodes})")
    children = [[] for _ in range(net.n_nodes)]
    for p, c in net.edges:
        children[p].append(c)
    leaf = {lab: v for v, lab in net.labels.items()}
    i, j, k = leaf[t.a], leaf[t.b], leaf[t.c]
    for v in range(net.n_nodes):
        to_i = _all_paths(children, v, i)
        to_j = _all_paths(children, v, j)
        forks = [(pi | pj) for pi in to_i for pj in to_j if pi & pj == {v}]
        if not forks:
            continue
        for u in range(net.n_nodes):
            if u == v:
                continue
            to_v = _all_paths(children, u, v)
            if not to_v:
                continue
            to_k = _all_paths(children, u, k)
            for q in to_v:
                for pk in to_k:
                    if q & pk != {u}:
                        continue
                    for f in forks:
                        if not (f & pk) and f & q == {v}:
                            return True
    return False


# ----------------------------------------------------------------------------
# enumeration


def _trees(leaves: tuple[str, ...]) -> list[Network]:
    """All rooted binary trees, by inserting leaves one at a time on every edge."""
    b = NetworkBuilder()
    if len(leaves) == 1:
        b.add_node(leaves[0])
        return [b.to_network()]
    r = b.add_node()
    b.add_edge(r, b.add_node(leaves[0]))
    b.add_edge(r, b.add_node(leaves[1]))
    current = [b.to_network()]
    for lab in leaves[2:]:
        nxt = []
        for net in current:
            for e in [None, *net.edges]:
                nb = NetworkBuilder.from_network(net)
                if e is None:
                    top = nb.roots()[0]
                    s = nb.add_node()
                    nb.add_edge(s, top)
                else:
                    s = nb.subdivide(*e)
                nb.add_edge(s, nb.add_node(lab))
                nxt.append(nb.to_network())
        current = nxt
    return current


def _cut(b: NetworkBuilder, arc) -> int:
    if arc is None:
        top = b.roots()[0]
        s = b.add_node()
        b.add_edge(s, top)
        return s
    return b.subdivide(*arc)


def _add_reticulation(net: Network) -> list[Network]:
    """Every way of joining two subdivided arcs (or the root arc) by a new arc."""
    arcs = [None, *net.edges]
    out = []
    for e1 in arcs:
        for e2 in arcs:
            if e1 == e2:
                continue
            b = NetworkBuilder.from_network(net)
            s1 = _cut(b, e1)
            s2 = _cut(b, e2)
            b.add_edge(s1, s2)
            try:
                cand = b.to_network()
            except ValueError:
                continue  # directed cycle
            if not validate_network(cand):
                out.append(cand)
    return out


@lru_cache(maxsize=8)
def enumerate_networks(leaves: tuple[str, ...], max_reticulations: int) -> tuple[tuple[Network, ...], ...]:
    """Networks grouped by reticulation count 0..max, deduplicated by canonical JSON."""
    levels = []
    seen: set[str] = set()
    current = []
    for t in _trees(leaves):
        key = to_json(t)
        if key not in seen:
            seen.add(key)
            current.append(t)
    levels.append(tuple(current))
    for _ in range(max_reticulations):
        nxt = []
        for net in current:
            for cand in _add_reticulation(net):
                key = to_json(cand)
                if key not in seen:
                    seen.add(key)
                    nxt.append(cand)
        levels.append(tuple(nxt))
        current = nxt
    return tuple(levels)


@lru_cache(maxsize=8)
def _displayed_sets(leaves: tuple[str, ...], max_reticulations: int, max_nodes: int):
    triples = list(combinations(leaves, 3))
    out = []
    for level in enumerate_networks(leaves, max_reticulations):
        sets = []
        for net in level:
            shown = set()
            for x, y, z in triples:
                for t in (Triplet.make(x, y, z), Triplet.make(x, z, y), Triplet.make(y, z, x)):
                    if consistency_bruteforce(net, t, max_nodes):
                        shown.add(t)
            sets.append(frozenset(shown))
        out.append(sets)
    return out


def min_reticulations_oracle(ts: TripletSet, budget: OracleBudget = OracleBudget()) -> int:
    """Least R(N) over networks displaying every triplet of ``ts``.

    Raises :class:`BudgetExceeded` when the universe is too large or no
    network with at most ``budget.max_reticulations`` reticulations works.
    """
    leaves = tuple(sorted(ts.universe, key=label_key))
    if len(leaves) > budget.max_leaves:
        raise BudgetExceeded(f"{len(leaves)} leaves exceeds budget of {budget.max_leaves}")
    if len(leaves) < 3:
        return 0
    want = ts.triplets
    for r, sets in enumerate(_displayed_sets(leaves, budget.max_reticulations, budget.max_nodes)):
        if any(want <= s for s in sets):
            return r
    raise BudgetExceeded(f"no network with at most {budget.max_reticulations} reticulations found")
