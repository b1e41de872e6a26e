"""Triplet consistency: does a network contain a subdivision of ``ij|k``?

A subdivision exists iff there are nodes ``u != v`` and directed paths
``u->v``, ``u->k``, ``v->i``, ``v->j`` that share no vertices except the
endpoints ``u`` and ``v``. On a DAG this is a disjoint-paths question with a
fixed number of paths, decided here by a pebbling search: pebbles walk the
paths, and the pebble sitting lowest in topological order is always the one
to move, which makes vertex-disjointness a purely local check.
"""

from __future__ import annotations

from itertools import combinations

from .network import Network, check_network
from .triplets import Triplet, TripletSet


class UnknownLeafError(KeyError):
    pass


def _leaf_ids(net: Network, t: Triplet) -> tuple[int, int, int]:
    try:
        return net.leaf_of[t.a], net.leaf_of[t.b], net.leaf_of[t.c]
    except KeyError as exc:
        raise UnknownLeafError(f"leaf {exc.args[0]!r} is not in the network") from None


def _displays(net: Network, i: int, j: int, k: int) -> bool:
    pos = {v: r for r, v in enumerate(net.topological_order)}
    desc = net.descendants
    kids = net.children
    bi, bj, bk = 1 << i, 1 << j, 1 << k
    reach_ij = bi | bj

    def ok_a(x):
        return desc[x] & reach_ij == reach_ij

    def ok_k(x):
        return desc[x] & bk

    # phase 1 state: (a, kp) with pebble A heading for the i/j split point
    # phase 2 state: (a1, a2, kp) with A1 -> i, A2 -> j
    stack: list[tuple] = []
    seen: set[tuple] = set()
    for u in range(net.n_nodes):
        if len(kids[u]) >= 2 and ok_a(u) and ok_k(u):
            # both pebbles start on u; A moves first
            for y in kids[u]:
                if ok_a(y):
                    s = (y, u)
                    if s not in seen:
                        seen.add(s)
                        stack.append(s)
    while stack:
        s = stack.pop()
        if len(s) == 2:
            a, kp = s
            if kp != k and pos[kp] < pos[a]:
                for y in kids[kp]:
                    if y != a and ok_k(y):
                        n = (a, y)
                        if n not in seen:
                            seen.add(n)
                            stack.append(n)
                continue
            # A is the lowest pebble (or K is done): move A or split it at a
            n = (a, a, kp)
            if n not in seen:
                seen.add(n)
                stack.append(n)
            for y in kids[a]:
                if y != kp and ok_a(y):
                    n = (y, kp)
                    if n not in seen:
                        seen.add(n)
                        stack.append(n)
            continue
        a1, a2, kp = s
        if a1 == i and a2 == j and kp == k:
            return True
        live = []
        if a1 != i:
            live.append((pos[a1], 0))
        if a2 != j:
            live.append((pos[a2], 1))
        if kp != k:
            live.append((pos[kp], 2))
        _, which = min(live)
        cur = s[which]
        target = (bi, bj, bk)[which]
        for y in kids[cur]:
            if not desc[y] & target:
                continue
            if (which != 0 and y == a1) or (which != 1 and y == a2) or (which != 2 and y == kp):
                continue
            n = list(s)
            n[which] = y
            n = tuple(n)
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return False


def is_consistent(net: Network, t: Triplet) -> bool:
    """True iff ``net`` contains a subdivision of the triplet ``t``."""
    i, j, k = _leaf_ids(net, t)
    return _displays(net, i, j, k)


def inconsistent_triplets(net: Network, ts: TripletSet) -> list[Triplet]:
    """Input triplets not displayed by ``net``, in canonical order."""
    return [t for t in ts.sorted() if not is_consistent(net, t)]


def all_consistent_triplets(net: Network) -> TripletSet:
    """Every triplet (over the network's leaves) displayed by ``net``."""
    check_network(net)
    labels = net.leaf_labels
    if len(labels) < 3:
        raise ValueError("need at least three leaves")
    found = []
    for x, y, z in combinations(labels, 3):
        for t in (Triplet.make(x, y, z), Triplet.make(x, z, y), Triplet.make(y, z, x)):
            if is_consistent(net, t):
                found.append(t)
    return TripletSet.from_triplets(found, labels)
