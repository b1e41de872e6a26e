"""Weighted leaf graph, max-weight edge removal, SN-set decomposition and
triplet contraction."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .heights import HeightFunction, make_pair
from .triplets import Triplet, TripletSet, label_key

Block = frozenset


def block_key(block: Iterable[str]) -> tuple:
    return tuple(sorted(label_key(x) for x in block))


def block_name(block: Iterable[str]) -> str:
    """Label used for a contracted block: its leaves joined by '+'."""
    return "+".join(sorted(block, key=label_key))


class WeightedLeafGraph:
    """Complete weighted graph on leaves; edges are only ever deleted."""

    def __init__(self, vertices: Iterable[str], weight: dict[tuple[str, str], int]):
        self.vertices = tuple(sorted(vertices, key=label_key))
        self.weight = weight
        self.edges = {make_pair(x, y) for x, y in combinations(self.vertices, 2)}

    @classmethod
    def from_heights(cls, h: HeightFunction) -> "WeightedLeafGraph":
        return cls(h.universe, dict(h.h))

    def subgraph(self, vertices: Iterable[str]) -> "WeightedLeafGraph":
        keep = set(vertices)
        g = WeightedLeafGraph.__new__(WeightedLeafGraph)
        g.vertices = tuple(v for v in self.vertices if v in keep)
        g.weight = self.weight
        g.edges = {e for e in self.edges if e[0] in keep and e[1] in keep}
        return g

    def components(self) -> list[frozenset[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for x, y in self.edges:
            adj[x].append(y)
            adj[y].append(x)
        seen: set[str] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            seen.add(v)
            while stack:
                for y in adj[stack.pop()]:
                    if y not in seen:
                        seen.add(y)
                        comp.add(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        return sorted(comps, key=block_key)


def split_components(g: WeightedLeafGraph) -> list[frozenset[str]]:
    """Delete all current max-weight edges until ``g`` disconnects (mutates ``g``)."""
    if len(g.vertices) < 2:
        raise ValueError("cannot split a single vertex")
    comps = g.components()
    if len(comps) > 1:
        raise ValueError("graph is already disconnected")
    while len(comps) == 1:
        top = max(g.weight[e] for e in g.edges)
        g.edges = {e for e in g.edges if g.weight[e] != top}
        comps = g.components()
    return comps


def is_sn_set(s: Iterable[str], ts: TripletSet) -> bool:
    """True iff no triplet ``xy|z`` has one of x, y outside ``s`` and the other plus z inside."""
    s = set(s)
    unknown = s.difference(ts.universe)
    if unknown:
        raise ValueError(f"leaves not in universe: {sorted(unknown, key=label_key)}")
    for t in ts.triplets:
        if t.c in s and ((t.a in s) != (t.b in s)):
            return False
    return True


@dataclass(frozen=True)
class BlockStats:
    mc: int | None
    Mc: int | None


@dataclass(frozen=True)
class SNPartition:
    blocks: tuple[frozenset[str], ...]
    stats: tuple[BlockStats, ...]

    def block_of(self) -> dict[str, int]:
        return {x: b for b, block in enumerate(self.blocks) for x in block}

    def names(self) -> list[str]:
        return [block_name(b) for b in self.blocks]


def _block_stats(blocks, weight) -> tuple[BlockStats, ...]:
    out = []
    for b in blocks:
        ws = [w for (x, y), w in weight.items() if (x in b) != (y in b)]
        out.append(BlockStats(min(ws, default=None), max(ws, default=None)))
    return tuple(out)


def sn_decompose(g: WeightedLeafGraph, ts: TripletSet) -> SNPartition:
    """Split the leaf graph, then keep splitting components that are not SN-sets.

    ``mc``/``Mc`` of a block are the min/max weights of the complete graph's
    edges with exactly one end in the block. ``g`` is left as reduced.
    """
    if len(g.vertices) < 2:
        blocks = (frozenset(g.vertices),)
        return SNPartition(blocks, (BlockStats(None, None),))
    final = []
    pending = [(g, split_components(g))]
    while pending:
        graph, comps = pending.pop()
        for comp in comps:
            if len(comp) == 1 or is_sn_set(comp, ts):
                final.append(comp)
            else:
                sub = graph.subgraph(comp)
                pending.append((sub, split_components(sub)))
    blocks = tuple(sorted(final, key=block_key))
    assert all(is_sn_set(b, ts) for b in blocks)
    return SNPartition(blocks, _block_stats(blocks, g.weight))


def induced_triplets(ts: TripletSet, p: SNPartition) -> TripletSet:
    """Contract each block to one leaf (named by :func:`block_name`)."""
    where = p.block_of()
    missing = set(ts.universe).difference(where)
    if missing:
        raise ValueError(f"partition does not cover {sorted(missing, key=label_key)}")
    names = p.names()
    out = set()
    for t in ts.triplets:
        ba, bb, bc = where[t.a], where[t.b], where[t.c]
        if len({ba, bb, bc}) == 3:
            out.add(Triplet.make(names[ba], names[bb], names[bc]))
    return TripletSet.from_triplets(out, names)


def restrict_triplets(ts: TripletSet, s: Iterable[str]) -> TripletSet:
    return ts.restrict(s)
