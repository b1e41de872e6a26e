"""Rooted phylogenetic networks: the immutable value type, a mutable
builder, validation, statistics and text serialization."""

from __future__ import annotations

import enum
import hashlib
import heapq
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx

from .triplets import label_key


class NodeKind(str, enum.Enum):
    ROOT = "root"
    TREE = "tree"
    RETICULATION = "reticulation"
    LEAF = "leaf"


class InvalidNetworkError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid network: " + "; ".join(violations))


@dataclass(frozen=True)
class Network:
    """Rooted DAG with typed nodes. Node ids are ``0..len(kinds)-1``.

    Instances are treated as immutable; use :class:`NetworkBuilder` to edit.
    Construction does not validate; call :func:`validate_network`.
    """

    kinds: tuple[NodeKind, ...]
    edges: tuple[tuple[int, int], ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], labels: Mapping[int, str],
                   n_nodes: int | None = None) -> "Network":
        """Build a network inferring node kinds from degrees."""
        edges = tuple((int(p), int(c)) for p, c in edges)
        if n_nodes is None:
            ids = {x for e in edges for x in e} | set(labels)
            n_nodes = max(ids) + 1 if ids else 0
        indeg = [0] * n_nodes
        outdeg = [0] * n_nodes
        for p, c in edges:
            outdeg[p] += 1
            indeg[c] += 1
        kinds = []
        for v in range(n_nodes):
            if indeg[v] == 0 and outdeg[v] > 0:
                kinds.append(NodeKind.ROOT)
            elif outdeg[v] == 0:
                kinds.append(NodeKind.LEAF)
            elif indeg[v] >= 2:
                kinds.append(NodeKind.RETICULATION)
            else:
                kinds.append(NodeKind.TREE)
        return cls(tuple(kinds), edges, dict(labels))

    @property
    def n_nodes(self) -> int:
        return len(self.kinds)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.kinds]
        for p, c in self.edges:
            out[p].append(c)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def parents(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.kinds]
        for p, c in self.edges:
            out[c].append(p)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def leaf_of(self) -> dict[str, int]:
        return {lab: v for v, lab in self.labels.items()}

    @property
    def leaf_labels(self) -> list[str]:
        return sorted(self.labels.values(), key=label_key)

    @property
    def root(self) -> int:
        roots = [v for v in range(self.n_nodes) if not self.parents[v]]
        if len(roots) != 1:
            raise InvalidNetworkError([f"expected one root, found {len(roots)}"])
        return roots[0]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        indeg = [len(p) for p in self.parents]
        stack = [v for v in range(self.n_nodes) if indeg[v] == 0]
        order = []
        while stack:
            v = stack.pop()
            order.append(v)
            for c in self.children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    stack.append(c)
        if len(order) != self.n_nodes:
            raise InvalidNetworkError(["directed cycle"])
        return tuple(order)

    @cached_property
    def descendants(self) -> tuple[int, ...]:
        """Bitmask per node of the nodes reachable from it (itself included)."""
        reach = [0] * self.n_nodes
        for v in reversed(self.topological_order):
            m = 1 << v
            for c in self.children[v]:
                m |= reach[c]
            reach[v] = m
        return tuple(reach)

    @property
    def reticulations(self) -> list[int]:
        return [v for v, k in enumerate(self.kinds) if k is NodeKind.RETICULATION]

    @property
    def reticulation_count(self) -> int:
        return sum(1 for k in self.kinds if k is NodeKind.RETICULATION)

    def is_tree(self) -> bool:
        return self.reticulation_count == 0

    def canonical(self) -> "Network":
        return canonical_network(self)


# ----------------------------------------------------------------------------
# mutable builder


class NetworkBuilder:
    """Mutable adjacency-list DAG used while constructing networks."""

    def __init__(self):
        self.children: dict[int, list[int]] = {}
        self.parents: dict[int, list[int]] = {}
        self.labels: dict[int, str] = {}
        self._next = 0

    @classmethod
    def from_network(cls, net: Network) -> "NetworkBuilder":
        b = cls()
        for v in range(net.n_nodes):
            b.add_node(net.labels.get(v))
        for p, c in net.edges:
            b.add_edge(p, c)
        return b

    def copy(self) -> "NetworkBuilder":
        b = NetworkBuilder()
        b.children = {v: list(cs) for v, cs in self.children.items()}
        b.parents = {v: list(ps) for v, ps in self.parents.items()}
        b.labels = dict(self.labels)
        b._next = self._next
        return b

    def add_node(self, label: str | None = None) -> int:
        v = self._next
        self._next += 1
        self.children[v] = []
        self.parents[v] = []
        if label is not None:
            self.labels[v] = label
        return v

    def add_edge(self, p: int, c: int) -> None:
        self.children[p].append(c)
        self.parents[c].append(p)

    def remove_edge(self, p: int, c: int) -> None:
        self.children[p].remove(c)
        self.parents[c].remove(p)

    def remove_node(self, v: int) -> None:
        for c in list(self.children[v]):
            self.remove_edge(v, c)
        for p in list(self.parents[v]):
            self.remove_edge(p, v)
        del self.children[v], self.parents[v]
        self.labels.pop(v, None)

    def subdivide(self, p: int, c: int) -> int:
        """Insert a new node on the arc ``p -> c`` and return it."""
        s = self.add_node()
        i = self.children[p].index(c)
        self.children[p][i] = s
        j = self.parents[c].index(p)
        self.parents[c][j] = s
        self.parents[s].append(p)
        self.children[s].append(c)
        return s

    def subdivide_above(self, v: int) -> int:
        """Subdivide the first in-arc of ``v``; a parentless ``v`` gets a new root."""
        if self.parents[v]:
            return self.subdivide(self.parents[v][0], v)
        s = self.add_node()
        self.add_edge(s, v)
        return s

    def roots(self) -> list[int]:
        return [v for v in self.children if not self.parents[v]]

    def leaf_node(self, label: str) -> int:
        for v, lab in self.labels.items():
            if lab == label:
                return v
        raise KeyError(label)

    def suppress(self) -> None:
        """Contract in/out-degree-1 chains, drop unlabeled sinks and an outdegree-1 root.

        A contraction that would create a parallel arc removes the redundant
        path instead, which can cascade into further contractions.
        """
        changed = True
        while changed:
            changed = False
            for v in sorted(self.children):
                if v not in self.children:
                    continue
                ins, outs = self.parents[v], self.children[v]
                if not outs and v not in self.labels:
                    self.remove_node(v)
                    changed = True
                elif not ins and len(outs) == 1 and v not in self.labels:
                    self.remove_node(v)
                    changed = True
                elif len(ins) == 1 and len(outs) == 1:
                    p, c = ins[0], outs[0]
                    self.remove_node(v)
                    if c not in self.children[p]:
                        self.add_edge(p, c)
                    changed = True
                elif len(ins) == 2 and ins[0] == ins[1]:
                    p = ins[0]
                    self.remove_edge(p, v)
                    changed = True

    def to_network(self) -> Network:
        order = sorted(self.children)
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[p], index[c]) for p in order for c in self.children[p]]
        labels = {index[v]: lab for v, lab in self.labels.items()}
        return canonical_network(Network.from_edges(edges, labels, len(order)))


# ----------------------------------------------------------------------------
# validation and statistics


def validate_network(net: Network) -> list[str]:
    """Return one message per violated network invariant (empty if valid)."""
    out: list[str] = []
    n = net.n_nodes
    if n == 0:
        return ["empty network"]
    for p, c in net.edges:
        if not (0 <= p < n and 0 <= c < n):
            out.append(f"edge ({p},{c}) references an unknown node")
    if out:
        return out
    if n == 1 and not net.edges:
        if net.kinds[0] is NodeKind.LEAF and 0 in net.labels:
            return []
    seen = set()
    for e in net.edges:
        if e in seen:
            out.append(f"parallel arc {e[0]}->{e[1]}")
        seen.add(e)
        if e[0] == e[1]:
            out.append(f"self loop at node {e[0]}")
    try:
        net.topological_order
    except InvalidNetworkError:
        out.append("graph contains a directed cycle")
    roots = [v for v in range(n) if not net.parents[v]]
    if len(roots) != 1:
        out.append(f"expected exactly one node of indegree 0, found {len(roots)}: {roots}")
    expected = {
        NodeKind.ROOT: (0, 2),
        NodeKind.TREE: (1, 2),
        NodeKind.RETICULATION: (2, 1),
        NodeKind.LEAF: (1, 0),
    }
    for v, kind in enumerate(net.kinds):
        deg = (len(net.parents[v]), len(net.children[v]))
        if deg != expected[kind]:
            out.append(f"node {v} of kind {kind.value} has (indegree, outdegree) = {deg}, "
                       f"expected {expected[kind]}")
        if kind is NodeKind.LEAF and v not in net.labels:
            out.append(f"leaf node {v} has no label")
        if kind is not NodeKind.LEAF and v in net.labels:
            out.append(f"non-leaf node {v} carries label {net.labels[v]!r}")
    labs = list(net.labels.values())
    if len(set(labs)) != len(labs):
        out.append("duplicate leaf labels")
    return out


def check_network(net: Network) -> None:
    violations = validate_network(net)
    if violations:
        raise InvalidNetworkError(violations)


@dataclass(frozen=True)
class NetworkStats:
    reticulation_count: int
    level: int
    per_block: tuple[tuple[int, int], ...]


def network_stats(net: Network) -> NetworkStats:
    """Reticulation count R(N), level L(N) and per-biconnected-block counts."""
    check_network(net)
    g = nx.Graph()
    g.add_nodes_from(range(net.n_nodes))
    g.add_edges_from(net.edges)
    blocks = sorted(
        (sorted(tuple(sorted(e)) for e in comp) for comp in nx.biconnected_component_edges(g)),
    )
    edge_block = {}
    for bid, comp in enumerate(blocks):
        for e in comp:
            edge_block[e] = bid
    counts = [0] * len(blocks)
    for r in net.reticulations:
        p = net.parents[r][0]
        counts[edge_block[tuple(sorted((p, r)))]] += 1
    per_block = tuple(enumerate(counts))
    return NetworkStats(
        reticulation_count=net.reticulation_count,
        level=max(counts, default=0),
        per_block=per_block,
    )


# ----------------------------------------------------------------------------
# canonical numbering and serialization


def _digest(*parts: str) -> str:
    return hashlib.sha256("|".join(parts).encode()).hexdigest()


def canonical_network(net: Network) -> Network:
    """Renumber nodes in topological order, ties broken by the sorted labels
    of the leaves below, then by structural hashes of the part below and the
    part above each node, and only then by current id."""
    order = net.topological_order
    cluster: dict[int, tuple] = {}
    down: dict[int, str] = {}
    for v in reversed(order):
        if v in net.labels:
            cluster[v] = (label_key(net.labels[v]),)
        else:
            below = set()
            for c in net.children[v]:
                below.update(cluster[c])
            cluster[v] = tuple(sorted(below))
        down[v] = _digest(net.kinds[v].value, net.labels.get(v, ""),
                          *sorted(down[c] for c in net.children[v]))
    up: dict[int, str] = {}
    for v in order:
        up[v] = _digest(down[v], *sorted(up[p] for p in net.parents[v]))
    key = {v: (cluster[v], down[v], up[v], v) for v in range(net.n_nodes)}
    indeg = [len(p) for p in net.parents]
    heap = [key[v] for v in range(net.n_nodes) if indeg[v] == 0]
    heapq.heapify(heap)
    new_id = {}
    while heap:
        v = heapq.heappop(heap)[-1]
        new_id[v] = len(new_id)
        for c in net.children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, key[c])
    kinds = [None] * net.n_nodes
    for v, i in new_id.items():
        kinds[i] = net.kinds[v]
    edges = tuple(sorted((new_id[p], new_id[c]) for p, c in net.edges))
    labels = {new_id[v]: lab for v, lab in sorted(net.labels.items())}
    return Network(tuple(kinds), edges, labels)


def to_enewick(net: Network) -> str:
    net = canonical_network(net)
    check_network(net)
    tags = {r: f"#H{i}" for i, r in enumerate(net.reticulations, start=1)}
    visited: set[int] = set()

    def emit(v: int) -> str:
        if v in net.labels:
            return net.labels[v]
        if v in tags:
            if v in visited:
                return tags[v]
            visited.add(v)
            return "(" + emit(net.children[v][0]) + ")" + tags[v]
        return "(" + ",".join(emit(c) for c in net.children[v]) + ")"

    return emit(net.root) + ";"


def to_dot(net: Network) -> str:
    net = canonical_network(net)
    check_network(net)
    lines = ["digraph network {"]
    for v, kind in enumerate(net.kinds):
        if kind is NodeKind.LEAF:
            lines.append(f'  n{v} [label="{net.labels[v]}", shape=box];')
        elif kind is NodeKind.RETICULATION:
            lines.append(f'  n{v} [label="", shape=diamond];')
        else:
            lines.append(f'  n{v} [label="", shape=point];')
    for p, c in net.edges:
        lines.append(f"  n{p} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(net: Network) -> str:
    net = canonical_network(net)
    check_network(net)
    nodes = []
    for v, kind in enumerate(net.kinds):
        doc = {"id": v, "kind": kind.value}
        if v in net.labels:
            doc["label"] = net.labels[v]
        nodes.append(doc)
    node_lines = ",\n".join("    " + json.dumps(nd, sort_keys=True) for nd in nodes)
    edge_text = json.dumps([list(e) for e in net.edges])
    return '{\n  "nodes": [\n' + node_lines + '\n  ],\n  "edges": ' + edge_text + "\n}\n"


def from_json(text: str) -> Network:
    """Parse the JSON node/edge document (ids need not be canonical)."""
    try:
        doc = json.loads(text)
        ids = [int(nd["id"]) for nd in doc["nodes"]]
        index = {nid: i for i, nid in enumerate(sorted(ids))}
        kinds = [None] * len(ids)
        labels = {}
        for nd in doc["nodes"]:
            i = index[int(nd["id"])]
            kinds[i] = NodeKind(nd["kind"])
            if "label" in nd:
                labels[i] = str(nd["label"])
        edges = tuple((index[int(p)], index[int(c)]) for p, c in doc["edges"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed network JSON: {exc}") from None
    if len(index) != len(ids):
        raise ValueError("malformed network JSON: duplicate node ids")
    return Network(tuple(kinds), edges, labels)


FORMATS = {"dot": to_dot, "enewick": to_enewick, "json": to_json}


def serialize_network(net: Network, fmt: str = "json") -> str:
    try:
        writer = FORMATS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}; choose from {sorted(FORMATS)}") from None
    return writer(net)


def network_from_nested(tree, builder: NetworkBuilder | None = None) -> Network:
    """Network from nested tuples of leaf labels, e.g. ``(("1", "2"), "3")``."""
    b = builder or NetworkBuilder()

    def emit(node) -> int:
        if isinstance(node, (tuple, list)):
            v = b.add_node()
            for child in node:
                b.add_edge(v, emit(child))
            return v
        return b.add_node(str(node))

    emit(tree)
    return b.to_network()
