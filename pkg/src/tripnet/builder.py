"""Network construction from triplets: the tree fast path (Aho's BUILD),
reticulation selection, skeleton assembly, recursion into SN-sets and the
final consistency repair."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Literal

from .consistency import is_consistent
from .decomposition import (
    SNPartition,
    WeightedLeafGraph,
    block_key,
    induced_triplets,
    sn_decompose,
)
from .heights import height_function
from .network import Network, NetworkBuilder, network_stats, to_json, validate_network
from .triplets import Triplet, TripletSet, label_key

log = logging.getLogger(__name__)

Mode = Literal["fast", "normal", "slow"]


class BuildError(RuntimeError):
    pass


class RepairError(BuildError):
    def __init__(self, message: str, triplets: list[Triplet]):
        self.triplets = triplets
        super().__init__(message + ": " + ", ".join(map(str, triplets)))


@dataclass(frozen=True)
class BuildConfig:
    mode: Mode = "normal"
    branch_width: int = 3
    max_repair_rounds: int | None = None  # None means |triplets|
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("fast", "normal", "slow"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.branch_width < 1:
            raise ValueError("branch_width must be positive")

    def width(self, n_candidates: int) -> int:
        if self.mode == "fast":
            return min(1, n_candidates)
        if self.mode == "slow":
            return n_candidates
        return min(self.branch_width, n_candidates)


@dataclass(frozen=True, order=True)
class CandidateScore:
    mc: int
    Mc: int
    size: int
    label_key: tuple
    block: int

    @property
    def criteria(self) -> tuple[int, int, int]:
        return (self.mc, self.Mc, self.size)


# ----------------------------------------------------------------------------
# TripTree


def _comb(children: list):
    acc = children[0]
    for c in children[1:]:
        acc = (acc, c)
    return acc


def _first_key(node) -> tuple:
    if isinstance(node, tuple):
        return min(_first_key(c) for c in node)
    return label_key(node)


def aho_tree(ts: TripletSet):
    """Aho et al.'s BUILD as nested binary tuples of labels, or ``None``."""
    leaves = list(ts.universe)
    if len(leaves) == 1:
        return leaves[0]
    parent = {x: x for x in leaves}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in ts.triplets:
        ra, rb = find(t.a), find(t.b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for x in leaves:
        groups.setdefault(find(x), []).append(x)
    if len(groups) == 1:
        return None
    parts = []
    for members in groups.values():
        sub = aho_tree(ts.restrict(members))
        if sub is None:
            return None
        parts.append(sub)
    parts.sort(key=_first_key)
    return _comb(parts)


def _emit(node, b: NetworkBuilder, leaf_nodes: dict[str, int] | None = None) -> int:
    if isinstance(node, tuple):
        v = b.add_node()
        for c in node:
            b.add_edge(v, _emit(c, b, leaf_nodes))
        return v
    if leaf_nodes is not None:
        return leaf_nodes[node]
    return b.add_node(node)


def triptree(ts: TripletSet) -> Network | None:
    """Binary tree consistent with every triplet, or ``None`` if none exists."""
    if not ts.universe:
        raise ValueError("empty universe")
    nested = aho_tree(ts)
    if nested is None:
        return None
    b = NetworkBuilder()
    _emit(nested, b)
    return b.to_network()


# ----------------------------------------------------------------------------
# reticulation selection


def candidate_scores(p: SNPartition) -> list[CandidateScore]:
    return [
        CandidateScore(
            mc=st.mc if st.mc is not None else 0,
            Mc=st.Mc if st.Mc is not None else 0,
            size=len(block),
            label_key=block_key(block),
            block=i,
        )
        for i, (block, st) in enumerate(zip(p.blocks, p.stats))
    ]


def select_reticulations(p: SNPartition, contracted: TripletSet,
                         cfg: BuildConfig) -> list[tuple[int, ...]]:
    """Removal sequences of block indices after which the contracted triplets
    on the remaining blocks admit a tree.

    Blocks are ranked by :class:`CandidateScore`; at each step the blocks tied
    with the best on (mc, Mc, size) are the candidates, of which the mode
    decides how many are branched on. Sequences leading to an already seen
    set of removed blocks are not repeated.
    """
    names = p.names()
    scores = candidate_scores(p)
    rng = random.Random(cfg.seed) if cfg.seed else None
    found: list[tuple[int, ...]] = []
    seen: set[frozenset[int]] = set()
    stack: list[tuple[int, ...]] = [()]
    while stack:
        removed = stack.pop()
        key = frozenset(removed)
        if key in seen:
            continue
        seen.add(key)
        remaining = [b for b in range(len(names)) if b not in key]
        if aho_tree(contracted.restrict([names[b] for b in remaining])) is not None:
            found.append(removed)
            continue
        if len(remaining) <= 1:
            raise BuildError("no removal sequence leaves a tree-consistent block set")
        ranked = sorted(scores[b] for b in remaining)
        cands = [s for s in ranked if s.criteria == ranked[0].criteria]
        if rng is not None:
            rng.shuffle(cands)
        chosen = cands[: cfg.width(len(cands))]
        # reversed so the preferred candidate is explored first
        for s in reversed(chosen):
            stack.append(removed + (s.block,))
    return found


# ----------------------------------------------------------------------------
# assembly


def _block_weight(block_a, block_b, weight) -> int:
    return min(weight[(x, y) if (x, y) in weight else (y, x)] for x in block_a for y in block_b)


def _cut(b: NetworkBuilder, arc) -> int:
    """New node on ``arc``; ``None`` stands for the arc above the root."""
    if arc is None:
        return b.subdivide_above(b.roots()[0])
    return b.subdivide(*arc)


def _with_pendant(net: Network, arc, label: str) -> Network:
    b = NetworkBuilder.from_network(net)
    s = _cut(b, arc)
    b.add_edge(s, b.add_node(label))
    return b.to_network()


def _attach(net: Network, name: str, triplets: list[Triplet], arc_weight) -> Network:
    """Hang leaf ``name`` below a new reticulation whose parents subdivide the
    two arcs jointly displaying the most of ``triplets``.

    A triplet is displayed after adding the reticulation iff it is displayed
    with the leaf pendant on one of the two arcs, so one pass per arc suffices.
    Ties go to the arcs above the blocks nearest to ``name`` in the height
    function, then to lower arcs.
    """
    arcs = [None, *net.edges]
    shown = {}
    for arc in arcs:
        pend = _with_pendant(net, arc, name)
        shown[arc] = frozenset(t for t in triplets if is_consistent(pend, t))
    head_size = [bin(d).count("1") for d in net.descendants]

    def key(pair):
        e1, e2 = pair
        heads = [net.root if e is None else e[1] for e in pair]
        ws = sorted(arc_weight(h) for h in heads)
        return (-len(shown[e1] | shown[e2]), ws, sum(head_size[h] for h in heads),
                [(-1, -1) if e is None else e for e in pair])

    pairs = [(e1, e2) for a, e1 in enumerate(arcs) for e2 in arcs[a + 1:]]
    e1, e2 = min(pairs, key=key)
    b = NetworkBuilder.from_network(net)
    s1 = _cut(b, e1)
    s2 = _cut(b, e2)
    ret = b.add_node()
    b.add_edge(s1, ret)
    b.add_edge(s2, ret)
    b.add_edge(ret, b.add_node(name))
    return b.to_network()


def _substitute(skeleton: Network, subs: dict[str, Network]) -> Network:
    b = NetworkBuilder.from_network(skeleton)
    for v, name in list(skeleton.labels.items()):
        sub = subs[name]
        (parent,) = b.parents[v]
        b.remove_node(v)
        ids = [b.add_node(sub.labels.get(x)) for x in range(sub.n_nodes)]
        for x, y in sub.edges:
            b.add_edge(ids[x], ids[y])
        b.add_edge(parent, ids[sub.root])
    b.suppress()
    return b.to_network()


def _assemble(p: SNPartition, contracted: TripletSet, removed: tuple[int, ...],
              weight: dict, sub_networks: list[Network]) -> Network:
    names = p.names()
    if len(names) - len(removed) < 1:
        raise BuildError("every block was removed")
    surviving = [i for i in range(len(names)) if i not in removed]
    nested = aho_tree(contracted.restrict([names[i] for i in surviving]))
    if nested is None:
        raise BuildError("remaining blocks admit no tree")
    b = NetworkBuilder()
    _emit(nested, b)
    net = b.to_network()
    placed = {names[i] for i in surviving}
    by_name = dict(zip(names, p.blocks))
    for r in reversed(removed):
        name = names[r]
        placed.add(name)
        relevant = [t for t in contracted.sorted()
                    if name in t.leaves and placed.issuperset(t.leaves)]
        desc = net.descendants
        labelled = list(net.labels.items())

        def arc_weight(head, _desc=desc, _lab=labelled, _r=p.blocks[r]):
            below = [by_name[lab] for v, lab in _lab if _desc[head] >> v & 1]
            return min(_block_weight(_r, blk, weight) for blk in below)

        net = _attach(net, name, relevant, arc_weight)
    return _substitute(net, dict(zip(names, sub_networks)))


def _leaf_or_cherry(block) -> Network:
    b = NetworkBuilder()
    leaves = sorted(block, key=label_key)
    _emit(leaves[0] if len(leaves) == 1 else tuple(leaves), b)
    return b.to_network()


def _rank(net: Network) -> tuple:
    stats = network_stats(net)
    return (stats.reticulation_count, stats.level, to_json(net))


def _repair_moves(net: Network, t: Triplet):
    """Candidate reticulation arcs ``(p, x, q, y)`` for fixing ``t = ij|k``: a
    new reticulation on ``p -> x`` fed from a new node on ``q -> y``, where
    ``x`` lies above one of i, j and ``y`` above the other, neither above k.
    The first move yielded is the plain leaf-above-leaf one."""
    i, j, k = net.leaf_of[t.a], net.leaf_of[t.b], net.leaf_of[t.c]
    desc = net.descendants
    bk = 1 << k
    yield (net.parents[i][0], i, net.parents[j][0], j)
    for xl, yl in ((i, j), (j, i)):
        xs = [x for x in range(net.n_nodes)
              if desc[x] >> xl & 1 and not desc[x] & bk and net.parents[x]]
        ys = [y for y in range(net.n_nodes)
              if desc[y] >> yl & 1 and not desc[y] & bk and net.parents[y]]
        for x in xs:
            for p in net.parents[x]:
                for y in ys:
                    for q in net.parents[y]:
                        if (p, x) == (q, y) or desc[x] >> q & 1:
                            continue
                        yield (p, x, q, y)


def _apply_move(net: Network, move) -> Network:
    p, x, q, y = move
    b = NetworkBuilder.from_network(net)
    ret = b.subdivide(p, x)
    side = b.subdivide(q, y)
    b.add_edge(side, ret)
    return b.to_network()


def repair_consistency(net: Network, ts: TripletSet, cfg: BuildConfig = BuildConfig()) -> Network:
    """Add reticulations until every triplet of ``ts`` is displayed.

    Each round takes the first inconsistent triplet ``ij|k`` in canonical
    order and adds one reticulation arc that displays it; among the candidate
    arcs (see :func:`_repair_moves`) the one displaying the most still-missing
    triplets wins, ties going to the lowest placement. Adding arcs never
    un-displays a triplet, so every round makes progress.
    """
    budget = cfg.max_repair_rounds if cfg.max_repair_rounds is not None else len(ts)
    pending = [t for t in ts.sorted() if not is_consistent(net, t)]
    current = net
    rounds = 0
    while pending:
        if rounds >= budget:
            raise RepairError("repair round budget exhausted", pending)
        target = pending[0]
        size = [bin(d).count("1") for d in current.descendants]
        best = None
        seen = set()
        for move in _repair_moves(current, target):
            if move in seen:
                continue
            seen.add(move)
            cand = _apply_move(current, move)
            if not is_consistent(cand, target):
                continue
            gain = sum(1 for u in pending[1:] if is_consistent(cand, u))
            key = (-gain, size[move[1]] + size[move[3]], move)
            if best is None or key < best[0]:
                best = (key, cand)
        if best is None:
            raise RepairError("no reticulation displays triplet", [target])
        current = best[1]
        pending = [u for u in pending[1:] if not is_consistent(current, u)]
        rounds += 1
        log.debug("repair: added reticulation for %s", target)
    return current


def _construct(ts: TripletSet, cfg: BuildConfig, depth: int) -> Network:
    if len(ts.universe) <= 2:
        return _leaf_or_cherry(ts.universe)
    tree = triptree(ts)
    if tree is not None:
        return tree
    h, g = height_function(ts)
    log.debug("%sheights: %d pairs, %d arcs dropped for cycles", "  " * depth,
              len(h.h), len(g.removed))
    p = sn_decompose(WeightedLeafGraph.from_heights(h), ts)
    contracted = induced_triplets(ts, p)
    log.debug("%sSN-sets: %s", "  " * depth, p.names())
    sequences = select_reticulations(p, contracted, cfg)
    log.debug("%sremoval sequences: %s", "  " * depth,
              [[p.names()[i] for i in s] for s in sequences])
    subs = [
        _leaf_or_cherry(block) if len(block) <= 2
        else _construct(ts.restrict(block), cfg, depth + 1)
        for block in p.blocks
    ]
    best = None
    for seq in sequences:
        net = _assemble(p, contracted, seq, h.h, subs)
        net = repair_consistency(net, ts, cfg)
        rank = _rank(net)
        if best is None or rank < best[0]:
            best = (rank, net)
    return best[1]


def build_network(ts: TripletSet, cfg: BuildConfig = BuildConfig()) -> Network:
    """Network consistent with every triplet of ``ts``.

    Equals TripTree's binary tree whenever one exists.
    """
    if len(ts.universe) < 2:
        raise BuildError("need at least two leaves")
    net = _construct(ts, cfg, 0)
    problems = validate_network(net)
    if problems:
        raise BuildError("constructed an invalid network: " + "; ".join(problems))
    return net
