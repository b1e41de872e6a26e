"""Simulation protocols: random-network round trips under triplet loss, and
recombination on sequences evolved down a random tree."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import random
from dataclasses import asdict, dataclass, field
from itertools import combinations
from statistics import mean
from typing import Sequence

from .builder import BuildConfig, build_network
from .consistency import all_consistent_triplets, inconsistent_triplets
from .network import Network, NetworkBuilder, NodeKind
from .triplets import Triplet, TripletSet

log = logging.getLogger(__name__)

NUCLEOTIDES = "ACGT"


class SimulationError(RuntimeError):
    pass


def derive_seed(master: int, *parts) -> int:
    """64-bit seed from a master seed and an index path (order-independent trials)."""
    text = ":".join(str(x) for x in (master, *parts))
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


# ----------------------------------------------------------------------------
# random networks


def _coalescent_tree(n_leaves: int, rng: random.Random) -> tuple[NetworkBuilder, dict[int, int]]:
    """Random binary tree by merging uniformly chosen lineages; internal nodes
    get the merge step as height (leaves 0)."""
    b = NetworkBuilder()
    lineages = [b.add_node(str(i)) for i in range(1, n_leaves + 1)]
    height = {v: 0 for v in lineages}
    for step in range(1, n_leaves):
        x, y = rng.sample(range(len(lineages)), 2)
        p = b.add_node()
        b.add_edge(p, lineages[x])
        b.add_edge(p, lineages[y])
        height[p] = step
        lineages = [v for i, v in enumerate(lineages) if i not in (x, y)] + [p]
    return b, height


def _reach(b: NetworkBuilder) -> dict[int, set[int]]:
    memo: dict[int, set[int]] = {}

    def go(v):
        if v not in memo:
            s = {v}
            for c in b.children[v]:
                s |= go(c)
            memo[v] = s
        return memo[v]

    for v in b.children:
        go(v)
    return memo


def _node_heights(b: NetworkBuilder) -> dict[int, int]:
    memo: dict[int, int] = {}

    def go(v):
        if v not in memo:
            memo[v] = 1 + max((go(c) for c in b.children[v]), default=-1)
        return memo[v]

    for v in b.children:
        go(v)
    return memo


def _shown(b: NetworkBuilder) -> frozenset:
    net = b.to_network()
    if len(net.leaf_labels) < 3:
        return frozenset()
    return all_consistent_triplets(net).triplets


def random_network(n_leaves: int, k_reticulations: int, seed: int) -> Network:
    """Random coalescent tree plus ``k`` random reticulation arcs.

    Each arc joins new nodes on two tree arcs whose heads are not ancestral to
    one another, directed toward the lower of the two. An arc that would
    display no new triplet is redrawn; it is kept only when every candidate
    is like that.
    """
    if n_leaves < 2:
        raise ValueError("need at least two leaves")
    if k_reticulations < 0:
        raise ValueError("reticulation count must be nonnegative")
    rng = random.Random(seed)
    b, _ = _coalescent_tree(n_leaves, rng)
    shown = _shown(b)
    for _ in range(k_reticulations):
        reach = _reach(b)
        arcs = [(p, c) for p in sorted(b.children) for c in b.children[p]
                if len(b.parents[c]) < 2]
        pairs = [(e1, e2) for e1, e2 in combinations(arcs, 2)
                 if e1[1] not in reach[e2[1]] and e2[1] not in reach[e1[1]]]
        if not pairs:
            raise ValueError(f"cannot place {k_reticulations} reticulations on {n_leaves} leaves")
        rng.shuffle(pairs)
        hgt = _node_heights(b)
        fallback = None
        for e1, e2 in pairs:
            if (hgt[e1[1]], rng.random()) < (hgt[e2[1]], 0.5):
                e1, e2 = e2, e1
            trial = b.copy()
            s1 = trial.subdivide(*e1)
            s2 = trial.subdivide(*e2)
            trial.add_edge(s1, s2)
            fallback = fallback or trial
            now = _shown(trial)
            if now != shown:
                b, shown = trial, now
                break
        else:
            b = fallback
    return b.to_network()


def subsample_triplets(ts: TripletSet, loss: float, seed: int) -> TripletSet:
    """Keep ``ceil((1 - loss) * |ts|)`` triplets drawn uniformly; universe unchanged."""
    if not 0 <= loss < 1:
        raise ValueError("loss must lie in [0, 1)")
    trips = ts.sorted()
    keep = min(len(trips), math.ceil((1 - loss) * len(trips) - 1e-9))
    if keep == len(trips):
        return ts
    chosen = random.Random(seed).sample(trips, keep)
    return TripletSet(ts.universe, frozenset(chosen))


# ----------------------------------------------------------------------------
# round trip with triplet loss


@dataclass(frozen=True)
class TrialRecord:
    loss: float
    trial: int
    seed: int
    r_original: int
    r_built: int
    n_triplets: int

    @property
    def diff(self) -> int:
        return self.r_built - self.r_original


@dataclass(frozen=True)
class LossSummary:
    loss: float
    min: int
    max: int
    mean: float
    trials: int


@dataclass
class SimulationReport:
    seed: int
    trials: int
    n_leaves: int
    mode: str
    summary: list[LossSummary] = field(default_factory=list)
    records: list[TrialRecord] = field(default_factory=list)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["loss", "trial", "seed", "r_original", "r_built", "diff"])
        for r in self.records:
            w.writerow([r.loss, r.trial, r.seed, r.r_original, r.r_built, r.diff])
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "seed": self.seed,
            "trials": self.trials,
            "n_leaves": self.n_leaves,
            "mode": self.mode,
            "summary": [asdict(s) for s in self.summary],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _checked_build(ts: TripletSet, cfg: BuildConfig, seed: int) -> Network:
    try:
        net = build_network(ts, cfg)
    except Exception as exc:
        raise SimulationError(f"build failed for trial seed {seed}: {exc}") from exc
    bad = inconsistent_triplets(net, ts)
    if bad:
        raise SimulationError(
            f"trial seed {seed}: rebuilt network misses {len(bad)} triplets, e.g. {bad[0]}")
    return net


def run_table1(trials: int = 50, loss_list: Sequence[float] = (0, 0.2, 0.4, 0.6, 0.8),
               cfg: BuildConfig = BuildConfig(), seed: int = 0, n_leaves: int = 10,
               max_reticulations: int = 10) -> SimulationReport:
    """Random networks with 1..``max_reticulations`` reticulations, all their
    displayed triplets, subsampled per loss level, rebuilt and compared."""
    if trials < 1:
        raise ValueError("trials must be positive")
    report = SimulationReport(seed=seed, trials=trials, n_leaves=n_leaves, mode=cfg.mode)
    for trial in range(trials):
        tseed = derive_seed(seed, "table1", trial)
        k = random.Random(tseed).randint(1, max_reticulations)
        original = random_network(n_leaves, k, tseed)
        full = all_consistent_triplets(original)
        for loss in loss_list:
            sample = subsample_triplets(full, loss, derive_seed(tseed, loss))
            built = _checked_build(sample, cfg, tseed)
            report.records.append(TrialRecord(
                loss=loss, trial=trial, seed=tseed, r_original=original.reticulation_count,
                r_built=built.reticulation_count, n_triplets=len(sample)))
        log.info("table1 trial %d: k=%d, |triplets|=%d", trial, k, len(full))
    for loss in loss_list:
        diffs = [r.diff for r in report.records if r.loss == loss]
        report.summary.append(LossSummary(loss, min(diffs), max(diffs), mean(diffs), len(diffs)))
    return report


# ----------------------------------------------------------------------------
# recombination scenario


@dataclass(frozen=True)
class SequenceWorld:
    tree: Network
    sequences: dict[str, str]
    mutations: tuple[tuple[int, int, str, str], ...]  # (child node, site, old, new)


def evolve_sequences(n_leaves: int, n_sites: int, rng: random.Random,
                     rate: int | None = None) -> SequenceWorld:
    """Random clock-like tree; each branch carries ``rate`` mutations per unit
    of height difference, each at a fresh site.

    Internal heights are always 1..n-1, so the total branch height is fixed
    and the default rate is the largest one that fits in ``n_sites``.
    """
    b, height = _coalescent_tree(n_leaves, rng)
    if rate is None:
        total = sum(height[p] - height[c] for p in b.children for c in b.children[p])
        rate = max(1, n_sites // total)
    root = b.roots()[0]
    free = list(range(n_sites))
    rng.shuffle(free)
    seqs = {root: [rng.choice(NUCLEOTIDES) for _ in range(n_sites)]}
    log_ = []
    stack = [root]
    while stack:
        v = stack.pop()
        for c in b.children[v]:
            s = list(seqs[v])
            for _ in range(rate * (height[v] - height[c])):
                if not free:
                    raise SimulationError("ran out of unmutated sites")
                site = free.pop()
                new = rng.choice([x for x in NUCLEOTIDES if x != s[site]])
                log_.append((c, site, s[site], new))
                s[site] = new
            seqs[c] = s
            stack.append(c)
    leaves = {lab: "".join(seqs[v]) for v, lab in b.labels.items()}
    return SequenceWorld(b.to_network(), leaves, tuple(log_))


def hamming(x: str, y: str) -> int:
    return sum(a != b for a, b in zip(x, y))


def distance_triplets(sequences: dict[str, str]) -> TripletSet:
    """``xy|z`` whenever d(x, y) < min(d(x, z), d(y, z)); no triplet otherwise."""
    labels = list(sequences)
    d = {}
    for x, y in combinations(labels, 2):
        d[x, y] = d[y, x] = hamming(sequences[x], sequences[y])
    out = []
    for x, y, z in combinations(labels, 3):
        for a, b_, c in ((x, y, z), (x, z, y), (y, z, x)):
            if d[a, b_] < min(d[a, c], d[b_, c]):
                out.append(Triplet.make(a, b_, c))
    return TripletSet.from_triplets(out, labels)


def _cherries(tree: Network) -> set[frozenset[str]]:
    out = set()
    for v in range(tree.n_nodes):
        kids = tree.children[v]
        if len(kids) == 2 and all(c in tree.labels for c in kids):
            out.add(frozenset(tree.labels[c] for c in kids))
    return out


@dataclass(frozen=True)
class RecombinationTrial:
    trial: int
    seed: int
    r_control: int
    r_recombinant: int
    parents: tuple[str, str]
    crossover: int


@dataclass
class RecombinationReport:
    seed: int
    trials: int
    mode: str
    records: list[RecombinationTrial] = field(default_factory=list)

    def histogram(self) -> dict[str, int]:
        hist = {"0": 0, "1": 0, "2": 0, "3+": 0}
        for r in self.records:
            hist[str(r.r_recombinant) if r.r_recombinant < 3 else "3+"] += 1
        return hist

    def fraction_reticulate(self) -> float:
        return sum(r.r_recombinant >= 1 for r in self.records) / len(self.records)

    def fraction_control_tree(self) -> float:
        return sum(r.r_control == 0 for r in self.records) / len(self.records)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["trial", "seed", "parent_a", "parent_b", "crossover", "r_control", "r_recombinant"])
        for r in self.records:
            w.writerow([r.trial, r.seed, *r.parents, r.crossover, r.r_control, r.r_recombinant])
        return out.getvalue()

    def to_json(self) -> str:
        n = len(self.records)
        doc = {
            "seed": self.seed,
            "trials": self.trials,
            "mode": self.mode,
            "histogram": self.histogram(),
            "percent": {k: round(100 * v / n, 2) for k, v in self.histogram().items()},
            "control_tree_fraction": self.fraction_control_tree(),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def recombination_trial(trial: int, seed: int, seq_len_codons: int = 50,
                        cfg: BuildConfig = BuildConfig(), n_leaves: int = 8) -> RecombinationTrial:
    tseed = seed
    while True:
        rng = random.Random(tseed)
        world = evolve_sequences(n_leaves, 3 * seq_len_codons, rng)
        if len(set(world.sequences.values())) == len(world.sequences):
            break
        log.warning("trial %d: duplicate sequences drawn, bumping seed %d", trial, tseed)
        tseed += 1
    control = _checked_build(distance_triplets(world.sequences), cfg, tseed)
    cherries = _cherries(world.tree)
    labels = sorted(world.sequences, key=int)
    candidates = []
    for a, b in combinations(labels, 2):
        if frozenset((a, b)) in cherries:
            continue
        diff = [i for i, (x, y) in enumerate(zip(world.sequences[a], world.sequences[b])) if x != y]
        if len(diff) >= 2:
            candidates.append((a, b, diff))
    a, b, diff = rng.choice(candidates)
    if rng.random() < 0.5:
        a, b = b, a
    cut = rng.randint(diff[0] + 1, diff[-1])
    seqs = dict(world.sequences)
    seqs[str(n_leaves + 1)] = world.sequences[a][:cut] + world.sequences[b][cut:]
    net = _checked_build(distance_triplets(seqs), cfg, tseed)
    return RecombinationTrial(trial, tseed, control.reticulation_count,
                              net.reticulation_count, (a, b), cut)


def run_recombination(trials: int = 100, seq_len_codons: int = 50,
                      cfg: BuildConfig = BuildConfig(), seed: int = 0) -> RecombinationReport:
    """Tally reticulation counts of networks rebuilt from 8 tree sequences plus
    one recombinant of a random non-cherry pair."""
    if trials < 1:
        raise ValueError("trials must be positive")
    report = RecombinationReport(seed=seed, trials=trials, mode=cfg.mode)
    for trial in range(trials):
        rec = recombination_trial(trial, derive_seed(seed, "recomb", trial), seq_len_codons, cfg)
        report.records.append(rec)
        log.info("recomb trial %d: control R=%d, recombinant R=%d",
                 trial, rec.r_control, rec.r_recombinant)
    return report
