"""Rooted triplets ``ab|c`` and triplet sets over a leaf universe."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

_DIGITS = re.compile(r"^\d+$")
_FORBIDDEN = re.compile(r"[,|\s]")


class TripletFormatError(ValueError):
    """Raised for malformed triplet text or invalid triplet leaves."""


def label_key(label: str) -> tuple:
    """Sort key for leaf labels: integer labels numerically, then others."""
    if _DIGITS.match(label):
        return (0, int(label), label)
    return (1, 0, label)


@dataclass(frozen=True, order=False)
class Triplet:
    """The triplet ``a b | c``: ``a`` and ``b`` are closer to each other than to ``c``.

    Use :meth:`make` to build one; it puts the pair into canonical order.
    """

    a: str
    b: str
    c: str

    @classmethod
    def make(cls, x: str, y: str, outlier: str) -> "Triplet":
        x, y, outlier = str(x), str(y), str(outlier)
        if len({x, y, outlier}) != 3:
            raise TripletFormatError(f"repeated leaf in triplet {x},{y}|{outlier}")
        for lab in (x, y, outlier):
            if not lab:
                raise TripletFormatError("empty leaf label")
        if label_key(y) < label_key(x):
            x, y = y, x
        return cls(x, y, outlier)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)

    @property
    def outlier(self) -> str:
        return self.c

    @property
    def leaves(self) -> tuple[str, str, str]:
        return (self.a, self.b, self.c)

    def sort_key(self) -> tuple:
        return (label_key(self.a), label_key(self.b), label_key(self.c))

    def __str__(self) -> str:
        return f"{self.a},{self.b}|{self.c}"


@dataclass(frozen=True)
class TripletSet:
    """A deduplicated set of triplets plus the (sorted) leaf universe."""

    universe: tuple[str, ...]
    triplets: frozenset[Triplet]

    def __post_init__(self):
        known = set(self.universe)
        if len(known) != len(self.universe):
            raise ValueError("duplicate labels in universe")
        for t in self.triplets:
            missing = [x for x in t.leaves if x not in known]
            if missing:
                raise ValueError(f"triplet {t} uses leaves outside the universe: {missing}")

    @classmethod
    def from_triplets(cls, triplets: Iterable[Triplet], leaves: Iterable[str] = ()) -> "TripletSet":
        trips = frozenset(triplets)
        universe = set(str(x) for x in leaves)
        for t in trips:
            universe.update(t.leaves)
        return cls(tuple(sorted(universe, key=label_key)), trips)

    @classmethod
    def parse(cls, text: str) -> "TripletSet":
        return parse_triplets(text)

    def __len__(self) -> int:
        return len(self.triplets)

    def __iter__(self) -> Iterator[Triplet]:
        return iter(self.sorted())

    def __contains__(self, t: object) -> bool:
        return t in self.triplets

    def sorted(self) -> list[Triplet]:
        """Triplets in canonical order."""
        return sorted(self.triplets, key=Triplet.sort_key)

    def restrict(self, leaves: Iterable[str]) -> "TripletSet":
        """Sub-set on ``leaves`` keeping only triplets with all three leaves inside."""
        keep = set(leaves)
        unknown = keep.difference(self.universe)
        if unknown:
            raise ValueError(f"leaves not in universe: {sorted(unknown, key=label_key)}")
        trips = frozenset(t for t in self.triplets if keep.issuperset(t.leaves))
        return TripletSet(tuple(x for x in self.universe if x in keep), trips)

    def to_text(self) -> str:
        return "".join(f"{t}\n" for t in self.sorted())


def parse_triplets(text: str, leaves: Iterable[str] = ()) -> TripletSet:
    """Parse ``A,B|C`` lines (``#`` comments and blank lines are skipped).

    Raises :class:`TripletFormatError` naming the offending line number.
    """
    trips = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pair, outlier = line.split("|")
            x, y = pair.split(",")
        except ValueError:
            raise TripletFormatError(f"line {lineno}: expected 'A,B|C', got {raw!r}") from None
        x, y, outlier = x.strip(), y.strip(), outlier.strip()
        for lab in (x, y, outlier):
            if not lab:
                raise TripletFormatError(f"line {lineno}: empty leaf label")
            if _FORBIDDEN.search(lab):
                raise TripletFormatError(f"line {lineno}: invalid leaf label {lab!r}")
        try:
            trips.append(Triplet.make(x, y, outlier))
        except TripletFormatError as exc:
            raise TripletFormatError(f"line {lineno}: {exc}") from None
    return TripletSet.from_triplets(trips, leaves)


def format_triplets(ts: TripletSet) -> str:
    return ts.to_text()
