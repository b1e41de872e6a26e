from pathlib import Path

import pytest

from tripnet.network import Network, NetworkBuilder, network_from_nested
from tripnet.triplets import TripletSet, parse_triplets

DATA = Path(__file__).parent / "data"

ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name in sorted(ACCEPTANCE, key=lambda x: int(x.split()[0])):
            terminalreporter.write_line(f"{name}: {ACCEPTANCE[name]}")


def build(edges, labels) -> Network:
    """Network from builder-style edges over named nodes; leaves are the keys of ``labels``."""
    b = NetworkBuilder()
    ids = {}
    names = []
    for p, c in edges:
        for x in (p, c):
            if x not in ids:
                ids[x] = b.add_node(labels.get(x))
                names.append(x)
    for p, c in edges:
        b.add_edge(ids[p], ids[c])
    return b.to_network()


@pytest.fixture
def six_taxa() -> TripletSet:
    return parse_triplets((DATA / "six_taxa.trip").read_text())


@pytest.fixture
def tree123() -> Network:
    return network_from_nested((("1", "2"), "3"))


@pytest.fixture
def caterpillar() -> Network:
    return network_from_nested(((("3", "4"), "2"), "1"))


@pytest.fixture
def gall123() -> Network:
    """Leaf 2 below a reticulation fed from both root branches."""
    return build(
        [("r", "a"), ("r", "b"), ("a", "1"), ("a", "h"), ("b", "h"), ("b", "3"), ("h", "2")],
        {"1": "1", "2": "2", "3": "3"},
    )


@pytest.fixture
def two_galls() -> Network:
    """Two galls in series; the lower one spans leaves 1, 2 and 3."""
    return build(
        [
            ("r", "a"), ("r", "b"), ("a", "h1"), ("b", "h1"), ("a", "5"), ("b", "x"),
            ("h1", "c"), ("c", "d"), ("c", "e"), ("d", "h2"), ("e", "h2"), ("d", "1"),
            ("e", "3"), ("h2", "2"), ("x", "4"), ("x", "6"),
        ],
        {str(i): str(i) for i in range(1, 7)},
    )
