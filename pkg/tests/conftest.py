import json
from pathlib import Path

import pytest

from trigeom.graph import Sort, TriGraph

DATA = Path(__file__).parent / "data"


def graph(vertices, e=(), e2=(), n=6):
    """Shorthand builder: vertices is {id: 'point'|'line'|'plane'}."""
    return TriGraph.build(
        n,
        {v: Sort(s) for v, s in vertices.items()},
        e=list(e),
        e2=list(e2),
        allow_small_n=n < 6,
    )


@pytest.fixture
def flag():
    """One complete flag: point 0, line 1, plane 2."""
    return graph(
        {0: "point", 1: "line", 2: "plane"},
        e=[(0, 1), (1, 2)],
        e2=[(0, 2)],
    )


@pytest.fixture
def double_line():
    """Two points joined by two distinct lines: the canonical C1 breaker."""
    return graph(
        {0: "point", 1: "point", 2: "line", 3: "line"},
        e=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )


@pytest.fixture
def golden_doc():
    return json.loads((DATA / "golden_state.json").read_text())
