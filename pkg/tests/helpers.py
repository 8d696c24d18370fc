"""Graph builders and strategies shared by the test modules."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from ctoqw.graph import Graph, disjoint_union, generate, random_connected

# criterion number -> (PASS/FAIL, title), filled by test_acceptance
ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def named_graphs() -> dict[str, Graph]:
    """Connected graphs without isolated vertices used across the suite."""
    rng = np.random.default_rng(2024)
    graphs = {
        "K2": generate("complete", 2),
        "path3": generate("path", 3),
        "path5": generate("path", 5),
        "claw": generate("star", 3),
        "star5": generate("star", 5),
        "cycle3": generate("cycle", 3),
        "cycle4": generate("cycle", 4),
        "cycle5": generate("cycle", 5),
        "K4": generate("complete", 4),
    }
    for i in range(4):
        graphs[f"random{i}"] = random_connected(int(rng.integers(3, 7)), rng)
    return graphs


def two_disjoint_edges() -> Graph:
    return disjoint_union(generate("path", 2), generate("path", 2))


@st.composite
def connected_graphs(draw, min_n: int = 2, max_n: int = 6) -> Graph:
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.floats(0.0, 1.0))
    return random_connected(n, np.random.default_rng(seed), p)


@st.composite
def any_graphs(draw, max_n: int = 7) -> Graph:
    n = draw(st.integers(1, max_n))
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph.from_edges(n, chosen)
