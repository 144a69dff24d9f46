import itertools
import os

import networkx as nx
import pytest
from hypothesis import strategies as st

from dkbench.graph import Graph

DATA = os.path.join(os.path.dirname(__file__), "data")


def from_nx(h) -> Graph:
    return Graph.from_edges(((str(u), str(v)) for u, v in h.edges()), (str(u) for u in h.nodes()))


def to_nx(g: Graph):
    h = nx.Graph()
    h.add_nodes_from(g.labels)
    h.add_edges_from(g.edges())
    return h


@st.composite
def small_graphs(draw, min_nodes=1, max_nodes=8):
    """Arbitrary simple graphs on up to ``max_nodes`` nodes (isolated nodes allowed)."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [(f"v{u}", f"v{v}") for (u, v), keep in zip(pairs, mask) if keep]
    return Graph.from_edges(edges, [f"v{i}" for i in range(n)])


def plc(n, m=2, p=0.5, seed=0) -> Graph:
    return from_nx(nx.powerlaw_cluster_graph(n, m, p, seed=seed))


@pytest.fixture(scope="session")
def lfr300() -> Graph:
    from dkbench.graph import load_edge_list
    return load_edge_list(os.path.join(DATA, "lfr300.edges"))


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def path3() -> Graph:
    return Graph.from_edges([("a", "b"), ("b", "c")])
