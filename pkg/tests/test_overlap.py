import json

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import from_nx, plc, small_graphs, to_nx
from dkbench.graph import Graph
from dkbench.overlap import (STRATEGIES, SplitParameterError, overlap_order, overlap_order_idx,
                             overlap_size, split)


def _check_identities(g, sp):
    v, v1, v2 = set(g.labels), set(sp.g1.labels), set(sp.g2.labels)
    assert v1 | v2 == v
    assert v1 & v2 == set(sp.v_alpha)
    assert not (v1 - sp.v_alpha) & (v2 - sp.v_alpha)
    assert sp.g1 == g.subgraph(v1) and sp.g2 == g.subgraph(v2)


def test_partition_arithmetic():
    g = from_nx(nx.path_graph(10))
    sp = split(g, 0.2, "R", seed=3)
    assert len(sp.v_alpha) == 2 and sp.g1.n_nodes == sp.g2.n_nodes == 6
    assert sp.jaccard() == pytest.approx(0.2)


def test_full_overlap():
    g = plc(30)
    sp = split(g, 1.0, "BFS-R", seed=1)
    assert set(sp.g1.labels) == set(sp.g2.labels) == set(g.labels) == set(sp.v_alpha)


def test_hd_picks_hub():
    star = Graph.from_edges([("hub", str(i)) for i in range(9)])
    assert split(star, 0.1, "HD").v_alpha == {"hub"}


def test_orders_on_path(path3):
    assert overlap_order(path3, "HD", 1) == ["b"]
    assert overlap_order(path3, "BFS-HD", 3) == ["b", "a", "c"]


def test_hd_ties_break_by_label():
    g = from_nx(nx.cycle_graph(5))
    assert overlap_order(g, "HD", 3) == ["0", "1", "2"]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_full_size_is_a_permutation(strategy):
    g = plc(40, seed=2)
    order = overlap_order(g, strategy, g.n_nodes, seed=5)
    assert sorted(order) == sorted(g.labels)


@pytest.mark.parametrize("strategy", ["BFS-R", "BFS-HD"])
def test_bfs_order_is_breadth_first(strategy):
    g = plc(50, seed=1)
    order = overlap_order(g, strategy, 20, seed=2)
    h = to_nx(g)
    dist = nx.single_source_shortest_path_length(h, order[0])
    ds = [dist[u] for u in order]
    assert ds == sorted(ds)


def test_bfs_hd_roots_at_max_degree():
    g = plc(60, seed=4)
    top = max(g.degrees())
    assert g.degree(overlap_order(g, "BFS-HD", 5)[0]) == top


def test_bfs_restarts_across_components():
    g = Graph.from_edges([("a", "b"), ("c", "d"), ("e", "f")])
    idx, restarts = overlap_order_idx(g, "BFS-HD", 5, 0)
    assert restarts == 2 and len(idx) == 5


@settings(max_examples=150, deadline=None)
@given(small_graphs(min_nodes=3, max_nodes=12), st.sampled_from(STRATEGIES),
       st.sampled_from([0.1, 0.2, 0.5, 1.0]), st.integers(0, 2**32))
def test_split_properties(g, strategy, alpha, seed):
    if overlap_size(g.n_nodes, alpha) < 1:
        with pytest.raises(SplitParameterError):
            split(g, alpha, strategy, seed)
        return
    sp = split(g, alpha, strategy, seed)
    _check_identities(g, sp)
    assert abs(sp.jaccard() - alpha) <= 1 / g.n_nodes
    assert abs(sp.g1.n_nodes - sp.g2.n_nodes) <= 1
    if strategy.startswith("BFS"):
        comps = nx.number_connected_components(to_nx(g.subgraph(sp.v_alpha)))
        assert comps <= sp.bfs_restarts + 1
    again = split(g, alpha, strategy, seed)
    assert again.v_alpha == sp.v_alpha and again.g1 == sp.g1


def test_parameter_errors():
    g = plc(20)
    with pytest.raises(SplitParameterError):
        split(g, 0.0)
    with pytest.raises(SplitParameterError):
        split(g, 1.5)
    with pytest.raises(SplitParameterError):
        split(g, 0.2, "DFS")
    with pytest.raises(SplitParameterError):
        split(Graph.from_edges([("a", "b")]), 0.5)
    with pytest.raises(SplitParameterError):
        overlap_order(g, "R", 0)
    with pytest.raises(SplitParameterError):
        overlap_order(g, "R", 21)


def test_manifest_written(tmp_path):
    g = plc(30)
    sp = split(g, 0.2, "HD", 0)
    sp.write(tmp_path, "toy")
    doc = json.loads((tmp_path / "toy.split.json").read_text())
    assert doc["strategy"] == "HD" and sorted(doc["v_alpha"]) == sorted(sp.v_alpha)
    assert (tmp_path / "toy.g1.edges").exists() and (tmp_path / "toy.g2.edges").exists()
