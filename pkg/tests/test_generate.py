import itertools
import json

import networkx as nx
import pytest

from conftest import from_nx, plc
from dkbench.dkseries import cspec_distance, extract_1k, extract_2k, extract_cspec
from dkbench.generate import (ConvergenceError, GenerationError, GenParams, _Rewirer, _uniforms,
                              generate, generate_1k, generate_2k, generate_25k, instance_filename,
                              write_instance)
from dkbench.graph import Graph, triangles
from dkbench.rng import make_rng

K4_MINUS = Graph.from_edges([("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def _degrees(g):
    return {u: g.degree(u) for u in g.labels}


def test_forced_outputs(triangle):
    for fn in (generate_1k, generate_2k, generate_25k):
        assert fn(triangle) == triangle
    c4 = from_nx(nx.cycle_graph(4))
    out = generate_1k(c4)
    assert all(out.degree(u) == 2 for u in out.labels) and nx.is_isomorphic(nx.Graph(out.edges()), nx.cycle_graph(4))
    p4 = Graph.from_edges([("a", "b"), ("b", "c"), ("c", "d")])
    out = generate_2k(p4)
    assert nx.is_isomorphic(nx.Graph(out.edges()), nx.path_graph(4))
    assert extract_2k(out) == {(1, 2): 2, (2, 2): 1}


def test_k4_minus_edge_25k_matches_enumeration():
    target_jdd = {(2, 3): 4, (3, 3): 1}
    labels = list(K4_MINUS.labels)
    pairs = list(itertools.combinations(labels, 2))
    qualifying = set()
    for es in itertools.combinations(pairs, 5):
        h = Graph.from_edges(es, labels)
        if extract_2k(h) == target_jdd and extract_cspec(h) == extract_cspec(K4_MINUS):
            qualifying.add(frozenset(h.edge_set()))
    assert len(qualifying) == 6      # one per choice of the missing edge
    for seed in range(5):
        out = generate(K4_MINUS, GenParams(level="2.5K", rng_seed=seed, cspec_tolerance=0.0)).graph
        assert frozenset(out.edge_set()) in qualifying
        assert out == K4_MINUS           # per-node degrees pin the labels


@pytest.mark.parametrize("seed", range(4))
def test_levels_preserve_their_statistics(seed):
    g = plc(80, 2, 0.5, seed)
    out1 = generate(g, GenParams(level="1K", rng_seed=seed))
    assert _degrees(out1.graph) == _degrees(g)
    out2 = generate(g, GenParams(level="2K", rng_seed=seed))
    assert extract_2k(out2.graph) == extract_2k(g) and out2.jdd_distance == 0
    assert _degrees(out2.graph) == _degrees(g)
    out3 = generate(g, GenParams(level="2.5K", rng_seed=seed))
    assert extract_2k(out3.graph) == extract_2k(g)
    dd = extract_1k(g)
    cd = cspec_distance(extract_cspec(out3.graph), extract_cspec(g), dd)
    assert cd <= 0.01 and out3.cspec_distance == pytest.approx(cd)


def test_output_is_simple_and_on_same_nodes():
    g = plc(60, 3, 0.3, 1)
    for level in ("1K", "2K", "2.5K"):
        out = generate(g, GenParams(level=level, rng_seed=2)).graph
        assert set(out.labels) == set(g.labels)
        assert all(i not in a for i, a in enumerate(out.adj))


def test_debug_mode_checks_every_swap():
    g = plc(40, 2, 0.5, 3)
    res = generate(g, GenParams(level="2K", rng_seed=1, debug=True))
    assert extract_2k(res.graph) == extract_2k(g)


def test_deterministic_and_seed_sensitive():
    g = plc(60, 2, 0.5, 0)
    for level in ("1K", "2K", "2.5K"):
        a = generate(g, GenParams(level=level, rng_seed=5)).graph
        b = generate(g, GenParams(level=level, rng_seed=5)).graph
        c = generate(g, GenParams(level=level, rng_seed=6)).graph
        assert a.edge_set() == b.edge_set()
        assert a.edge_set() != c.edge_set()


def test_triangle_tracking_matches_recount():
    g = plc(60, 3, 0.6, 4)
    rw = _Rewirer(g, track_triangles=True)
    rand = _uniforms(make_rng(0, "t"))
    done = 0
    for _ in range(3000):
        prop = rw.propose_any(rand)
        if prop is None:
            continue
        dtri = rw.tri_delta(*prop)
        rw.swap(*prop, dtri)
        done += 1
        if done % 500 == 0:
            assert list(rw.tri) == triangles(rw.graph()).tolist()
    assert done > 1000
    assert list(rw.tri) == triangles(rw.graph()).tolist()


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(level="3K")
    with pytest.raises(ValueError):
        GenParams(swap_budget_factor=0)
    with pytest.raises(ValueError):
        GenParams(cspec_tolerance=-1)


def test_edgeless_graph_is_rejected():
    with pytest.raises(GenerationError):
        generate(Graph(["a", "b"], [[], []]), GenParams())


def test_convergence_error_carries_distances():
    e = ConvergenceError("stuck", jdd_distance=3, cspec_distance=0.2)
    assert isinstance(e, GenerationError)
    assert (e.jdd_distance, e.cspec_distance) == (3, 0.2)


def test_write_instance(tmp_path):
    g = plc(30, 2, 0.5, 0)
    res = generate(g, GenParams(level="2K", rng_seed=7))
    path, side = write_instance(res, tmp_path, "toy")
    assert path.endswith(instance_filename("toy", "2K", 7)) and path.endswith("toy.2K.7.edges")
    meta = json.loads(open(side).read())
    assert meta["params"]["level"] == "2K" and meta["jdd_distance"] == 0
