"""Undirected simple graphs, edge-list I/O and the dataset metrics table."""

from __future__ import annotations

import io
import logging
from dataclasses import asdict, dataclass
from typing import IO, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

log = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two node tokens, got {line!r}")
        self.lineno = lineno


class UndefinedMetricError(ValueError):
    """A metric has no value on this graph (e.g. zero variance, no pairs)."""

    def __init__(self, metric: str, reason: str):
        super().__init__(f"{metric} undefined: {reason}")
        self.metric = metric
        self.reason = reason


class Graph:
    """Immutable undirected simple graph.

    Node ids are opaque strings mapped to dense indices ``0..n-1`` in
    insertion order; ``adj[i]`` is the frozenset of neighbour indices.
    """

    __slots__ = ("_labels", "_index", "_adj", "_n_edges")

    def __init__(self, labels: Sequence[str], adj: Sequence[Iterable[int]]):
        self._labels = tuple(labels)
        self._index = {u: i for i, u in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise ValueError("duplicate node labels")
        self._adj = tuple(frozenset(a) for a in adj)
        if len(self._adj) != len(self._labels):
            raise ValueError("adjacency length does not match node count")
        deg_sum = 0
        for i, nbrs in enumerate(self._adj):
            if i in nbrs:
                raise ValueError(f"self-loop at {self._labels[i]!r}")
            for j in nbrs:
                if i not in self._adj[j]:
                    raise ValueError("adjacency is not symmetric")
            deg_sum += len(nbrs)
        self._n_edges = deg_sum // 2

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], nodes: Iterable = ()) -> "Graph":
        """Build a graph from label pairs; loops and duplicates are dropped."""
        index: dict[str, int] = {}
        adj: list[set[int]] = []

        def idx(u) -> int:
            u = str(u)
            i = index.get(u)
            if i is None:
                i = index[u] = len(adj)
                adj.append(set())
            return i

        for u in nodes:
            idx(u)
        for u, v in edges:
            i, j = idx(u), idx(v)
            if i != j:
                adj[i].add(j)
                adj[j].add(i)
        return cls(list(index), adj)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def index(self) -> dict[str, int]:
        return dict(self._index)

    @property
    def adj(self) -> tuple[frozenset[int], ...]:
        return self._adj

    @property
    def n_nodes(self) -> int:
        return len(self._labels)

    @property
    def n_edges(self) -> int:
        return self._n_edges

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, u) -> bool:
        return u in self._index

    def __repr__(self) -> str:
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self._labels) == set(other._labels) and self.edge_set() == other.edge_set()

    def __hash__(self):
        return hash((frozenset(self._labels), frozenset(self.edge_set())))

    def idx(self, u: str) -> int:
        try:
            return self._index[u]
        except KeyError:
            raise KeyError(f"unknown node {u!r}") from None

    def degree(self, u: str) -> int:
        return len(self._adj[self.idx(u)])

    def neighbors(self, u: str) -> set[str]:
        return {self._labels[j] for j in self._adj[self.idx(u)]}

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._index and v in self._index and self._index[v] in self._adj[self._index[u]]

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=len(self._adj))

    def index_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self._adj) for j in sorted(nbrs) if i < j]

    def edges(self) -> list[tuple[str, str]]:
        lab = self._labels
        return [(lab[i], lab[j]) for i, j in self.index_edges()]

    def edge_set(self) -> set[frozenset[str]]:
        return {frozenset(e) for e in self.edges()}

    def subgraph(self, nodes: Iterable[str]) -> "Graph":
        """Induced subgraph; node order follows this graph's order."""
        keep = sorted({self.idx(u) for u in nodes})
        remap = {old: new for new, old in enumerate(keep)}
        adj = [{remap[j] for j in self._adj[i] if j in remap} for i in keep]
        return Graph([self._labels[i] for i in keep], adj)

    def with_index_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Same node set, new edge set given by index pairs."""
        adj: list[set[int]] = [set() for _ in self._labels]
        for i, j in edges:
            adj[i].add(j)
            adj[j].add(i)
        return Graph(self._labels, adj)

    def csr(self) -> csr_matrix:
        n = self.n_nodes
        rows = np.repeat(np.arange(n), [len(a) for a in self._adj])
        cols = np.fromiter((j for a in self._adj for j in a), dtype=np.int64, count=len(rows))
        return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


# -- edge-list I/O ---------------------------------------------------------

@dataclass
class LoadSummary:
    lines: int = 0
    self_loops: int = 0
    duplicates: int = 0


def load_edge_list(source: IO | bytes | str, summary: LoadSummary | None = None) -> Graph:
    """Parse a whitespace-separated edge list.

    ``source`` may be a binary or text stream, raw bytes, or a path.
    Blank lines and lines starting with '#' are skipped.
    """
    if isinstance(source, bytes):
        stream: IO = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = open(source, encoding="utf-8")
    else:
        stream = source
    summary = summary if summary is not None else LoadSummary()
    edges = []
    seen: set[frozenset] = set()
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
            text = line.strip()
            summary.lines = lineno
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListParseError(lineno, text)
            u, v = parts
            if u == v:
                summary.self_loops += 1
                continue
            key = frozenset((u, v))
            if key in seen:
                summary.duplicates += 1
                continue
            seen.add(key)
            edges.append((u, v))
    finally:
        if isinstance(source, str):
            stream.close()
    if summary.self_loops or summary.duplicates:
        log.info("normalized edge list: %d self-loops, %d duplicate edges dropped",
                 summary.self_loops, summary.duplicates)
    return Graph.from_edges(edges)


def dump_edge_list(g: Graph, stream: IO[str] | None = None) -> str:
    """Serialize edges one per line. Isolated nodes are not representable."""
    out = io.StringIO()
    for u, v in g.edges():
        out.write(f"{u} {v}\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump_edge_list(g, fh)


# -- metrics ---------------------------------------------------------------

def _triangles_per_node(g: Graph) -> np.ndarray:
    adj = g.adj
    tri = np.zeros(g.n_nodes, dtype=np.int64)
    for i, nbrs in enumerate(adj):
        for j in nbrs:
            if j > i:
                for k in nbrs & adj[j]:
                    if k > j:
                        tri[i] += 1
                        tri[j] += 1
                        tri[k] += 1
    return tri


def triangles(g: Graph) -> np.ndarray:
    """Number of triangles through each node, indexed like ``g.labels``."""
    return _triangles_per_node(g)


def local_clustering(g: Graph) -> np.ndarray:
    deg = g.degrees()
    tri = _triangles_per_node(g)
    out = np.zeros(g.n_nodes)
    ok = deg >= 2
    out[ok] = 2.0 * tri[ok] / (deg[ok] * (deg[ok] - 1))
    return out


def density(g: Graph) -> float:
    n = g.n_nodes
    if n < 2:
        raise UndefinedMetricError("density", "fewer than 2 nodes")
    return 2.0 * g.n_edges / (n * (n - 1))


def transitivity(g: Graph) -> float:
    deg = g.degrees()
    triples = int((deg * (deg - 1) // 2).sum())
    if triples == 0:
        raise UndefinedMetricError("transitivity", "no connected triples")
    n_tri = int(_triangles_per_node(g).sum()) // 3
    return 3.0 * n_tri / triples


def avg_clustering(g: Graph) -> float:
    if g.n_nodes == 0:
        return 0.0
    return float(local_clustering(g).mean())


def degree_assortativity(g: Graph) -> float:
    deg = g.degrees().astype(float)
    edges = np.array(g.index_edges(), dtype=np.int64).reshape(-1, 2)
    if len(edges) == 0:
        raise UndefinedMetricError("assortativity", "no edges")
    x = np.concatenate([deg[edges[:, 0]], deg[edges[:, 1]]])
    y = np.concatenate([deg[edges[:, 1]], deg[edges[:, 0]]])
    x = x - x.mean()
    y = y - y.mean()
    sxx = float((x * x).sum())
    if sxx == 0.0:
        raise UndefinedMetricError("assortativity", "zero degree variance over edges")
    return float((x * y).sum() / np.sqrt(sxx * (y * y).sum()))


def distance_rows(g: Graph, roots: Sequence[int] | None = None, chunk: int = 512):
    """Yield ``(roots_chunk, dist)`` blocks of BFS distances (inf if unreachable)."""
    a = g.csr()
    roots = np.arange(g.n_nodes) if roots is None else np.asarray(roots)
    for s in range(0, len(roots), chunk):
        block = roots[s:s + chunk]
        yield block, shortest_path(a, method="D", unweighted=True, directed=False, indices=block)


def avg_path_length(g: Graph) -> float:
    """Mean shortest-path length over connected unordered pairs."""
    total = 0.0
    pairs = 0
    for _, dist in distance_rows(g):
        finite = np.isfinite(dist) & (dist > 0)
        total += float(dist[finite].sum())
        pairs += int(finite.sum())
    if pairs == 0:
        raise UndefinedMetricError("avg_path_length", "no reachable node pair")
    return total / pairs


def degree_one_pct(g: Graph) -> float:
    if g.n_nodes == 0:
        raise UndefinedMetricError("degree_one_pct", "empty graph")
    return 100.0 * float((g.degrees() == 1).sum()) / g.n_nodes


@dataclass
class GraphMetrics:
    n_nodes: int
    n_edges: int
    density: float | None
    transitivity: float | None
    avg_clustering: float | None
    assortativity: float | None
    avg_path_length: float | None
    degree1_pct: float | None
    undefined: dict[str, str]

    def to_dict(self) -> dict:
        return asdict(self)


_METRICS = {
    "density": density,
    "transitivity": transitivity,
    "avg_clustering": avg_clustering,
    "assortativity": degree_assortativity,
    "avg_path_length": avg_path_length,
    "degree1_pct": degree_one_pct,
}


def graph_metrics(g: Graph) -> GraphMetrics:
    """All dataset metrics; undefined ones become None with a reason."""
    values: dict[str, float | None] = {}
    undefined: dict[str, str] = {}
    for name, fn in _METRICS.items():
        try:
            values[name] = fn(g)
        except UndefinedMetricError as exc:
            values[name] = None
            undefined[name] = exc.reason
    return GraphMetrics(n_nodes=g.n_nodes, n_edges=g.n_edges, undefined=undefined, **values)
