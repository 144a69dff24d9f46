"""Split a graph into two induced subgraphs that share an overlap node set."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .graph import Graph, save_edge_list
from .rng import make_rng

STRATEGIES = ("R", "HD", "BFS-R", "BFS-HD")


class SplitParameterError(ValueError):
    pass


@dataclass
class OverlapSplit:
    g1: Graph
    g2: Graph
    v_alpha: frozenset[str]
    strategy: str
    alpha: float
    bfs_restarts: int = 0

    def jaccard(self) -> float:
        v1, v2 = set(self.g1.labels), set(self.g2.labels)
        return len(v1 & v2) / len(v1 | v2)

    def manifest(self) -> dict:
        return {
            "strategy": self.strategy,
            "alpha": self.alpha,
            "v_alpha": sorted(self.v_alpha),
            "n1": self.g1.n_nodes,
            "n2": self.g2.n_nodes,
            "jaccard": self.jaccard(),
            "bfs_restarts": self.bfs_restarts,
        }

    def write(self, out_dir, stem: str) -> None:
        """Two edge lists plus ``<stem>.split.json``."""
        import os

        save_edge_list(self.g1, os.path.join(out_dir, f"{stem}.g1.edges"))
        save_edge_list(self.g2, os.path.join(out_dir, f"{stem}.g2.edges"))
        with open(os.path.join(out_dir, f"{stem}.split.json"), "w", encoding="utf-8") as fh:
            json.dump(self.manifest(), fh, indent=1)


def _check_strategy(strategy: str):
    if strategy not in STRATEGIES:
        raise SplitParameterError(f"unknown overlap strategy {strategy!r}; expected one of {STRATEGIES}")


def _by_degree(g: Graph) -> list[int]:
    """Node indices by degree descending, ties by label ascending."""
    lab, adj = g.labels, g.adj
    return sorted(range(g.n_nodes), key=lambda i: (-len(adj[i]), lab[i]))


def _bfs_order(g: Graph, size: int, next_root) -> tuple[list[int], int]:
    lab, adj = g.labels, g.adj
    seen = [False] * g.n_nodes
    order: list[int] = []
    restarts = -1
    while len(order) < size:
        root = next_root(seen)
        restarts += 1
        seen[root] = True
        queue = deque([root])
        while queue and len(order) < size:
            u = queue.popleft()
            order.append(u)
            for v in sorted(adj[u], key=lab.__getitem__):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return order, restarts


def overlap_order_idx(g: Graph, strategy: str, size: int, seed: int) -> tuple[list[int], int]:
    """Ordered overlap node indices and the number of BFS restarts used."""
    _check_strategy(strategy)
    n = g.n_nodes
    if not 1 <= size <= n:
        raise SplitParameterError(f"overlap size {size} outside [1, {n}]")
    rng = make_rng(seed, "overlap", strategy)
    if strategy == "R":
        return [int(i) for i in rng.choice(n, size=size, replace=False)], 0
    if strategy == "HD":
        return _by_degree(g)[:size], 0
    if strategy == "BFS-HD":
        ranked = _by_degree(g)
        pos = [0]

        def next_root(seen):
            while seen[ranked[pos[0]]]:
                pos[0] += 1
            return ranked[pos[0]]
    else:
        def next_root(seen):
            free = [i for i in range(n) if not seen[i]]
            return free[int(rng.integers(len(free)))]
    return _bfs_order(g, size, next_root)


def overlap_order(g: Graph, strategy: str, size: int, seed: int = 0) -> list[str]:
    order, _ = overlap_order_idx(g, strategy, size, seed)
    return [g.labels[i] for i in order]


def overlap_size(n: int, alpha: float) -> int:
    return int(math.floor(alpha * n + 0.5))


def split(g: Graph, alpha: float = 0.2, strategy: str = "R", seed: int = 0) -> OverlapSplit:
    """Build V_alpha with ``strategy`` and share the rest evenly between g1 and g2.

    |V_alpha| = round(alpha |V|); the remaining nodes are shuffled and cut in
    half (g1 gets the extra node when the count is odd).
    """
    _check_strategy(strategy)
    if not 0 < alpha <= 1:
        raise SplitParameterError(f"alpha must be in (0, 1], got {alpha}")
    n = g.n_nodes
    if n < 3:
        raise SplitParameterError(f"graph too small to split ({n} nodes)")
    size = overlap_size(n, alpha)
    if size < 1:
        raise SplitParameterError(f"alpha={alpha} leaves an empty overlap on {n} nodes")
    order, restarts = overlap_order_idx(g, strategy, size, seed)
    shared = set(order)
    rest = [i for i in range(n) if i not in shared]
    rng = make_rng(seed, "overlap-remainder", strategy)
    rng.shuffle(rest)
    half = (len(rest) + 1) // 2
    lab = g.labels
    v_alpha = [lab[i] for i in order]
    g1 = g.subgraph(v_alpha + [lab[i] for i in rest[:half]])
    g2 = g.subgraph(v_alpha + [lab[i] for i in rest[half:]])
    return OverlapSplit(g1, g2, frozenset(v_alpha), strategy, alpha, restarts)
