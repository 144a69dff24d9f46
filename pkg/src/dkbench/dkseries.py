"""dK-series statistics: average degree, degree distribution, joint degree
distribution and the degree-dependent clustering spectrum."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .graph import Graph, UndefinedMetricError, local_clustering

LEVELS = ("1K", "2K", "2.5K")


def extract_0k(g: Graph) -> float:
    if g.n_nodes == 0:
        raise UndefinedMetricError("average degree", "empty graph")
    return 2.0 * g.n_edges / g.n_nodes


def extract_1k(g: Graph) -> dict[int, int]:
    return dict(sorted(Counter(len(a) for a in g.adj).items()))


def jdd_key(k1: int, k2: int) -> tuple[int, int]:
    return (k1, k2) if k1 <= k2 else (k2, k1)


def extract_2k(g: Graph) -> dict[tuple[int, int], int]:
    """Edge counts keyed by the sorted degree pair of their endpoints."""
    adj = g.adj
    jdd: Counter = Counter()
    for i, j in g.index_edges():
        jdd[jdd_key(len(adj[i]), len(adj[j]))] += 1
    return dict(sorted(jdd.items()))


def jdd_marginal(jdd: dict[tuple[int, int], int]) -> dict[int, int]:
    """Degree-k endpoint count per k. Divided by k this recovers the 1K counts."""
    ends: Counter = Counter()
    for (k1, k2), c in jdd.items():
        ends[k1] += c
        ends[k2] += c  # a {k,k} edge has two degree-k endpoints
    return dict(sorted(ends.items()))


def extract_cspec(g: Graph) -> dict[int, float]:
    """Mean local clustering per degree, for degrees k >= 2 that occur."""
    cc = local_clustering(g)
    sums: dict[int, float] = {}
    counts: Counter = Counter()
    for i, a in enumerate(g.adj):
        k = len(a)
        if k >= 2:
            sums[k] = sums.get(k, 0.0) + float(cc[i])
            counts[k] += 1
    return {k: sums[k] / counts[k] for k in sorted(sums)}


def jdd_distance(a: dict, b: dict) -> int:
    return int(sum(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)))


def cspec_distance(a: dict[int, float], b: dict[int, float], dd: dict[int, int]) -> float:
    """Degree-weighted L1 between clustering spectra; weights are node fractions."""
    n = sum(dd.values())
    if n == 0:
        return 0.0
    return float(sum(dd.get(k, 0) / n * abs(a.get(k, 0.0) - b.get(k, 0.0))
                     for k in set(a) | set(b)))


@dataclass
class DkTarget:
    level: str
    dd: dict[int, int]
    jdd: dict[tuple[int, int], int] = field(default_factory=dict)
    cspec: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown dK level {self.level!r}")
        if self.jdd:
            marg = jdd_marginal(self.jdd)
            expect = {k: k * c for k, c in self.dd.items() if k > 0}
            if marg != expect:
                raise ValueError("joint degree distribution inconsistent with degree distribution")

    @classmethod
    def from_graph(cls, g: Graph, level: str) -> "DkTarget":
        jdd = extract_2k(g) if level in ("2K", "2.5K") else {}
        cspec = extract_cspec(g) if level == "2.5K" else {}
        return cls(level, extract_1k(g), jdd, cspec)

    def to_json(self) -> str:
        return json.dumps({
            "level": self.level,
            "dd": [[k, c] for k, c in sorted(self.dd.items())],
            "jdd": [[k1, k2, c] for (k1, k2), c in sorted(self.jdd.items())],
            "cspec": [[k, v] for k, v in sorted(self.cspec.items())],
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DkTarget":
        doc = json.loads(text)
        return cls(
            doc["level"],
            {int(k): int(c) for k, c in doc["dd"]},
            {(int(a), int(b)): int(c) for a, b, c in doc["jdd"]},
            {int(k): float(v) for k, v in doc["cspec"]},
        )
