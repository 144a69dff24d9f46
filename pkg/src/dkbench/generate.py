"""dK-random graph generation by edge rewiring.

All generators work on an *endpoint slot* array: edge ``e`` occupies slots
``2e`` and ``2e+1``.  A double-edge swap takes slot ``s1`` holding ``b``
(edge ``a-b``) and slot ``s2`` holding ``d`` (edge ``c-d``) and exchanges
their contents, giving ``a-d`` and ``c-b``.  Degrees never change.  When
``s2`` is drawn from slots whose node has the same degree as ``b`` the swap
also preserves the joint degree distribution.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from itertools import chain

import numpy as np

from .dkseries import (
    LEVELS,
    cspec_distance,
    extract_1k,
    extract_2k,
    extract_cspec,
    jdd_distance,
    jdd_key,
)
from .graph import Graph
from .rng import make_rng

log = logging.getLogger(__name__)


class GenerationError(RuntimeError):
    pass


class ConvergenceError(GenerationError):
    """Target statistic not reached within the attempt budget."""

    def __init__(self, msg: str, jdd_distance: int | None = None,
                 cspec_distance: float | None = None):
        super().__init__(msg)
        self.jdd_distance = jdd_distance
        self.cspec_distance = cspec_distance


@dataclass
class GenParams:
    level: str = "1K"
    rng_seed: int = 0
    swap_budget_factor: float = 10.0
    max_attempts_factor: float = 500.0
    jdd_tolerance: int = 0
    cspec_tolerance: float = 0.01
    # targeting gives up after stall_factor * |E| attempts without improvement
    stall_factor: float = 100.0
    fallback: bool = True
    debug: bool = False

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.swap_budget_factor <= 0 or self.max_attempts_factor <= 0 or self.stall_factor <= 0:
            raise ValueError("budget factors must be positive")
        if self.jdd_tolerance < 0 or self.cspec_tolerance < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass
class GenResult:
    graph: Graph
    params: GenParams
    status: str = "ok"
    accepted_swaps: int = 0
    attempts: int = 0
    jdd_distance: int | None = None
    cspec_distance: float | None = None
    phases: list[str] = field(default_factory=list)

    def sidecar(self) -> dict:
        return {
            "params": asdict(self.params),
            "status": self.status,
            "accepted_swaps": self.accepted_swaps,
            "attempts": self.attempts,
            "jdd_distance": self.jdd_distance,
            "cspec_distance": self.cspec_distance,
            "phases": self.phases,
            "n_nodes": self.graph.n_nodes,
            "n_edges": self.graph.n_edges,
        }


def _uniforms(rng: np.random.Generator, chunk: int = 8192):
    """Callable returning successive uniform floats, drawn from ``rng`` in chunks."""
    return chain.from_iterable(iter(lambda: rng.random(chunk).tolist(), None)).__next__


class _Rewirer:
    """Mutable working copy of a graph plus optional triangle bookkeeping."""

    def __init__(self, g: Graph, track_triangles: bool = False):
        self.g = g
        self.adj = [set(a) for a in g.adj]
        self.deg = [len(a) for a in self.adj]
        self.ends: list[int] = []
        self.eid: dict[tuple[int, int], int] = {}
        for e, (i, j) in enumerate(g.index_edges()):
            self.ends += [i, j]
            self.eid[(i, j)] = e
        self.n_slots = len(self.ends)
        by_deg: dict[int, list[int]] = {}
        for s, u in enumerate(self.ends):
            by_deg.setdefault(self.deg[u], []).append(s)
        self.slots_by_deg = by_deg
        self.tri: list[int] | None = None
        if track_triangles:
            self._init_triangles()

    # -- bookkeeping -------------------------------------------------------

    def _init_triangles(self):
        adj = self.adj
        tri = [0] * len(adj)
        for i, nbrs in enumerate(adj):
            for j in nbrs:
                if j > i:
                    for k in nbrs & adj[j]:
                        if k > j:
                            tri[i] += 1
                            tri[j] += 1
                            tri[k] += 1
        self.tri = tri

    def can_swap(self, s1: int, s2: int) -> bool:
        if s1 >> 1 == s2 >> 1:
            return False
        ends = self.ends
        b, a = ends[s1], ends[s1 ^ 1]
        d, c = ends[s2], ends[s2 ^ 1]
        return a != d and c != b and d not in self.adj[a] and b not in self.adj[c]

    def tri_delta(self, s1: int, s2: int) -> dict[int, int]:
        """Per-node triangle change the swap would cause, without applying it.

        Valid for swaps accepted by ``can_swap`` (four distinct endpoints).
        """
        ends, adj = self.ends, self.adj
        b, a = ends[s1], ends[s1 ^ 1]
        d, c = ends[s2], ends[s2 ^ 1]
        dtri: dict[int, int] = {}
        get = dtri.get
        for x, y, common, sign in (
            (a, b, adj[a] & adj[b], -1),
            (c, d, adj[c] & adj[d], -1),
            (a, d, (adj[a] & adj[d]) - {b, c}, 1),
            (c, b, (adj[c] & adj[b]) - {a, d}, 1),
        ):
            if common:
                k = sign * len(common)
                dtri[x] = get(x, 0) + k
                dtri[y] = get(y, 0) + k
                for z in common:
                    dtri[z] = get(z, 0) + sign
        return dtri

    def swap(self, s1: int, s2: int, dtri: dict[int, int] | None = None) -> dict[int, int] | None:
        """Exchange slot contents; returns per-node triangle deltas if tracked."""
        if self.tri is not None:
            if dtri is None:
                dtri = self.tri_delta(s1, s2)
            tri = self.tri
            for u, dt in dtri.items():
                tri[u] += dt
        ends, adj, eid = self.ends, self.adj, self.eid
        b, a = ends[s1], ends[s1 ^ 1]
        d, c = ends[s2], ends[s2 ^ 1]
        adj[a].discard(b)
        adj[b].discard(a)
        adj[c].discard(d)
        adj[d].discard(c)
        adj[a].add(d)
        adj[d].add(a)
        adj[c].add(b)
        adj[b].add(c)
        ends[s1] = d
        ends[s2] = b
        del eid[(a, b) if a < b else (b, a)]
        del eid[(c, d) if c < d else (d, c)]
        eid[(a, d) if a < d else (d, a)] = s1 >> 1
        eid[(c, b) if c < b else (b, c)] = s2 >> 1
        return dtri

    def slot_of(self, holder: int, other: int) -> int:
        """Slot holding ``holder`` on edge ``holder-other``."""
        e = self.eid[(holder, other) if holder < other else (other, holder)]
        return 2 * e if self.ends[2 * e] == holder else 2 * e + 1

    def graph(self) -> Graph:
        ends = self.ends
        return self.g.with_index_edges((ends[2 * e], ends[2 * e + 1])
                                       for e in range(self.n_slots // 2))

    def check_degrees(self, target: list[int]):
        if [len(a) for a in self.adj] != target:
            raise AssertionError("degree sequence changed by a swap")

    # -- proposals ----------------------------------------------------------

    def propose_any(self, rand) -> tuple[int, int] | None:
        """Two uniform slots, or None if the swap would be invalid."""
        n, ends, adj = self.n_slots, self.ends, self.adj
        s1 = int(rand() * n)
        s2 = int(rand() * n)
        if s1 >> 1 == s2 >> 1:
            return None
        b, a, d, c = ends[s1], ends[s1 ^ 1], ends[s2], ends[s2 ^ 1]
        if a == d or c == b or d in adj[a] or b in adj[c]:
            return None
        return s1, s2

    def propose_same_degree(self, rand) -> tuple[int, int] | None:
        """Like ``propose_any`` but the second slot holds a node of equal degree."""
        ends, adj = self.ends, self.adj
        s1 = int(rand() * self.n_slots)
        b = ends[s1]
        group = self.slots_by_deg[self.deg[b]]
        s2 = group[int(rand() * len(group))]
        if s1 >> 1 == s2 >> 1:
            return None
        a, d, c = ends[s1 ^ 1], ends[s2], ends[s2 ^ 1]
        if a == d or c == b or d in adj[a] or b in adj[c]:
            return None
        return s1, s2

    def propose_close_wedge(self, rand) -> tuple[int, int] | None:
        """A same-degree swap that creates edge x-y for a random open wedge x-u-y."""
        ends, adj, deg = self.ends, self.adj, self.deg
        u = ends[int(rand() * self.n_slots)]
        if deg[u] < 2:
            return None
        nbrs = list(adj[u])
        i = int(rand() * len(nbrs))
        j = int(rand() * (len(nbrs) - 1))
        if j >= i:
            j += 1
        x, y = nbrs[i], nbrs[j]
        if y in adj[x]:
            return None
        ky = deg[y]
        cand_p = [p for p in adj[x] if deg[p] == ky and p != y]
        if not cand_p:
            return None
        p = cand_p[int(rand() * len(cand_p))]
        cand_q = [q for q in adj[y] if q != x and q != p and q not in adj[p]]
        if not cand_q:
            return None
        q = cand_q[int(rand() * len(cand_q))]
        return self.slot_of(p, x), self.slot_of(y, q)


# -- clustering-spectrum tracker -----------------------------------------------

class _CspecTracker:
    """Incremental degree-weighted L1 distance to a target clustering spectrum."""

    def __init__(self, rw: _Rewirer, target: dict[int, float]):
        self.rw = rw
        deg = rw.deg
        n = len(deg)
        counts = Counter(deg)
        self.weight = {k: counts[k] / n for k in counts if k >= 2}
        self.norm = {k: 2.0 / (counts[k] * k * (k - 1)) for k in counts if k >= 2}
        self.target = {k: target.get(k, 0.0) for k in self.weight}
        self.extra = sum(v for k, v in target.items() if k not in self.weight)
        tsum: Counter = Counter()
        for u, t in enumerate(rw.tri):
            if deg[u] >= 2:
                tsum[deg[u]] += t
        self.tsum = {k: tsum.get(k, 0) for k in self.weight}
        self.terms = {k: self._term(k, self.tsum.get(k, 0)) for k in self.weight}
        self.distance = sum(self.terms.values()) + self.extra

    def _term(self, k: int, tsum: int) -> float:
        return self.weight[k] * abs(self.norm[k] * tsum - self.target[k])

    def delta(self, dtri: dict[int, int]) -> tuple[float, dict[int, int]]:
        # any node whose triangle count changes has degree >= 2
        deg = self.rw.deg
        dk: dict[int, int] = {}
        for u, dt in dtri.items():
            if dt:
                k = deg[u]
                dk[k] = dk.get(k, 0) + dt
        weight, norm, target, tsum, terms = self.weight, self.norm, self.target, self.tsum, self.terms
        change = 0.0
        for k, dt in dk.items():
            if dt:
                change += weight[k] * abs(norm[k] * (tsum[k] + dt) - target[k]) - terms[k]
        return change, dk

    def commit(self, dk: dict[int, int]):
        for k, dt in dk.items():
            self.tsum[k] += dt
            self.terms[k] = self._term(k, self.tsum[k])
        self.distance = sum(self.terms.values()) + self.extra

    def below_target(self) -> bool:
        return sum(self.weight[k] * (self.norm[k] * self.tsum.get(k, 0) - self.target[k])
                   for k in self.weight) < 0


# -- generators ---------------------------------------------------------------

def _require_edges(g: Graph):
    if g.n_edges < 2:
        raise GenerationError(f"need at least 2 edges to rewire, got {g.n_edges}")


def _mix(rw: _Rewirer, rand, accepted_target: int, max_attempts: int, same_degree: bool,
         accept=None, debug_deg: list[int] | None = None) -> tuple[int, int]:
    """Run swaps until ``accepted_target`` are accepted or attempts run out.

    ``accept(dtri)`` sees the triangle change of a candidate swap and may
    veto it; it is only consulted when triangles are tracked.
    """
    propose = rw.propose_same_degree if same_degree else rw.propose_any
    tracked = rw.tri is not None
    accepted = attempts = 0
    while accepted < accepted_target and attempts < max_attempts:
        attempts += 1
        prop = propose(rand)
        if prop is None:
            continue
        s1, s2 = prop
        if tracked:
            dtri = rw.tri_delta(s1, s2)
            if accept is not None and not accept(dtri):
                continue
            rw.swap(s1, s2, dtri)
        else:
            rw.swap(s1, s2)
        accepted += 1
        if debug_deg is not None:
            rw.check_degrees(debug_deg)
    return accepted, attempts


def _budget(g: Graph, p: GenParams) -> tuple[int, int]:
    m = g.n_edges
    return max(1, int(round(p.swap_budget_factor * m))), max(1, int(round(p.max_attempts_factor * m)))


def _run_1k(g: Graph, p: GenParams, rng: np.random.Generator) -> GenResult:
    rw = _Rewirer(g)
    target, max_attempts = _budget(g, p)
    debug_deg = list(rw.deg) if p.debug else None
    accepted, attempts = _mix(rw, _uniforms(rng), target, max_attempts, same_degree=False,
                              debug_deg=debug_deg)
    out = rw.graph()
    status = "ok"
    if accepted < target:
        status = "warning"
        log.warning("1K rewiring reached %d of %d swaps in %d attempts", accepted, target, attempts)
    if extract_1k(out) != extract_1k(g):
        raise AssertionError("1K statistics changed")
    return GenResult(out, p, status, accepted, attempts, phases=["1k-rewire"])


def _target_jdd(rw: _Rewirer, target: dict, rand, p: GenParams, max_attempts: int,
                debug_deg: list[int] | None) -> tuple[int, int, int]:
    """Zero-temperature descent on JDD L1 distance with degree-preserving swaps.

    Distance-increasing swaps are rejected, neutral and improving ones kept.
    Returns ``(final distance, accepted, attempts)``.
    """
    deg, ends = rw.deg, rw.ends
    cur: dict[tuple[int, int], int] = {}
    for e in range(rw.n_slots // 2):
        k = jdd_key(deg[ends[2 * e]], deg[ends[2 * e + 1]])
        cur[k] = cur.get(k, 0) + 1
    dist = jdd_distance(cur, target)
    tget, cget = target.get, cur.get
    stall_limit = max(1000, int(p.stall_factor * (rw.n_slots // 2)))
    propose = rw.propose_any
    accepted = attempts = since_improve = 0
    while dist > p.jdd_tolerance and attempts < max_attempts and since_improve < stall_limit:
        attempts += 1
        since_improve += 1
        prop = propose(rand)
        if prop is None:
            continue
        s1, s2 = prop
        da, db = deg[ends[s1 ^ 1]], deg[ends[s1]]
        dc, dd = deg[ends[s2 ^ 1]], deg[ends[s2]]
        if db == dd:
            # same endpoint degrees: the joint degree distribution is unchanged
            rw.swap(s1, s2)
            accepted += 1
            continue
        ch: dict[tuple[int, int], int] = {}
        for k, v in ((jdd_key(da, db), -1), (jdd_key(dc, dd), -1),
                     (jdd_key(da, dd), 1), (jdd_key(dc, db), 1)):
            ch[k] = ch.get(k, 0) + v
        delta = 0
        for k, v in ch.items():
            if v:
                c0 = cget(k, 0) - tget(k, 0)
                delta += abs(c0 + v) - abs(c0)
        if delta > 0:
            continue
        rw.swap(s1, s2)
        accepted += 1
        for k, v in ch.items():
            cur[k] = cget(k, 0) + v
        if delta < 0:
            dist += delta
            since_improve = 0
        if debug_deg is not None:
            rw.check_degrees(debug_deg)
    return dist, accepted, attempts


def _run_2k(g: Graph, p: GenParams, rng: np.random.Generator):
    target = extract_2k(g)
    start = _run_1k(g, p, rng)
    rw = _Rewirer(start.graph)
    rand = _uniforms(rng)
    debug_deg = list(rw.deg) if p.debug else None
    budget, max_attempts = _budget(g, p)
    dist, acc, att = _target_jdd(rw, target, rand, p, max_attempts, debug_deg)
    phases = start.phases + ["2k-target"]
    status = "ok"
    accepted, attempts = start.accepted_swaps + acc, start.attempts + att
    if dist > p.jdd_tolerance:
        if not p.fallback:
            raise ConvergenceError(f"2K targeting stalled at JDD distance {dist}", jdd_distance=dist)
        log.info("2K targeting stalled at distance %d; falling back to 2K-preserving rewiring", dist)
        rw = _Rewirer(g)
        status = "fallback"
        phases.append("2k-fallback")
    else:
        # free swaps moved nodes between slots; same-degree proposals need a fresh index
        rw = _Rewirer(rw.graph())
    acc, att = _mix(rw, rand, budget, max_attempts, same_degree=True, debug_deg=debug_deg)
    phases.append("2k-mix")
    out = rw.graph()
    final = jdd_distance(extract_2k(out), target)
    if final > p.jdd_tolerance:
        raise ConvergenceError(f"JDD distance {final} above tolerance", jdd_distance=final)
    res = GenResult(out, p, status, accepted + acc, attempts + att, jdd_distance=final, phases=phases)
    return res, rw


def _run_25k(g: Graph, p: GenParams, rng: np.random.Generator) -> GenResult:
    target = extract_cspec(g)
    dd = extract_1k(g)
    base, _ = _run_2k(g, p, rng)
    rw = _Rewirer(base.graph, track_triangles=True)
    rand = _uniforms(rng)
    debug_deg = list(rw.deg) if p.debug else None
    budget, max_attempts = _budget(g, p)
    m = g.n_edges
    stall_limit = max(1000, int(p.stall_factor * m))
    tracker = _CspecTracker(rw, target)
    tol = p.cspec_tolerance
    accepted = attempts = since_improve = 0
    best = tracker.distance
    # Add triangles by closing open wedges while clustering is below target;
    # otherwise random same-degree swaps break surplus triangles.  A move is
    # kept only if it does not increase the distance.
    while tracker.distance > tol and attempts < max_attempts and since_improve < stall_limit:
        attempts += 1
        since_improve += 1
        if rand() < 0.5 and tracker.below_target():
            prop = rw.propose_close_wedge(rand)
            if prop is None:
                continue
        else:
            prop = rw.propose_same_degree(rand)
            if prop is None:
                continue
        s1, s2 = prop
        if not rw.can_swap(s1, s2):
            continue
        dtri = rw.tri_delta(s1, s2)
        change, dk = tracker.delta(dtri)
        if change > 1e-15:
            continue
        rw.swap(s1, s2, dtri)
        tracker.commit(dk)
        accepted += 1
        if tracker.distance < best - 1e-15:
            best = tracker.distance
            since_improve = 0
        if debug_deg is not None:
            rw.check_degrees(debug_deg)
    phases = base.phases + ["2.5k-target"]
    status = base.status
    if tracker.distance > tol:
        if not p.fallback:
            raise ConvergenceError(
                f"clustering target not reached (distance {tracker.distance:.4g})",
                jdd_distance=base.jdd_distance, cspec_distance=tracker.distance)
        log.info("2.5K targeting stalled at %.4g; rewiring from the source graph", tracker.distance)
        rw = _Rewirer(g, track_triangles=True)
        tracker = _CspecTracker(rw, target)
        status = "fallback"
        phases.append("2.5k-fallback")

    def within(dtri):
        change, dk = tracker.delta(dtri)
        if tracker.distance + change > tol:
            return False
        tracker.commit(dk)
        return True

    acc, att = _mix(rw, rand, budget, max_attempts, same_degree=True, accept=within,
                    debug_deg=debug_deg)
    phases.append("2.5k-mix")
    out = rw.graph()
    jd = jdd_distance(extract_2k(out), extract_2k(g))
    cd = cspec_distance(extract_cspec(out), target, dd)
    if jd > p.jdd_tolerance or cd > tol + 1e-12:
        raise ConvergenceError("2.5K statistics drifted outside tolerance", jd, cd)
    return GenResult(out, p, status, base.accepted_swaps + accepted + acc,
                     base.attempts + attempts + att, jdd_distance=jd, cspec_distance=cd,
                     phases=phases)


def generate(g: Graph, p: GenParams) -> GenResult:
    """Generate one dK-random graph on the node set of ``g``."""
    _require_edges(g)
    rng = make_rng(p.rng_seed, "dk-generate", p.level)
    if p.level == "1K":
        return _run_1k(g, p, rng)
    if p.level == "2K":
        return _run_2k(g, p, rng)[0]
    return _run_25k(g, p, rng)


def _with_level(p: GenParams | None, level: str) -> GenParams:
    if p is None:
        return GenParams(level=level)
    d = asdict(p)
    d["level"] = level
    return GenParams(**d)


def generate_1k(g: Graph, p: GenParams | None = None) -> Graph:
    return generate(g, _with_level(p, "1K")).graph


def generate_2k(g: Graph, p: GenParams | None = None) -> Graph:
    return generate(g, _with_level(p, "2K")).graph


def generate_25k(g: Graph, p: GenParams | None = None) -> Graph:
    return generate(g, _with_level(p, "2.5K")).graph


def instance_filename(dataset: str, level: str, seed: int) -> str:
    return f"{dataset}.{level}.{seed}.edges"


def write_instance(res: GenResult, out_dir, dataset: str) -> tuple[str, str]:
    """Write ``<dataset>.<level>.<seed>.edges`` and its ``.json`` sidecar."""
    import os

    from .graph import save_edge_list

    path = os.path.join(out_dir, instance_filename(dataset, res.params.level, res.params.rng_seed))
    save_edge_list(res.graph, path)
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(res.sidecar(), fh, indent=1)
    return path, path + ".json"
