"""D-measure graph dissimilarity (Schieber et al., 2017).

    D(G, H) = w1 * sqrt(JS(mu_G, mu_H) / log 2)
            + w2 * |sqrt(NND(G)) - sqrt(NND(H))|
            + w3 / 2 * (sqrt(JS(a_G, a_H) / log 2) + sqrt(JS(a_Gc, a_Hc) / log 2))

``mu`` is the mean of the per-node distance distributions (distances
1..N-1 plus a final "unreachable" slot), NND the network node dispersion,
``a`` the sorted alpha-centrality distribution and ``Gc`` the complement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .graph import Graph, distance_rows
from .rng import make_rng

DEFAULT_WEIGHTS = (0.45, 0.45, 0.10)
LOG2 = math.log(2.0)


class DissimilarityParameterError(ValueError):
    pass


@dataclass(frozen=True)
class DissimilarityScore:
    d: float
    components: tuple[float, float, float]
    approx: bool = False
    roots_sampled: int | None = None

    def to_dict(self) -> dict:
        return {"d": self.d, "components": list(self.components),
                "approx": self.approx, "roots_sampled": self.roots_sampled}


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def _js(p: np.ndarray, q: np.ndarray) -> float:
    """Jensen-Shannon divergence (nats), written so that p ~ q gives ~0 rather than rounding noise."""
    m = p + q
    nz = m > 0
    p, q, m = p[nz], q[nz], m[nz]
    t = (p - q) / m          # log(2p/m) = log1p(t), log(2q/m) = log1p(-t)
    terms = np.zeros_like(t)
    hp, hq = p > 0, q > 0
    terms[hp] += p[hp] * np.log1p(t[hp])
    terms[hq] += q[hq] * np.log1p(-t[hq])
    return max(0.0, math.fsum(terms.tolist()) / 2)


@dataclass
class _Profile:
    mu: np.ndarray       # slots 1..N-1 then unreachable
    nnd: float
    alpha: np.ndarray    # sorted centralities / N^2, then the residual
    alpha_c: np.ndarray
    approx: bool
    roots: int


def _xlogx_sum(c: np.ndarray) -> float:
    c = c[c > 0].astype(float)
    return math.fsum((c * np.log(c)).tolist())


def _distance_profile(g: Graph, roots) -> tuple[np.ndarray, float]:
    """Mean distance distribution and NND from integer distance counts.

    Sums are exact-rounded (fsum over integer-derived terms), so the result
    does not depend on node order.
    """
    n = g.n_nodes
    if n == 1:
        return np.array([1.0]), 0.0
    counts = np.zeros(n + 1, dtype=np.int64)   # slot n is "unreachable"
    row_terms = []
    n_roots = 0
    for block, dist in distance_rows(g, roots):
        d = np.where(np.isfinite(dist), dist, n).astype(np.int64)
        k = len(block)
        c = np.bincount((np.arange(k)[:, None] * (n + 1) + d).ravel(), minlength=k * (n + 1))
        c = c.reshape(k, n + 1)
        counts += c.sum(axis=0)
        row_terms.extend(_xlogx_sum(row[1:]) for row in c)
        n_roots += k
    counts = counts[1:]
    total = n_roots * (n - 1)
    mu = counts / total
    # J(P_1..P_R) = H(mu) - mean H(P_i) = log R + (sum_i sum c log c - sum C log C) / (R (N-1))
    jsd = math.log(n_roots) + (math.fsum(row_terms) - _xlogx_sum(counts)) / total
    diam_slots = int((counts[:-1] > 0).sum())
    nnd = max(0.0, jsd) / math.log(max(2, diam_slots + 1))
    return mu, nnd


def _alpha_dist(adj_mv, degrees: np.ndarray, n: int, dense) -> np.ndarray:
    """Sorted alpha centralities with exogenous degree/(N-1) and alpha = 1/N."""
    if n == 1:
        return np.array([0.0, 1.0])
    e = degrees / (n - 1)
    if not e.any():
        x = np.zeros(n)
    elif dense is not None:
        x = np.linalg.solve(np.eye(n) - dense / n, e)
        x[degrees == 0] = 0.0    # exact: an isolated row of the system is the identity row
    else:
        op = LinearOperator((n, n), matvec=lambda v: v - adj_mv(v) / n, dtype=float)
        x, info = cg(op, e, rtol=1e-13, atol=0.0, maxiter=10 * n)
        if info != 0:
            raise RuntimeError("alpha-centrality solve did not converge")
        x[degrees == 0] = 0.0
    r = np.sort(x) / (n * n)
    return np.append(r, max(0.0, 1.0 - r.sum()))


def _profile(g: Graph, sample_threshold: int | None, n_roots: int, seed: int,
             dense_limit: int = 2000) -> _Profile:
    n = g.n_nodes
    approx = sample_threshold is not None and n > sample_threshold
    if approx:
        rng = make_rng(seed, "d-measure-roots")
        roots = np.sort(rng.choice(n, size=min(n_roots, n), replace=False))
    else:
        roots = None
    mu, nnd = _distance_profile(g, roots)
    a = g.csr()
    deg = g.degrees().astype(float)
    deg_c = (n - 1) - deg
    if n <= dense_limit:
        ad = a.toarray()
        ac = 1.0 - np.eye(n) - ad
        alpha = _alpha_dist(None, deg, n, ad)
        alpha_c = _alpha_dist(None, deg_c, n, ac)
    else:
        alpha = _alpha_dist(lambda v: a @ v, deg, n, None)
        alpha_c = _alpha_dist(lambda v: v.sum() - v - a @ v, deg_c, n, None)
    return _Profile(mu, nnd, alpha, alpha_c, approx, n if roots is None else len(roots))


def _align(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-pad the shorter vector before its final slot so the last slots line up."""
    if len(p) == len(q):
        return p, q
    if len(p) < len(q):
        q, p = _align(q, p)
        return p, q
    pad = np.zeros(len(p) - len(q))
    return p, np.concatenate([q[:-1], pad, q[-1:]])


def d_measure(g1: Graph, g2: Graph, weights=DEFAULT_WEIGHTS, sample_threshold: int | None = None,
              n_roots: int = 500, seed: int = 0) -> DissimilarityScore:
    """Dissimilarity in [0, 1]; 0 for graphs with identical profiles.

    Above ``sample_threshold`` nodes the distance distributions use
    ``n_roots`` random BFS roots and the score is flagged approximate.
    """
    if g1.n_nodes == 0 or g2.n_nodes == 0:
        raise DissimilarityParameterError("d_measure needs two nonempty graphs")
    w1, w2, w3 = weights
    if min(weights) < 0 or abs(w1 + w2 + w3 - 1.0) > 1e-9:
        raise DissimilarityParameterError(f"weights must be nonnegative and sum to 1, got {weights}")
    p = _profile(g1, sample_threshold, n_roots, seed)
    q = _profile(g2, sample_threshold, n_roots, seed)
    mu_p, mu_q = _align(p.mu, q.mu)
    t1 = math.sqrt(_js(mu_p, mu_q) / LOG2)
    t2 = abs(math.sqrt(p.nnd) - math.sqrt(q.nnd))
    t3 = 0.0
    if w3 > 0:
        a, b = _align(p.alpha, q.alpha)
        ac, bc = _align(p.alpha_c, q.alpha_c)
        t3 = (math.sqrt(_js(a, b) / LOG2) + math.sqrt(_js(ac, bc) / LOG2)) / 2
    d = min(1.0, max(0.0, w1 * t1 + w2 * t2 + w3 * t3))
    approx = p.approx or q.approx
    return DissimilarityScore(d, (t1, t2, t3), approx, max(p.roots, q.roots) if approx else None)
