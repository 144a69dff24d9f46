"""Binned neighbourhood-degree-distribution (NDD) node signatures.

Bin ``i`` (0-based) of width ``b`` counts neighbours whose degree ``d``
satisfies ``i*b < d <= (i+1)*b``; degrees above ``B*b`` land in the last
bin.  With ``b=2`` the bins read "1-2", "3-4", ...
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph

BIN_SIZE = 50
NUM_BINS = 21
FEATURE_LAYOUTS = ("concat+absdiff", "absdiff", "concat")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class NodeSignature:
    vec: np.ndarray
    bin_size: int = BIN_SIZE
    num_bins: int = NUM_BINS

    def hop(self, q: int) -> np.ndarray:
        B = self.num_bins
        return self.vec[(q - 1) * B:q * B]


def ndd(g: Graph, u: str, q: int) -> dict[int, int]:
    """Degree histogram of the nodes at shortest-path distance exactly ``q`` from ``u``."""
    if q not in (1, 2):
        raise SignatureError(f"hop must be 1 or 2, got {q}")
    i = g.idx(u)
    adj = g.adj
    ring = set(adj[i])
    if q == 2:
        two = set()
        for v in ring:
            two |= adj[v]
        ring = two - ring - {i}
    out: dict[int, int] = {}
    for v in ring:
        k = len(adj[v])
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def bin_index(degree, b: int, B: int):
    """Bin of a degree (scalar or array); degree 0 maps to bin 0."""
    d = np.asarray(degree)
    return np.minimum(np.maximum(d - 1, 0) // b, B - 1)


def bin_ndd(raw: dict[int, int], b: int = BIN_SIZE, B: int = NUM_BINS) -> np.ndarray:
    if b < 1 or B < 1:
        raise SignatureError("bin size and bin count must be positive")
    out = np.zeros(B, dtype=np.int64)
    for d, c in raw.items():
        out[int(bin_index(d, b, B))] += c
    return out


def node_signature(g: Graph, u: str, b: int = BIN_SIZE, B: int = NUM_BINS) -> NodeSignature:
    vec = np.concatenate([bin_ndd(ndd(g, u, 1), b, B), bin_ndd(ndd(g, u, 2), b, B)])
    return NodeSignature(vec, b, B)


def signature_matrix(g: Graph, b: int = BIN_SIZE, B: int = NUM_BINS) -> np.ndarray:
    """Signatures of every node as rows of an ``(n, 2B)`` integer array."""
    n = g.n_nodes
    if n == 0:
        return np.zeros((0, 2 * B), dtype=np.int64)
    a = g.csr().astype(np.int64)
    onehot = sp.csr_matrix((np.ones(n, dtype=np.int64), (np.arange(n), bin_index(g.degrees(), b, B))),
                           shape=(n, B))
    hop1 = a @ onehot
    reach = (a @ a).astype(bool).astype(np.int64)
    reach = reach - reach.multiply(a) - sp.diags(reach.diagonal())
    reach.eliminate_zeros()
    hop2 = reach @ onehot
    return np.hstack([hop1.toarray(), hop2.toarray()]).astype(np.int64)


def pair_features(sig_san, sig_aux, layout: str = "concat+absdiff") -> np.ndarray:
    """Feature vector for a (sanitized node, auxiliary node) pair.

    Accepts two NodeSignatures, or two ``(m, 2B)`` arrays for a batch.
    """
    if isinstance(sig_san, NodeSignature) or isinstance(sig_aux, NodeSignature):
        if (sig_san.bin_size, sig_san.num_bins) != (sig_aux.bin_size, sig_aux.num_bins):
            raise SignatureError("signatures use different binning")
        x, y = sig_san.vec, sig_aux.vec
    else:
        x, y = np.asarray(sig_san), np.asarray(sig_aux)
        if x.shape != y.shape:
            raise SignatureError(f"signature shapes differ: {x.shape} vs {y.shape}")
    x = x.astype(float)
    y = y.astype(float)
    if layout == "concat+absdiff":
        return np.concatenate([x, y, np.abs(x - y)], axis=-1)
    if layout == "absdiff":
        return np.abs(x - y)
    if layout == "concat":
        return np.concatenate([x, y], axis=-1)
    raise SignatureError(f"unknown feature layout {layout!r}")
