"""Labeled (sanitized node, auxiliary node) pairs.

A pair is *identical* when both nodes carry the same identifier.  The
cross product is never materialized as feature vectors: a
:class:`PairPopulation` keeps the two signature matrices and addresses a
pair by its flat index ``i * n_aux + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..graph import Graph
from ..rng import make_rng
from ..signatures import BIN_SIZE, NUM_BINS, pair_features, signature_matrix

IDENTICAL = 1
NON_IDENTICAL = 0


@dataclass(frozen=True)
class PairExample:
    san_node: str | None
    aux_node: str | None
    features: np.ndarray
    label: int

    @property
    def identical(self) -> bool:
        return self.label == IDENTICAL


class _Complement(Sequence):
    """Integers in ``range(total)`` that are not in ``holes`` (sorted), by rank."""

    def __init__(self, total: int, holes: np.ndarray):
        self._total = total
        self._holes = np.sort(np.asarray(holes, dtype=np.int64))

    def __len__(self):
        return self._total - len(self._holes)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        # the k-th free slot f satisfies f - #(holes <= f) == k
        f = k
        for h in self._holes:
            if h <= f:
                f += 1
            else:
                break
        return f


class PairPopulation:
    """All pairs (or a uniform subset of ``cap`` pairs) of V(g_san) x V(g_aux)."""

    def __init__(self, g_san: Graph, g_aux: Graph, cap: int | None = None, seed: int = 0,
                 bin_size: int = BIN_SIZE, num_bins: int = NUM_BINS,
                 layout: str = "concat+absdiff"):
        if g_san.n_nodes == 0 or g_aux.n_nodes == 0:
            raise ValueError("both graphs must be nonempty")
        self.san_labels = g_san.labels
        self.aux_labels = g_aux.labels
        self.layout = layout
        self.sig_san = signature_matrix(g_san, bin_size, num_bins)
        self.sig_aux = signature_matrix(g_aux, bin_size, num_bins)
        n_aux = len(self.aux_labels)
        self.total = len(self.san_labels) * n_aux
        aux_index = g_aux.index
        pos = sorted(i * n_aux + aux_index[u] for i, u in enumerate(self.san_labels) if u in aux_index)
        pos = np.asarray(pos, dtype=np.int64)
        if cap is not None and cap < self.total:
            if cap < 0:
                raise ValueError("cap must be nonnegative")
            rng = make_rng(seed, "pair-cap")
            chosen = np.sort(rng.choice(self.total, size=cap, replace=False)).astype(np.int64)
            is_pos = np.isin(chosen, pos)
            self.flat: np.ndarray | None = chosen
            self.positives: Sequence[int] = chosen[is_pos].tolist()
            self.negatives: Sequence[int] = chosen[~is_pos].tolist()
        else:
            self.flat = None
            self.positives = pos.tolist()
            self.negatives = _Complement(self.total, pos)

    def __len__(self):
        return self.total if self.flat is None else len(self.flat)

    @property
    def n_identical(self) -> int:
        return len(self.positives)

    def flat_indices(self) -> Iterator[int]:
        return iter(range(self.total)) if self.flat is None else iter(self.flat.tolist())

    def label_of(self, flat: int) -> int:
        i, j = divmod(int(flat), len(self.aux_labels))
        return IDENTICAL if self.san_labels[i] == self.aux_labels[j] else NON_IDENTICAL

    def features(self, flat) -> np.ndarray:
        i, j = np.divmod(np.asarray(flat, dtype=np.int64), len(self.aux_labels))
        return pair_features(self.sig_san[i], self.sig_aux[j], self.layout)

    def example(self, flat: int) -> PairExample:
        i, j = divmod(int(flat), len(self.aux_labels))
        return PairExample(self.san_labels[i], self.aux_labels[j], self.features(flat), self.label_of(flat))

    def examples(self, flats) -> list[PairExample]:
        flats = [int(f) for f in flats]
        if not flats:
            return []
        x = self.features(flats)
        n_aux = len(self.aux_labels)
        out = []
        for row, f in zip(x, flats):
            i, j = divmod(f, n_aux)
            out.append(PairExample(self.san_labels[i], self.aux_labels[j], row, self.label_of(f)))
        return out

    def __iter__(self) -> Iterator[PairExample]:
        for f in self.flat_indices():
            yield self.example(f)


def generate_pairs(g_san: Graph, g_aux: Graph, cap: int | None = None, seed: int = 0,
                   bin_size: int = BIN_SIZE, num_bins: int = NUM_BINS,
                   layout: str = "concat+absdiff") -> PairPopulation:
    """Pairs from V(g_san) x V(g_aux), sanitized node first.

    With ``cap`` set, a uniform subset of ``cap`` distinct pairs is kept.
    Iterating the result yields :class:`PairExample` objects lazily.
    """
    return PairPopulation(g_san, g_aux, cap, seed, bin_size, num_bins, layout)
