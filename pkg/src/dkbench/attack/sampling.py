"""Reservoir sampling, SMOTE and balanced train/test sub-samples."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import islice

import numpy as np

from ..rng import derive_seed, make_rng
from .pairs import IDENTICAL, NON_IDENTICAL, PairExample, PairPopulation


class SamplingError(ValueError):
    pass


def reservoir_sample(stream, k: int, seed: int = 0) -> list:
    """Uniform sample of ``k`` items in one pass (Li's Algorithm L).

    Random-access sequences are skipped over by index; other iterables are
    consumed with ``islice``.  Both paths draw the same random numbers, so
    they return the same sample.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = make_rng(seed, "reservoir")

    def u():
        return 1.0 - rng.random()  # in (0, 1], keeps log finite

    indexable = isinstance(stream, Sequence)
    it = None if indexable else iter(stream)
    if indexable:
        res = list(stream[:k])
    else:
        res = list(islice(it, k))
    if len(res) < k:
        return res
    n = len(stream) if indexable else None
    w = math.exp(math.log(u()) / k)
    pos = k - 1
    while True:
        skip = int(math.floor(math.log(u()) / math.log1p(-w)))
        pos += skip + 1
        if indexable:
            if pos >= n:
                break
            item = stream[pos]
        else:
            item = next(islice(it, skip, None), _END)
            if item is _END:
                break
        res[int(rng.integers(k))] = item
        w *= math.exp(math.log(u()) / k)
    return res


_END = object()


def smote(minority, k_neighbors: int = 5, n_synthetic: int = 0, seed: int = 0) -> list[np.ndarray]:
    """Synthetic points ``x + u (x_nn - x)`` with ``x_nn`` among the k nearest minority neighbours."""
    x = np.asarray(minority, dtype=float)
    if x.ndim != 2 or len(x) < 1:
        raise ValueError("smote needs at least one minority vector")
    if n_synthetic <= 0:
        return []
    rng = make_rng(seed, "smote")
    n = len(x)
    if n == 1:
        return [x[0].copy() for _ in range(n_synthetic)]
    k = min(k_neighbors, n - 1)
    sq = (x * x).sum(1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * x @ x.T
    np.fill_diagonal(d2, np.inf)
    nn = np.argsort(d2, axis=1, kind="stable")[:, :k]
    base = rng.integers(n, size=n_synthetic)
    pick = nn[base, rng.integers(k, size=n_synthetic)]
    u = rng.random(n_synthetic)[:, None]
    out = x[base] + u * (x[pick] - x[base])
    return list(out)


@dataclass
class SampleSet:
    train: list[PairExample]
    test: list[PairExample]
    seed: int
    n_synthetic: int = 0
    raw_counts: dict = field(default_factory=dict)

    @staticmethod
    def _xy(rows):
        if not rows:
            return np.zeros((0, 0)), np.zeros(0, dtype=np.int64)
        return np.stack([r.features for r in rows]), np.array([r.label for r in rows], dtype=np.int64)

    def train_xy(self):
        return self._xy(self.train)

    def test_xy(self):
        return self._xy(self.test)


def _holdout(items: list, frac: float, rng) -> tuple[list, list]:
    """Shuffle and cut; both sides keep at least one item when there are two."""
    items = list(items)
    rng.shuffle(items)
    n_test = int(round(frac * len(items)))
    if len(items) >= 2:
        n_test = min(max(n_test, 1), len(items) - 1)
    return items[n_test:], items[:n_test]


def _split_population(pairs):
    if isinstance(pairs, PairPopulation):
        return pairs.positives, pairs.negatives, pairs
    pos, neg = [], []
    for p in pairs:
        (pos if p.label == IDENTICAL else neg).append(p)
    return pos, neg, None


def build_balanced_samples(pairs, ell: int, sample_size: int, holdout_frac: float = 0.3,
                           seed: int = 0, k_neighbors: int = 5) -> list[SampleSet]:
    """``ell`` approximately balanced sub-samples, each split into train and test.

    Each sub-sample reservoir-samples up to ``sample_size // 2`` identical
    pairs and ``sample_size - sample_size // 2`` non-identical pairs, holds
    out ``holdout_frac`` of each class, then SMOTE-oversamples the train
    minority class until both train classes have the same size.
    """
    if ell < 1 or sample_size < 4:
        raise ValueError("need ell >= 1 and sample_size >= 4")
    if not 0 < holdout_frac < 1:
        raise ValueError("holdout_frac must be in (0, 1)")
    pos, neg, pop = _split_population(pairs)
    for name, got in (("identical", len(pos)), ("non-identical", len(neg))):
        if got < 2:
            raise SamplingError(f"need at least 2 {name} pairs, found {got} (short by {2 - got})")
    k_pos = min(len(pos), sample_size // 2)
    k_neg = min(len(neg), sample_size - sample_size // 2)
    out = []
    for s in range(ell):
        sseed = derive_seed(seed, "sample", s)
        p = reservoir_sample(pos, k_pos, derive_seed(sseed, "pos"))
        q = reservoir_sample(neg, k_neg, derive_seed(sseed, "neg"))
        if pop is not None:
            p, q = pop.examples(p), pop.examples(q)
        rng = make_rng(sseed, "holdout")
        p_train, p_test = _holdout(p, holdout_frac, rng)
        q_train, q_test = _holdout(q, holdout_frac, rng)
        if len(p_train) < len(q_train):
            minor, label, gap = p_train, IDENTICAL, len(q_train) - len(p_train)
        else:
            minor, label, gap = q_train, NON_IDENTICAL, len(p_train) - len(q_train)
        synth = smote([e.features for e in minor], k_neighbors, gap, derive_seed(sseed, "smote"))
        train = p_train + q_train + [PairExample(None, None, f, label) for f in synth]
        out.append(SampleSet(train, p_test + q_test, sseed, len(synth),
                             {"identical": len(p), "non_identical": len(q)}))
    return out
