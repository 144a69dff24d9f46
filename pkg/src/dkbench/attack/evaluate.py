"""Precision / recall / F1 on held-out pairs, and the per-sample CSV rows."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass

import numpy as np

CSV_FIELDS = ("dataset", "dk_level", "strategy", "instance_id", "sample_id",
              "precision", "recall", "f1", "tp", "fp", "tn", "fn")


@dataclass(frozen=True)
class EvalResult:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int) -> "EvalResult":
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f1, tp, fp, tn, fn)

    def to_dict(self) -> dict:
        return asdict(self)


def score(y_true, y_pred) -> EvalResult:
    t = np.asarray(y_true, dtype=bool)
    p = np.asarray(y_pred, dtype=bool)
    return EvalResult.from_counts(int((t & p).sum()), int((~t & p).sum()),
                                  int((~t & ~p).sum()), int((t & ~p).sum()))


def evaluate(forest, test) -> EvalResult:
    """Score a forest on a list of PairExample."""
    if not test:
        raise ValueError("test set is empty")
    x = np.stack([e.features for e in test])
    y = np.array([e.label for e in test])
    return score(y, forest.predict(x))


def write_rows(path, rows, append: bool = False) -> None:
    """Write dict rows with the CSV_FIELDS header (floats at full precision)."""
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        if not append or fh.tell() == 0:
            w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
