"""Re-identification attack: labeled pairs, balanced samples, forests, scoring."""

from .evaluate import CSV_FIELDS, EvalResult, evaluate, score
from .forest import DecisionTree, Forest, TrainingError, fit_forest, gini, train_forest
from .pairs import IDENTICAL, NON_IDENTICAL, PairExample, PairPopulation, generate_pairs
from .sampling import SampleSet, SamplingError, build_balanced_samples, reservoir_sample, smote

__all__ = [
    "CSV_FIELDS", "EvalResult", "evaluate", "score",
    "DecisionTree", "Forest", "TrainingError", "fit_forest", "gini", "train_forest",
    "IDENTICAL", "NON_IDENTICAL", "PairExample", "PairPopulation", "generate_pairs",
    "SampleSet", "SamplingError", "build_balanced_samples", "reservoir_sample", "smote",
]
