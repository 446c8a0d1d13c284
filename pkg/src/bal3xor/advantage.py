"""Monte-Carlo advantage ``|Pr[M(X) = chi(X)] - 1/2|`` of simple predictors.

Predictors are either :class:`Predictor` objects (a named per-instance
decision function) or any fitted sklearn-style object whose ``predict``
accepts a list of instances, e.g. ``make_pipeline(RhsBits(), DummyClassifier(...))``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
from scipy.stats import binomtest
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .sampler import GenConfig, XorSkeleton, generate_batch
from .streams import Stream, child_rng
from .validation import check_bit_matrix


@dataclass(frozen=True)
class Predictor:
    name: str
    decide: Callable[[XorSkeleton], int]

    def predict(self, instances) -> np.ndarray:
        return np.fromiter((self.decide(x) for x in instances), dtype=np.uint8, count=len(instances))


def _rhs_parity(inst: XorSkeleton) -> int:
    return sum(c.rhs for c in inst.clauses) & 1


def constant_predictor(bit: int) -> Predictor:
    return Predictor(f"constant-{bit}", lambda _inst: bit)


def coin_flip_predictor(seed: int = 0) -> Predictor:
    """Fair coin keyed by ``(seed, n, rep)``; deterministic per instance."""

    def decide(inst) -> int:
        rep = getattr(inst, "rep", None) or 0
        return int(child_rng(seed, Stream.PREDICTOR, inst.n, rep).integers(0, 2))

    return Predictor("coin-flip", decide)


def rhs_parity_predictor() -> Predictor:
    return Predictor("rhs-parity", _rhs_parity)


def baseline(name: str, seed: int = 0) -> Predictor:
    table = {
        "constant-0": lambda: constant_predictor(0),
        "constant-1": lambda: constant_predictor(1),
        "coin-flip": lambda: coin_flip_predictor(seed),
        "rhs-parity": rhs_parity_predictor,
    }
    if name not in table:
        raise ValueError(f"unknown predictor {name!r}; choose from {sorted(table)}")
    return table[name]()


BASELINES = ("constant-0", "constant-1", "coin-flip", "rhs-parity")


class RhsBits(TransformerMixin, BaseEstimator):
    """Instances -> ``(n_instances, m)`` matrix of right-hand-side bits."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        if not X:
            return np.zeros((0, 0), dtype=np.uint8)
        return np.stack([x.rhs().to_dense() for x in X])

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags


class RhsParityClassifier(ClassifierMixin, BaseEstimator):
    """Predicts the parity of each row of a bit matrix."""

    def fit(self, X, y):
        check_bit_matrix(X)
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "classes_")
        return (check_bit_matrix(X).sum(axis=1) & 1).astype(np.uint8)


@dataclass(frozen=True)
class AdvantageEstimate:
    name: str
    samples: int
    correct: int
    accuracy: float
    advantage: float
    accuracy_ci: tuple[float, float]
    advantage_ci: tuple[float, float]


def _advantage_interval(lo: float, hi: float) -> tuple[float, float]:
    if lo <= 0.5 <= hi:
        return 0.0, max(0.5 - lo, hi - 0.5)
    a, b = abs(lo - 0.5), abs(hi - 0.5)
    return min(a, b), max(a, b)


def score_predictions(name: str, predicted, labels, confidence: float = 0.99) -> AdvantageEstimate:
    predicted = np.asarray(predicted).astype(np.uint8)
    labels = np.asarray(labels).astype(np.uint8)
    k, n = int((predicted == labels).sum()), labels.size
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    acc = k / n
    return AdvantageEstimate(name, n, k, acc, abs(acc - 0.5), (ci.low, ci.high),
                             _advantage_interval(ci.low, ci.high))


def estimate_advantage(pred: Union[Predictor, object], cfg: GenConfig, samples: int,
                       confidence: float = 0.99, threads: int = 1) -> AdvantageEstimate:
    """Score ``pred`` on ``samples`` fresh instances drawn with ``cfg``'s seed and balance mode."""
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    batch = generate_batch(replace(cfg, reps=samples), threads=threads)
    labels = [x.label for x in batch]
    name = getattr(pred, "name", type(pred).__name__)
    return score_predictions(name, pred.predict(batch), labels, confidence)
