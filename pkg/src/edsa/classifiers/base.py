"""Shared pieces of the sentiment models: predictions, label coding, activations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..corpus import SentimentLabel

# Binary models score the Positive class; index 0 is Negative, 1 is Positive.
CLASSES = (SentimentLabel.NEGATIVE, SentimentLabel.POSITIVE)


class ClassifierError(ValueError):
    pass


class HashMismatch(ClassifierError):
    """A model file and the vocabulary it is used with disagree."""


@dataclass(frozen=True)
class Prediction:
    """A predicted label and its score.

    ``score`` is P(Positive) for probabilistic models and the signed decision
    value for the SVM (``probability=False``).
    """

    label: SentimentLabel
    score: float
    probability: bool = True

    def __post_init__(self):
        if not np.isfinite(self.score):
            raise ClassifierError("non-finite prediction score")
        if self.probability and not 0.0 <= self.score <= 1.0:
            raise ClassifierError(f"probability score {self.score} outside [0, 1]")


def encode_labels(labels: Sequence) -> np.ndarray:
    """Map Negative/Positive labels to 0/1; anything else is rejected."""
    y = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        lab = SentimentLabel(lab)
        if lab is SentimentLabel.POSITIVE:
            y[i] = 1
        elif lab is SentimentLabel.NEGATIVE:
            y[i] = 0
        else:
            raise ClassifierError("binary models accept only Negative and Positive labels")
    if len(y) == 0:
        raise ClassifierError("no training labels")
    if y.min() == y.max():
        raise ClassifierError("training labels contain a single class")
    return y


def decide(score: float, threshold: float) -> SentimentLabel:
    """Score at or above the threshold is Positive, so boundary ties go Positive."""
    return SentimentLabel.POSITIVE if score >= threshold else SentimentLabel.NEGATIVE


def sigmoid(x):
    # tanh form is stable for large |x| and keeps outputs inside [0, 1].
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def log_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return -np.logaddexp(0.0, -x)


def softmax(z, axis: int = -1) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)
