"""Softmax classification head over dense document vectors."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import CLASSES, ClassifierError, Prediction, encode_labels, softmax

DEFAULTS = {"lr": 0.02, "epochs": 50, "batch_size": 64, "standardize": True}


@dataclass
class SoftmaxHead:
    """Class scores ``z = W x + b``; probabilities ``softmax(z)``. Row 1 of ``W`` is Positive."""

    W: np.ndarray
    b: np.ndarray
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0
    losses: list = field(default_factory=list)
    vocab_hash: str = ""
    kind: str = field(default="softmax", init=False)

    def __post_init__(self):
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ClassifierError("head weights and bias disagree in shape")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ClassifierError("non-finite head parameters")

    @property
    def dim(self) -> int:
        return self.W.shape[1]

    def _inputs(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ClassifierError(f"expected vectors of dimension {self.dim}, got shape {np.shape(x)}")
        return X

    def logits(self, x) -> np.ndarray:
        return self._inputs(x) @ self.W.T + self.b

    def proba(self, x) -> np.ndarray:
        return softmax(self.logits(x), axis=1)

    def predict_batch(self, x) -> list[Prediction]:
        z = self.logits(x)
        p = softmax(z, axis=1)[:, 1]
        return [Prediction(CLASSES[int(d >= 0.0)], float(q)) for d, q in zip(z[:, 1] - z[:, 0], p)]

    def predict(self, x) -> Prediction:
        preds = self.predict_batch(x)
        if len(preds) != 1:
            raise ClassifierError("predict takes a single vector; use predict_batch")
        return preds[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "b": self.b}


def softmax_loss_and_grads(W, b, X, y) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy of integer targets ``y`` and its gradients in (W, b)."""
    z = X @ W.T + b
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = len(y)
    loss = -logp[np.arange(n), y].mean()
    dz = np.exp(logp)
    dz[np.arange(n), y] -= 1.0
    dz /= n
    return float(loss), dz.T @ X, dz.sum(axis=0)


def train_softmax_head(vectors, labels, hyperparams: dict | None = None, seed: int = 0) -> SoftmaxHead:
    params = dict(DEFAULTS)
    unknown = set(hyperparams or {}) - set(params)
    if unknown:
        raise ClassifierError(f"unknown softmax hyperparameters: {sorted(unknown)}")
    params.update(hyperparams or {})
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise ClassifierError("softmax head needs a non-empty (n, dim) array")
    y = encode_labels(labels)
    if len(y) != len(X):
        raise ClassifierError("labels and vectors differ in number")

    mu, sd = np.zeros(X.shape[1]), np.ones(X.shape[1])
    if params["standardize"]:
        # Fit on z-scored inputs, then fold the transform into W and b.
        mu, sd = X.mean(axis=0), X.std(axis=0)
        sd[sd == 0] = 1.0
        X = (X - mu) / sd
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 0.01, size=(len(CLASSES), X.shape[1]))
    b = np.zeros(len(CLASSES))
    lr, bs = float(params["lr"]), int(params["batch_size"])
    losses = []
    for epoch in range(int(params["epochs"])):
        order = rng.permutation(len(X))
        total = 0.0
        for start in range(0, len(X), bs):
            sel = order[start: start + bs]
            loss, gW, gb = softmax_loss_and_grads(W, b, X[sel], y[sel])
            if not np.isfinite(loss):
                raise ClassifierError(f"loss diverged at epoch {epoch}; lower the learning rate")
            W -= lr * gW
            b -= lr * gb
            total += loss * len(sel)
        losses.append(total / len(X))
    W = W / sd
    return SoftmaxHead(W, b - W @ mu, params, seed, losses)
