"""Linear classifiers on sparse term weights: logistic, ridge-penalised logistic, SVM.

Features are divided by their training-set column maximum before fitting;
the scale is kept with the model so prediction applies the same transform.
For LR and Ridge the augmented input is ``x = [1] + a / scale`` and

    l(beta) = sum_i y_i * beta.x_i - log(1 + exp(beta.x_i))

is maximised by full-batch gradient ascent on the per-document mean. The
default step is ``1/L`` with ``L`` the Lipschitz bound of that mean gradient,
so every epoch increases the objective. Ridge subtracts
``lam * sum_j beta_j**2`` with the intercept included. The SVM
minimises ``C * sum_i max(0, 1 - y_i (w.x_i + b)) + 0.5 * |w|^2`` by
mini-batch subgradient steps (Pegasos schedule).
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from ..vectorize import DocTermMatrix, Scheme
from .base import CLASSES, ClassifierError, Prediction, encode_labels, log_sigmoid, sigmoid
from .nb import as_rows

log = logging.getLogger(__name__)


class LinearKind(str, enum.Enum):
    LR = "lr"
    RIDGE = "rc"
    SVM = "svm"

    @property
    def scheme(self) -> Scheme:
        # Ridge trains on raw counts, the other two on TF-IDF.
        return Scheme.RAW if self is LinearKind.RIDGE else Scheme.TFIDF


DEFAULTS = {
    LinearKind.LR: {"lr": "auto", "epochs": 100, "tol": 1e-4},
    LinearKind.RIDGE: {"lr": "auto", "epochs": 100, "tol": 1e-4, "lam": 1e-4},
    LinearKind.SVM: {"C": 0.1, "epochs": 20, "batch_size": 64},
}


@dataclass
class LinearModel:
    """``beta[0]`` is the intercept (the SVM's b); ``beta[1:]`` act on scaled features."""

    kind: LinearKind
    beta: np.ndarray
    scale: np.ndarray
    hyperparams: dict = field(default_factory=dict)
    vocab_hash: str = ""
    seed: int = 0
    losses: list = field(default_factory=list)

    def __post_init__(self):
        self.kind = LinearKind(self.kind)
        if not np.all(np.isfinite(self.beta)):
            raise ClassifierError("non-finite weights")
        if len(self.beta) != len(self.scale) + 1:
            raise ClassifierError("weights and feature scale disagree in length")

    @property
    def scheme(self) -> Scheme:
        return self.kind.scheme

    @property
    def dim(self) -> int:
        return len(self.scale)

    @property
    def weights(self) -> np.ndarray:
        """Weights on unscaled features."""
        return self.beta[1:] / self.scale

    def decision(self, x) -> np.ndarray:
        rows = as_rows(x, self.dim, self.scheme)
        return rows @ self.weights + self.beta[0]

    def predict_batch(self, x) -> list[Prediction]:
        z = self.decision(x)
        if self.kind is LinearKind.SVM:
            return [Prediction(CLASSES[int(v >= 0.0)], float(v), probability=False) for v in z]
        return [Prediction(CLASSES[int(v >= 0.0)], float(p)) for v, p in zip(z, sigmoid(z))]

    def predict(self, x) -> Prediction:
        preds = self.predict_batch(x)
        if len(preds) != 1:
            raise ClassifierError("predict takes a single document; use predict_batch")
        return preds[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {"beta": self.beta, "scale": self.scale}


def column_scale(X: sp.csr_matrix) -> np.ndarray:
    scale = np.asarray(abs(X).max(axis=0).todense()).ravel().astype(np.float64)
    scale[scale == 0] = 1.0
    return scale


def log_likelihood(beta: np.ndarray, X, y: np.ndarray) -> float:
    """l(beta) summed over documents; ``X`` excludes the constant column."""
    z = X @ beta[1:] + beta[0]
    return float(np.sum(y * z + log_sigmoid(-z)))


def log_likelihood_grad(beta: np.ndarray, X, y: np.ndarray) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to ``beta``."""
    r = y - sigmoid(X @ beta[1:] + beta[0])
    return np.concatenate([[r.sum()], X.T @ r])


def hinge_objective(beta: np.ndarray, X, y_pm: np.ndarray, C: float) -> float:
    margins = y_pm * (X @ beta[1:] + beta[0])
    return float(C * np.maximum(0.0, 1.0 - margins).sum() + 0.5 * beta[1:] @ beta[1:])


def lipschitz_step(X) -> float:
    """1/L for the mean log-likelihood gradient, L = |[1, X]|_2^2 / (4 n)."""
    n = X.shape[0]
    A = sp.hstack([sp.csr_matrix(np.ones((n, 1))), X]).tocsr()
    v0 = np.ones(min(A.shape)) / np.sqrt(min(A.shape))
    if min(A.shape) < 3:
        smax = np.linalg.norm(A.toarray(), 2)
    else:
        smax = svds(A, k=1, v0=v0, return_singular_vectors=False)[0]
    return 4.0 * n / (smax * smax)


def _fit_logistic(X, y, lr, epochs, tol, lam=0.0):
    n, m = X.shape
    if lr == "auto":
        lr = lipschitz_step(X)
    beta = np.zeros(m + 1)
    losses = []
    for epoch in range(epochs):
        g = log_likelihood_grad(beta, X, y) / n
        obj = log_likelihood(beta, X, y) / n - lam * beta @ beta
        if not np.isfinite(obj):
            raise ClassifierError(f"objective diverged at epoch {epoch}; lower the learning rate")
        losses.append(-obj)
        if np.max(np.abs(g - 2.0 * lam * beta)) < tol:
            break
        # Proximal form of the penalty step: stable for any lam >= 0.
        beta = (beta + lr * g) / (1.0 + 2.0 * lr * lam)
    return beta, losses


def _fit_svm(X, y01, C, epochs, batch_size, seed):
    n, m = X.shape
    y = 2.0 * y01 - 1.0
    lam = 1.0 / (C * n)
    rng = np.random.default_rng(seed)
    w = np.zeros(m)
    b = 0.0
    t = 0
    losses = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            sel = order[start: start + batch_size]
            t += 1
            eta = 1.0 / (lam * t)
            Xb, yb = X[sel], y[sel]
            viol = yb * (Xb @ w + b) < 1.0
            w *= 1.0 - eta * lam
            if viol.any():
                w += (eta / len(sel)) * (Xb[viol].T @ yb[viol])
                b += (eta / len(sel)) * yb[viol].sum()
            # Projection onto the ball that must contain the optimum.
            radius = 1.0 / np.sqrt(lam)
            norm = np.sqrt(w @ w)
            if norm > radius:
                w *= radius / norm
        obj = hinge_objective(np.concatenate([[b], w]), X, y, C)
        if not np.isfinite(obj):
            raise ClassifierError(f"objective diverged at epoch {epoch}")
        losses.append(obj)
    return np.concatenate([[b], w]), losses


def train_linear(
    matrix: DocTermMatrix,
    labels,
    kind: LinearKind | str,
    hyperparams: dict | None = None,
    seed: int = 0,
    vocab_hash: str = "",
    dim: int | None = None,
) -> LinearModel:
    kind = LinearKind(kind)
    params = dict(DEFAULTS[kind])
    unknown = set(hyperparams or {}) - set(params)
    if unknown:
        raise ClassifierError(f"unknown {kind.value} hyperparameters: {sorted(unknown)}")
    params.update(hyperparams or {})
    if matrix.scheme is not kind.scheme:
        raise ClassifierError(f"{kind.value} trains on {kind.scheme.value} weights, got {matrix.scheme.value}")
    if dim is not None and matrix.shape[1] != dim:
        raise ClassifierError(f"matrix has {matrix.shape[1]} columns, vocabulary has {dim}")
    y = encode_labels(labels).astype(np.float64)
    if len(y) != matrix.shape[0]:
        raise ClassifierError("labels and matrix rows differ in number")
    X = matrix.matrix.tocsr().astype(np.float64)
    scale = column_scale(X)
    Xs = sp.csr_matrix(X @ sp.diags(1.0 / scale))

    if kind is LinearKind.SVM:
        beta, losses = _fit_svm(Xs, y, params["C"], int(params["epochs"]), int(params["batch_size"]), seed)
    else:
        lam = params.get("lam", 0.0)
        beta, losses = _fit_logistic(Xs, y, params["lr"], int(params["epochs"]), params["tol"], lam)
    log.debug("%s trained: %d epochs, final loss %.5f", kind.value, len(losses), losses[-1] if losses else np.nan)
    return LinearModel(kind, beta, scale, params, vocab_hash, seed, losses)
