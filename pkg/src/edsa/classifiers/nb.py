"""Multinomial naive Bayes over raw term counts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..vectorize import DocTermMatrix, Scheme
from .base import CLASSES, ClassifierError, Prediction, encode_labels, softmax


def as_rows(x, dim: int, scheme: Scheme | None = None) -> sp.csr_matrix:
    """Coerce a DocTermMatrix, sparse matrix or dense array to CSR rows of width ``dim``."""
    if isinstance(x, DocTermMatrix):
        if scheme is not None and x.scheme is not Scheme(scheme):
            raise ClassifierError(f"model expects {Scheme(scheme).value} weights, got {x.scheme.value}")
        x = x.matrix
    m = sp.csr_matrix(x) if sp.issparse(x) else sp.csr_matrix(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if m.shape[1] != dim:
        raise ClassifierError(f"feature dimension {m.shape[1]} does not match model dimension {dim}")
    return m


@dataclass
class NbModel:
    """Log class priors (2,) and Laplace-smoothed log term likelihoods (2, V)."""

    log_prior: np.ndarray
    log_lik: np.ndarray
    vocab_hash: str = ""
    alpha: float = 1.0
    kind: str = field(default="nb", init=False)
    scheme = Scheme.RAW

    @property
    def dim(self) -> int:
        return self.log_lik.shape[1]

    def joint_log(self, x) -> np.ndarray:
        """log p(y) + sum_j f_j log p(t_j|y), shape (n, 2).

        The multinomial coefficient is the same for both classes and is left out.
        """
        rows = as_rows(x, self.dim, self.scheme)
        return np.asarray(rows @ self.log_lik.T) + self.log_prior

    def posterior(self, x) -> np.ndarray:
        return softmax(self.joint_log(x), axis=1)

    def predict_batch(self, x) -> list[Prediction]:
        jl = self.joint_log(x)
        p = softmax(jl, axis=1)[:, 1]
        return [
            Prediction(CLASSES[int(d >= 0.0)], float(q))
            for d, q in zip(jl[:, 1] - jl[:, 0], p)
        ]

    def predict(self, x) -> Prediction:
        preds = self.predict_batch(x)
        if len(preds) != 1:
            raise ClassifierError("predict takes a single document; use predict_batch")
        return preds[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {"log_prior": self.log_prior, "log_lik": self.log_lik}

    @property
    def hyperparams(self) -> dict:
        return {"alpha": self.alpha}


def train_nb(matrix: DocTermMatrix, labels, alpha: float = 1.0, vocab_hash: str = "") -> NbModel:
    if matrix.scheme is not Scheme.RAW:
        raise ClassifierError("naive Bayes trains on raw term counts")
    y = encode_labels(labels)
    if len(y) != matrix.shape[0]:
        raise ClassifierError("labels and matrix rows differ in number")
    onehot = sp.csr_matrix((np.ones(len(y)), (y, np.arange(len(y)))), shape=(2, len(y)))
    counts = np.asarray((onehot @ matrix.matrix).todense(), dtype=np.float64)
    lik = (counts + alpha) / (counts.sum(axis=1, keepdims=True) + alpha * matrix.shape[1])
    prior = np.bincount(y, minlength=2) / len(y)
    return NbModel(np.log(prior), np.log(lik), vocab_hash, alpha)
