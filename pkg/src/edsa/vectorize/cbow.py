"""Continuous bag-of-words word embeddings trained with negative sampling.

For a target word the context is up to ``window`` tokens on each side. The
mean of the context input vectors, ``h``, scores every output vector; instead
of normalising over the whole vocabulary we push the target's score up and
``negatives`` sampled noise words' scores down::

    loss = -log s(U[target] . h) - sum_k log s(-U[noise_k] . h)

Noise words are drawn from the unigram distribution raised to 0.75.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import container
from ..preprocess import TokenizedDoc
from .bow import VectorizeError

log = logging.getLogger(__name__)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass
class CbowModel:
    vocab: list[str]
    V_in: np.ndarray
    U: np.ndarray
    window: int
    seed: int
    losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def dim(self) -> int:
        return self.V_in.shape[1]

    def vector(self, word: str) -> np.ndarray:
        i = self.index.get(word)
        return np.zeros(self.dim) if i is None else self.V_in[i]

    def save(self, path: str | Path) -> None:
        manifest = {"kind": "cbow", "dim": self.dim, "window": self.window, "seed": self.seed,
                    "vocab": self.vocab}
        container.write(path, manifest, {"V_in": self.V_in, "U": self.U})

    @classmethod
    def load(cls, path: str | Path) -> "CbowModel":
        manifest, arrays = container.read(path)
        if manifest.get("kind") != "cbow":
            raise container.ContainerError(f"{path}: not a CBOW model")
        return cls(manifest["vocab"], arrays["V_in"], arrays["U"], manifest["window"], manifest["seed"])


def _pad_contexts(contexts) -> tuple[np.ndarray, np.ndarray]:
    width = max(len(c) for c in contexts)
    idx = np.zeros((len(contexts), width), dtype=np.int64)
    mask = np.zeros((len(contexts), width))
    for b, c in enumerate(contexts):
        idx[b, : len(c)] = c
        mask[b, : len(c)] = 1.0
    return idx, mask


def _batch_grads(V_in, U, ctx_idx, ctx_mask, targets, negatives):
    """Loss plus per-row gradients for the rows a batch touches."""
    weights = ctx_mask / ctx_mask.sum(axis=1, keepdims=True)
    h = np.einsum("bc,bcd->bd", weights, V_in[ctx_idx])
    out_idx = np.concatenate([targets[:, None], negatives], axis=1)
    U_b = U[out_idx]  # (B, 1+k, dim)
    scores = np.einsum("bkd,bd->bk", U_b, h)
    sign = np.ones_like(scores)
    sign[:, 1:] = -1.0
    z = sign * scores
    loss = float(np.sum(np.logaddexp(0.0, -z)))
    # d loss / d score = -sign * s(-z)
    g = -sign * _sigmoid(-z)
    out_grads = g[:, :, None] * h[:, None, :]
    grad_h = np.einsum("bk,bkd->bd", g, U_b)
    ctx_grads = weights[:, :, None] * grad_h[:, None, :]
    return loss, ctx_grads, out_idx, out_grads


def cbow_loss_and_grads(V_in, U, contexts, targets, negatives):
    """Summed negative-sampling loss over a batch and dense gradients.

    ``contexts`` is a list of index arrays, ``targets`` an int array and
    ``negatives`` an int array of shape (batch, k).
    """
    ctx_idx, ctx_mask = _pad_contexts(contexts)
    loss, ctx_grads, out_idx, out_grads = _batch_grads(
        V_in, U, ctx_idx, ctx_mask, np.asarray(targets), np.asarray(negatives)
    )
    grad_V = np.zeros_like(V_in)
    np.add.at(grad_V, ctx_idx, ctx_grads)
    grad_U = np.zeros_like(U)
    np.add.at(grad_U, out_idx, out_grads)
    return loss, grad_V, grad_U


def _positions(docs: Sequence[np.ndarray], window: int):
    """Padded context matrix, mask and targets for every token with a context."""
    ctx, targets = [], []
    for d in docs:
        n = len(d)
        for i in range(n):
            c = np.concatenate([d[max(0, i - window): i], d[i + 1: i + 1 + window]])
            if len(c):
                ctx.append(c)
                targets.append(int(d[i]))
    if not ctx:
        return None
    idx = np.zeros((len(ctx), 2 * window), dtype=np.int64)
    mask = np.zeros((len(ctx), 2 * window))
    for b, c in enumerate(ctx):
        idx[b, : len(c)] = c
        mask[b, : len(c)] = 1.0
    return idx, mask, np.array(targets, dtype=np.int64)


def train_cbow(
    docs: Sequence,
    dim: int = 100,
    window: int = 5,
    epochs: int = 5,
    lr: float = 0.025,
    negatives: int = 5,
    seed: int = 0,
    batch_size: int = 64,
    min_count: int = 1,
) -> CbowModel:
    """Train CBOW embeddings with mini-batch SGD; single-threaded and seeded."""
    if dim <= 0:
        raise VectorizeError("embedding dimension must be positive")
    if window <= 0:
        raise VectorizeError("context window must be at least 1")
    token_lists = [d.tokens if isinstance(d, TokenizedDoc) else d for d in docs]
    counts = Counter(t for toks in token_lists for t in toks)
    vocab = sorted(w for w, c in counts.items() if c >= min_count)
    if not vocab:
        raise VectorizeError("empty corpus")
    index = {w: i for i, w in enumerate(vocab)}
    encoded = [np.array([index[t] for t in toks if t in index], dtype=np.int64) for toks in token_lists]
    positions = _positions(encoded, window)
    if positions is None:
        raise VectorizeError("no document has two or more tokens to form a context")

    rng = np.random.default_rng(seed)
    V = len(vocab)
    V_in = (rng.random((V, dim)) - 0.5) / dim
    U = np.zeros((V, dim))
    freq = np.array([counts[w] for w in vocab], dtype=np.float64) ** 0.75
    noise = freq / freq.sum()

    ctx_idx, ctx_mask, targets = positions
    n_pos = len(targets)
    total_steps = epochs * ((n_pos + batch_size - 1) // batch_size)
    step = 0
    losses = []
    for epoch in range(epochs):
        order = rng.permutation(n_pos)
        epoch_loss = 0.0
        for start in range(0, n_pos, batch_size):
            sel = order[start: start + batch_size]
            negs = rng.choice(V, size=(len(sel), negatives), p=noise)
            loss, ctx_grads, out_idx, out_grads = _batch_grads(
                V_in, U, ctx_idx[sel], ctx_mask[sel], targets[sel], negs
            )
            alpha = max(lr * (1.0 - step / total_steps), lr * 1e-4)
            np.add.at(V_in, ctx_idx[sel], -alpha * ctx_grads)
            np.add.at(U, out_idx, -alpha * out_grads)
            epoch_loss += loss
            step += 1
        losses.append(epoch_loss / n_pos)
        log.debug("cbow epoch %d loss %.4f", epoch, losses[-1])
    return CbowModel(vocab, V_in, U, window, seed, losses)


def embed_doc(model: CbowModel, doc, max_len: int) -> np.ndarray:
    """Per-token input vectors, truncated or zero-padded at the end to ``max_len``."""
    tokens = doc.tokens if isinstance(doc, TokenizedDoc) else doc
    out = np.zeros((max_len, model.dim))
    for i, tok in enumerate(tokens[:max_len]):
        j = model.index.get(tok)
        if j is not None:
            out[i] = model.V_in[j]
    return out


def mean_vector(model: CbowModel, doc) -> np.ndarray:
    """Mean input vector over the doc's tokens (unknown tokens count as zero)."""
    tokens = doc.tokens if isinstance(doc, TokenizedDoc) else doc
    if not tokens:
        return np.zeros(model.dim)
    return embed_doc(model, tokens, len(tokens)).mean(axis=0)
