"""Online LDA: a collapsed Gibbs sampler run slice by slice.

Within a slice every token's topic is resampled from

    P(z_i = j | rest) ∝ (C_VK[w, j] + beta[w, j]) / (sum_v C_VK[v, j] + beta[v, j])
                      * (C_DK[d, j] + alpha[j])   / (sum_k C_DK[d, k] + alpha[k])

with the token's own assignment removed from the counts. The topic-word
prior of slice ``s`` mixes the previous slice's topic-word distribution with
the base prior, so topic ``j`` in one slice continues topic ``j`` of the last.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .slices import TimeSlices
from .types import KEYWORDS_PER_EVENT, Event, EventError, Method, merge_duplicates, rank

log = logging.getLogger(__name__)

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


@dataclass
class OldaState:
    """Sampler state for one slice's documents."""

    K: int
    words: np.ndarray  # token -> term index
    doc_of: np.ndarray  # token -> document index
    doc_len: np.ndarray
    z: np.ndarray
    C_VK: np.ndarray  # (V, K)
    C_DK: np.ndarray  # (D, K)
    n_K: np.ndarray  # (K,) tokens per topic
    alpha: np.ndarray  # (K,)
    beta: np.ndarray  # (V, K)

    @classmethod
    def init(
        cls,
        docs: Sequence[Sequence[int]],
        V: int,
        K: int,
        rng: np.random.Generator,
        alpha: float | np.ndarray | None = None,
        beta: float | np.ndarray = 0.01,
    ) -> "OldaState":
        words = np.array([w for d in docs for w in d], dtype=np.int64)
        doc_len = np.array([len(d) for d in docs], dtype=np.int64)
        doc_of = np.repeat(np.arange(len(docs), dtype=np.int64), doc_len)
        z = rng.integers(0, K, size=len(words)).astype(np.int64)
        if alpha is None:
            alpha = 50.0 / K
        alpha_v = np.full(K, float(alpha)) if np.isscalar(alpha) else np.asarray(alpha, dtype=np.float64)
        beta_m = np.full((V, K), float(beta)) if np.isscalar(beta) else np.asarray(beta, dtype=np.float64)
        C_VK = np.zeros((V, K), dtype=np.int64)
        C_DK = np.zeros((len(docs), K), dtype=np.int64)
        np.add.at(C_VK, (words, z), 1)
        np.add.at(C_DK, (doc_of, z), 1)
        n_K = np.bincount(z, minlength=K).astype(np.int64)
        return cls(K, words, doc_of, doc_len, z, C_VK, C_DK, n_K, alpha_v, beta_m)

    @property
    def beta_sum(self) -> np.ndarray:
        return self.beta.sum(axis=0)

    def conditional(self, i: int) -> np.ndarray:
        """Normalised topic distribution for token ``i`` with itself excluded."""
        w, d, j0 = self.words[i], self.doc_of[i], self.z[i]
        c_vk = self.C_VK[w].astype(np.float64)
        c_dk = self.C_DK[d].astype(np.float64)
        n_k = self.n_K.astype(np.float64)
        c_vk[j0] -= 1
        c_dk[j0] -= 1
        n_k[j0] -= 1
        p = (c_vk + self.beta[w]) / (n_k + self.beta_sum)
        p *= (c_dk + self.alpha) / (c_dk.sum() + self.alpha.sum())
        return p / p.sum()

    def topic_word(self) -> np.ndarray:
        """Smoothed topic-word distributions, shape (V, K), columns sum to 1."""
        return (self.C_VK + self.beta) / (self.n_K + self.beta_sum)

    def check(self) -> None:
        assert (self.C_VK >= 0).all() and (self.C_DK >= 0).all()
        assert (self.C_DK.sum(axis=1) == self.doc_len).all()
        assert (self.C_VK.sum(axis=0) == self.n_K).all()
        assert self.n_K.sum() == len(self.words)


def _sweep_py(words, doc_of, z, C_VK, C_DK, n_K, alpha, beta, beta_sum, u):
    K = len(n_K)
    alpha_sum = alpha.sum()
    p = np.empty(K)
    for i in range(len(words)):
        w, d, j = words[i], doc_of[i], z[i]
        C_VK[w, j] -= 1
        C_DK[d, j] -= 1
        n_K[j] -= 1
        doc_total = 0.0
        for k in range(K):
            doc_total += C_DK[d, k]
        total = 0.0
        for k in range(K):
            total += (C_VK[w, k] + beta[w, k]) / (n_K[k] + beta_sum[k]) * (
                (C_DK[d, k] + alpha[k]) / (doc_total + alpha_sum)
            )
            p[k] = total
        target = u[i] * total
        j = 0
        while j < K - 1 and p[j] <= target:
            j += 1
        z[i] = j
        C_VK[w, j] += 1
        C_DK[d, j] += 1
        n_K[j] += 1


_sweep_fast = numba.njit(cache=True, nogil=True)(_sweep_py) if numba is not None else _sweep_py


def olda_gibbs_step(state: OldaState, u: np.ndarray | None = None, rng=None, fast: bool = True) -> OldaState:
    """Resample every token once, in token order, updating counts in place.

    ``u`` supplies one uniform draw per token; otherwise they come from ``rng``.
    """
    if u is None:
        u = (rng or np.random.default_rng()).random(len(state.words))
    sweep = _sweep_fast if fast else _sweep_py
    sweep(state.words, state.doc_of, state.z, state.C_VK, state.C_DK, state.n_K,
          state.alpha, state.beta, state.beta_sum, np.asarray(u, dtype=np.float64))
    return state


def olda_detect(
    slices: TimeSlices,
    K: int = 50,
    iters: int = 200,
    top_k: int = 50,
    seed: int = 0,
    mix: float = 0.5,
    alpha: float | None = None,
    beta: float = 0.01,
    min_docs: int = 2,
    dedup: int | None = 5,
    return_states: bool = False,
):
    """Run the sampler over each slice in time order and turn topics into events.

    A document belongs to its dominant topic (ties to the lowest index). A
    topic with at least ``min_docs`` member tweets in a slice becomes an event
    whose magnitude is that member count.
    """
    V = len(slices.terms)
    if K < 2:
        raise EventError("OLDA needs at least two topics")
    if K > V:
        raise EventError(f"{K} topics exceed vocabulary of {V} terms")
    rng = np.random.default_rng(seed)
    index = slices.term_index
    events: list[Event] = []
    states = []
    prev_phi = None
    for s in range(slices.num_slices):
        lo, hi = slices.doc_range(s, s)
        docs = [[index[t] for t in slices.docs[i]] for i in range(lo, hi)]
        keep = [i for i, d in enumerate(docs) if d]
        if not keep:
            continue
        if prev_phi is None:
            prior = np.full((V, K), beta)
        else:
            prior = mix * prev_phi * V + (1.0 - mix) * beta
        state = OldaState.init([docs[i] for i in keep], V, K, rng, alpha=alpha, beta=prior)
        for _ in range(iters):
            olda_gibbs_step(state, rng.random(len(state.words)))
        prev_phi = state.topic_word()
        if return_states:
            states.append(state)

        dominant = np.argmax(state.C_DK, axis=1)
        ts = slices.timestamps[lo:hi][keep]
        ids = slices.tweet_ids[lo:hi][keep]
        for j in range(K):
            members = np.flatnonzero(dominant == j)
            if len(members) < min_docs:
                continue
            col = state.C_VK[:, j]
            top = np.lexsort((np.arange(V), -col))[:KEYWORDS_PER_EVENT]
            keywords = tuple((slices.terms[v], float(prev_phi[v, j])) for v in top)
            events.append(Event(
                Method.OLDA, keywords, int(ts[members].min()), int(ts[members].max()),
                float(len(members)), tuple(sorted(int(i) for i in ids[members])),
            ))
    events = merge_duplicates(events, dedup)
    out = rank(events)[:top_k]
    return (out, states) if return_states else out
