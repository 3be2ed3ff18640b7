"""Equal-width time slicing of a corpus with per-slice term counts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..corpus import Corpus
from ..preprocess import Pipeline, PipelineSpec, TokenizedDoc, apply_all
from .types import EventError


def _ceil_div(a, b):
    return -(-a // b)


def bin_edges(lo: int, hi: int, n: int) -> np.ndarray:
    """Integer edges of ``n`` equal bins over [lo, hi].

    Edge ``i`` is the smallest integer not below ``lo + i*(hi-lo)/n``, so an
    integer timestamp falls in the same bin as it would with real-valued edges.
    """
    span = hi - lo
    return np.array([lo + _ceil_div(i * span, n) for i in range(n + 1)], dtype=np.int64)


def bin_index(ts: np.ndarray, lo: int, hi: int, n: int) -> np.ndarray:
    span = hi - lo
    idx = ((np.asarray(ts, dtype=np.int64) - lo) * n) // span
    return np.minimum(idx, n - 1)


@dataclass
class TimeSlices:
    """Docs grouped into equal-width time slices.

    ``counts[i, j]`` is the number of tweets in slice ``i`` containing term
    ``j`` at least once; ``totals[i]`` the number of tweets in slice ``i``.
    Tweets keep corpus (timestamp) order, so each slice is a contiguous run
    ``doc_ranges[i]`` of document indices.
    """

    boundaries: np.ndarray
    tweet_ids: np.ndarray
    timestamps: np.ndarray
    docs: list[tuple[str, ...]]
    slice_of: np.ndarray
    terms: list[str]
    presence: sp.csr_matrix
    counts: np.ndarray
    totals: np.ndarray

    @property
    def num_slices(self) -> int:
        return len(self.totals)

    @property
    def term_index(self) -> dict[str, int]:
        if not hasattr(self, "_term_index"):
            self._term_index = {t: i for i, t in enumerate(self.terms)}
        return self._term_index

    def doc_range(self, a: int, b: int) -> tuple[int, int]:
        """Half-open document index range covering slices a..b inclusive."""
        lo = int(np.searchsorted(self.slice_of, a, side="left"))
        hi = int(np.searchsorted(self.slice_of, b, side="right"))
        return lo, hi

    def slice_tweets(self, i: int) -> list[int]:
        lo, hi = self.doc_range(i, i)
        return self.tweet_ids[lo:hi].tolist()

    def series(self, term: str) -> np.ndarray:
        return self.counts[:, self.term_index[term]]


def make_slices(
    corpus: Corpus,
    num_slices: int = 32,
    docs: Sequence[TokenizedDoc] | None = None,
) -> TimeSlices:
    """Split ``corpus`` into ``num_slices`` equal-width bins; the last is right-closed.

    ``docs`` are the preprocessed tokens of the corpus tweets in the same
    order; by default the CT pipeline is applied.
    """
    if num_slices < 2:
        raise EventError("need at least two time slices")
    if len(corpus) == 0:
        raise EventError("empty corpus")
    lo, hi = corpus.span
    if hi <= lo:
        raise EventError("all tweets share one timestamp")
    if docs is None:
        docs = apply_all(corpus, PipelineSpec.resolve(Pipeline.CT))
    if len(docs) != len(corpus):
        raise EventError("token docs do not match the corpus")
    ids = np.array(corpus.ids, dtype=np.uint64)
    for d, tid in zip(docs, ids):
        if d.tweet_id != int(tid):
            raise EventError("token docs are not in corpus order")

    ts = corpus.timestamps
    slice_of = bin_index(ts, lo, hi, num_slices)
    token_lists = [d.tokens for d in docs]
    terms = sorted({t for toks in token_lists for t in toks})
    index = {t: i for i, t in enumerate(terms)}

    indptr = [0]
    cols: list[int] = []
    for toks in token_lists:
        cols.extend(sorted({index[t] for t in toks}))
        indptr.append(len(cols))
    presence = sp.csr_matrix(
        (np.ones(len(cols), dtype=np.int32), np.array(cols, dtype=np.int32), np.array(indptr)),
        shape=(len(docs), len(terms)),
    )
    member = sp.csr_matrix(
        (np.ones(len(docs), dtype=np.int32), (slice_of, np.arange(len(docs)))),
        shape=(num_slices, len(docs)),
    )
    counts = np.asarray((member @ presence).todense(), dtype=np.int64)
    totals = np.bincount(slice_of, minlength=num_slices).astype(np.int64)
    return TimeSlices(
        boundaries=bin_edges(lo, hi, num_slices),
        tweet_ids=ids,
        timestamps=ts,
        docs=[tuple(t) for t in token_lists],
        slice_of=slice_of,
        terms=terms,
        presence=presence,
        counts=counts,
        totals=totals,
    )
