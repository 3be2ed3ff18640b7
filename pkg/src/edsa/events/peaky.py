"""Peaky Topics: volume spikes inside each time slice.

Each slice is cut into ``sub_bins`` equal sub-bins. A sub-bin whose tweet
count exceeds the mean of the slice's other sub-bins by more than
``z_thresh`` standard deviations is a spike. Its keywords are the terms with
the highest TF-IDF when every sub-bin is treated as one document.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from ..vectorize.bow import tfidf
from .slices import TimeSlices, bin_edges
from .types import KEYWORDS_PER_EVENT, Event, EventError, Method, merge_duplicates, rank


def spike_scores(counts, z_thresh: float) -> list[tuple[int, float]]:
    """(sub-bin index, z-score) of each sub-bin that is a spike.

    The z-score compares a sub-bin with the other sub-bins of its slice
    (population standard deviation). When the others are all equal the
    deviation is taken as one tweet so the score stays finite.
    """
    counts = np.asarray(counts, dtype=np.float64)
    out = []
    for j in range(len(counts)):
        others = np.delete(counts, j)
        mean, std = others.mean(), others.std()
        if counts[j] > mean + z_thresh * std:
            out.append((j, float((counts[j] - mean) / (std if std > 0 else 1.0))))
    return out


def peaky_detect(
    slices: TimeSlices,
    sub_bins: int = 8,
    z_thresh: float = 2.0,
    top_k: int = 50,
    dedup: int | None = 5,
) -> list[Event]:
    if sub_bins < 3:
        raise EventError("need at least three sub-bins per slice")
    S = slices.num_slices
    ts = slices.timestamps
    # Sub-bin edges per slice; only the final sub-bin of the final slice is closed.
    edges = [bin_edges(int(slices.boundaries[s]), int(slices.boundaries[s + 1]), sub_bins) for s in range(S)]
    sub_of = np.empty(len(ts), dtype=np.int64)
    for s in range(S):
        lo, hi = slices.doc_range(s, s)
        e = edges[s]
        local = np.searchsorted(e, ts[lo:hi], side="right") - 1
        sub_of[lo:hi] = s * sub_bins + np.clip(local, 0, sub_bins - 1)
    n_sub = S * sub_bins
    counts = np.bincount(sub_of, minlength=n_sub)
    if counts.sum() == 0:
        raise EventError("every sub-bin is empty")

    term_counts = [Counter() for _ in range(n_sub)]
    for i, toks in enumerate(slices.docs):
        term_counts[sub_of[i]].update(toks)
    doc_freq = Counter()
    for c in term_counts:
        doc_freq.update(c.keys())

    events = []
    for s in range(S):
        for j, z in spike_scores(counts[s * sub_bins: (s + 1) * sub_bins], z_thresh):
            b = s * sub_bins + j
            tc = term_counts[b]
            length = sum(tc.values())
            if not length:
                continue
            scored = sorted(
                ((t, tfidf(c, length, n_sub, doc_freq[t])) for t, c in tc.items()),
                key=lambda kw: (-kw[1], kw[0]),
            )[:KEYWORDS_PER_EVENT]
            keys = {t for t, _ in scored}
            members = np.flatnonzero(sub_of == b)
            ids = tuple(sorted(int(slices.tweet_ids[i]) for i in members if keys & set(slices.docs[i])))
            start, end = int(edges[s][j]), int(edges[s][j + 1])
            events.append(Event(Method.PEAKY, tuple(scored), start, end, float(counts[b] * z), ids))
    return rank(merge_duplicates(events, dedup))[:top_k]
