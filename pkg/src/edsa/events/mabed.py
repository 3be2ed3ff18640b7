"""Mention-anomaly event detection.

Each term's per-slice tweet count is compared with what it would be if its
mentions were spread in proportion to overall volume. The contiguous run of
slices with the largest total excess is the term's burst interval, and that
excess is the event magnitude. The best-scoring terms become main words;
each is described by the nine co-occurring words whose count series move
most like its own over the interval.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .slices import TimeSlices
from .types import KEYWORDS_PER_EVENT, Event, EventError, Method, merge_duplicates, rank

NEUTRAL_WEIGHT = 0.5


def mabed_candidate_weight(series_t: Sequence[float], series_tq: Sequence[float], a: int, b: int) -> float:
    """Weight in [0, 1] from the first-order autocorrelation of two count series.

    With first differences ``d_x[i] = x[i] - x[i-1]`` over ``i`` in ``a+1..b``::

        A_xy  = sum(d_t * d_q)
        A_x^2 = sum(d_x^2) / (b - a - 1)
        rho   = A_xy / ((b - a - 1) * A_t * A_q)
        w     = (rho + 1) / 2

    A series with no change over the interval gives the neutral weight 0.5.
    """
    if b <= a + 1:
        raise EventError(f"interval [{a}, {b}] too short for a correlation weight")
    x = np.asarray(series_t, dtype=np.float64)
    y = np.asarray(series_tq, dtype=np.float64)
    if len(x) <= b or len(y) <= b or a < 0:
        raise EventError("series do not cover the interval")
    dx = np.diff(x[a: b + 1])
    dy = np.diff(y[a: b + 1])
    m = b - a - 1
    a_t = math.sqrt(float(dx @ dx) / m)
    a_q = math.sqrt(float(dy @ dy) / m)
    if a_t == 0.0 or a_q == 0.0:
        return NEUTRAL_WEIGHT
    rho = float(dx @ dy) / (m * a_t * a_q)
    rho = min(1.0, max(-1.0, rho))
    return (rho + 1.0) / 2.0


def anomaly(slices: TimeSlices) -> np.ndarray:
    """Observed minus expected tweet counts, shape (slices, terms)."""
    total = slices.totals.sum()
    term_totals = slices.counts.sum(axis=0)
    expected = np.outer(slices.totals / total, term_totals)
    return slices.counts - expected


def max_subarray(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise maximum-sum contiguous run of a (slices, terms) array.

    Returns (best_sum, start, end) per column. The earliest, then shortest,
    run wins ties. Columns with no positive entry get sum 0 and start > end.
    """
    n_slices, n = values.shape
    best = np.zeros(n)
    best_a = np.ones(n, dtype=np.int64)
    best_b = np.zeros(n, dtype=np.int64)
    cur = np.zeros(n)
    cur_a = np.zeros(n, dtype=np.int64)
    for i in range(n_slices):
        x = values[i]
        restart = cur <= 0
        cur = np.where(restart, x, cur + x)
        cur_a = np.where(restart, i, cur_a)
        better = cur > best + 1e-9
        best = np.where(better, cur, best)
        best_a = np.where(better, cur_a, best_a)
        best_b = np.where(better, i, best_b)
    return best, best_a, best_b


def _weight_window(a: int, b: int, n_slices: int) -> tuple[int, int] | None:
    while b - a < 2 and (a > 0 or b < n_slices - 1):
        if a > 0:
            a -= 1
        if b - a < 2 and b < n_slices - 1:
            b += 1
    return (a, b) if b - a >= 2 else None


def _keywords(slices: TimeSlices, t: int, a: int, b: int, pool: int) -> list[tuple[str, float]]:
    lo, hi = slices.doc_range(a, b)
    block = slices.presence[lo:hi]
    has_t = block[:, t].toarray().ravel() > 0
    co = np.asarray(block[has_t].sum(axis=0)).ravel().astype(np.float64)
    co[t] = 0
    order = np.lexsort((np.arange(len(co)), -co))
    cands = [int(j) for j in order[:pool] if co[j] > 0]
    if len(cands) < KEYWORDS_PER_EVENT - 1:
        # Too few co-occurring words: fall back on the interval's busiest terms.
        freq = np.asarray(block.sum(axis=0)).ravel().astype(np.float64)
        freq[t] = 0
        freq[cands] = 0
        extra = np.lexsort((np.arange(len(freq)), -freq))
        cands += [int(j) for j in extra[: KEYWORDS_PER_EVENT - 1 - len(cands)] if freq[j] > 0]
    if len(cands) < KEYWORDS_PER_EVENT - 1:
        rest = [j for j in range(len(slices.terms)) if j != t and j not in set(cands)]
        cands += rest[: KEYWORDS_PER_EVENT - 1 - len(cands)]

    window = _weight_window(a, b, slices.num_slices)
    series_t = slices.counts[:, t]
    scored = []
    for j in cands:
        w = NEUTRAL_WEIGHT if window is None else mabed_candidate_weight(series_t, slices.counts[:, j], *window)
        scored.append((slices.terms[j], w))
    scored.sort(key=lambda kw: (-kw[1], kw[0]))
    return [(slices.terms[t], 1.0)] + scored[: KEYWORDS_PER_EVENT - 1]


def mabed_detect(
    slices: TimeSlices,
    top_k: int = 50,
    min_support: int = 3,
    pool: int = 20,
    dedup: int | None = 5,
) -> list[Event]:
    """Top ``top_k`` bursty events, ranked by magnitude."""
    if top_k <= 0:
        return []
    anom = anomaly(slices)
    best, start, end = max_subarray(anom)
    support = slices.counts.sum(axis=0)
    eligible = np.flatnonzero((best > 0) & (support >= min_support))
    if len(eligible) == 0:
        raise EventError("no term has a positive mention anomaly")
    order = eligible[np.lexsort((eligible, -best[eligible]))]

    events: list[Event] = []
    for t in order:
        a, b = int(start[t]), int(end[t])
        keywords = _keywords(slices, int(t), a, b, pool)
        lo, hi = slices.doc_range(a, b)
        cols = [slices.term_index[k] for k, _ in keywords]
        hit = np.asarray(slices.presence[lo:hi][:, cols].sum(axis=1)).ravel() > 0
        ids = tuple(sorted(int(i) for i in slices.tweet_ids[lo:hi][hit]))
        events.append(Event(
            Method.MABED, tuple(keywords), int(slices.boundaries[a]), int(slices.boundaries[b + 1]),
            float(best[t]), ids,
        ))
        events = merge_duplicates(events, dedup)
        # Candidates arrive in descending magnitude and merges never raise a
        # magnitude, so later words cannot displace the first top_k events.
        if len(events) >= top_k:
            break
    return rank(events)[:top_k]
