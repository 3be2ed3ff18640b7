"""Seeded synthetic tweet corpora for demos, fixtures and detector checks.

``tweet_corpus`` writes plausible labelled tweets in which polarity words
lean towards the label and a few scheduled topics flare up for a while.
``planted_burst`` and ``two_vocabularies`` build the controlled corpora whose
ground truth is known exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus, SentimentLabel, Tweet

POSITIVE_WORDS = (
    "love", "great", "happy", "awesome", "good", "thanks", "nice", "fun", "best", "excited",
    "amazing", "lovely", "cool", "glad", "wonderful", "yay", "haha", "enjoy", "beautiful", "perfect",
)
NEGATIVE_WORDS = (
    "hate", "sad", "bad", "miss", "sick", "tired", "sucks", "awful", "worst", "sorry",
    "ugh", "hurts", "bored", "lost", "broke", "cry", "stupid", "annoying", "terrible", "poor",
)
FILLER = (
    "today", "work", "going", "just", "got", "day", "time", "home", "night", "now",
    "morning", "back", "tomorrow", "week", "school", "still", "really", "weekend", "friends", "movie",
    "phone", "car", "dinner", "coffee", "sleep", "game", "music", "weather", "house", "class",
)
FUNCTION = ("i", "the", "to", "a", "my", "is", "it", "and", "for", "so", "in", "of", "me", "on", "this")
TOPICS = (
    ("earthquake", "shaking", "felt", "building", "magnitude", "news", "safe", "downtown", "scary", "quake"),
    ("concert", "tickets", "band", "stage", "crowd", "show", "encore", "tour", "venue", "singing"),
    ("election", "vote", "polls", "candidate", "debate", "ballot", "results", "campaign", "speech", "votes"),
)
# Tuesday 2009-04-07 00:00:00 UTC, inside the source corpus's date range.
EPOCH0 = 1239062400


@dataclass(frozen=True)
class ScheduledTopic:
    words: Sequence[str]
    start: float  # fraction of the corpus span
    end: float
    share: float  # fraction of tweets in the window that mention it


DEFAULT_SCHEDULE = (
    ScheduledTopic(TOPICS[0], 0.20, 0.30, 0.5),
    ScheduledTopic(TOPICS[1], 0.55, 0.62, 0.5),
    ScheduledTopic(TOPICS[2], 0.75, 0.90, 0.4),
)


def _words(rng, pool, k):
    return [pool[j] for j in rng.integers(0, len(pool), k)]


def _tweet_text(rng, positive: bool, topic: Sequence[str] | None, noise: float) -> str:
    own, other = (POSITIVE_WORDS, NEGATIVE_WORDS) if positive else (NEGATIVE_WORDS, POSITIVE_WORDS)
    words = _words(rng, FUNCTION, int(rng.integers(2, 6))) + _words(rng, FILLER, int(rng.integers(1, 4)))
    words += _words(rng, own, int(rng.integers(1, 3)))
    if rng.random() < noise:
        words += _words(rng, other, 1)
    if rng.random() < 0.15:
        words += ["not" if rng.random() < 0.5 else "don't", other[int(rng.integers(len(other)))]]
    if topic is not None:
        words += list(rng.choice(list(topic), size=int(rng.integers(2, 5)), replace=False))
    rng.shuffle(words)
    if rng.random() < 0.3:
        words[0] = words[0].capitalize()
    if rng.random() < 0.2:
        words.insert(0, f"@user{int(rng.integers(1000))}")
    text = " ".join(words)
    return text + str(rng.choice(["", "", "!", "!!", ".", " :)", "...", "?"]))


def tweet_corpus(
    n: int = 100,
    seed: int = 0,
    span: int = 3 * 86400,
    noise: float = 0.25,
    schedule: Sequence[ScheduledTopic] = DEFAULT_SCHEDULE,
    start: int = EPOCH0,
    tz: str = "PDT",
) -> Corpus:
    """``n`` labelled tweets, half Positive, spread uniformly over ``span`` seconds."""
    rng = np.random.default_rng(seed)
    times = np.sort(rng.integers(0, span, n))
    ids = 1467810000 + np.cumsum(rng.integers(1, 5000, n))
    tweets = []
    for k in range(n):
        frac = times[k] / span
        topic = None
        for s in schedule:
            if s.start <= frac < s.end and rng.random() < s.share:
                topic = s.words
                break
        positive = bool(rng.random() < 0.5)
        label = SentimentLabel.POSITIVE if positive else SentimentLabel.NEGATIVE
        text = _tweet_text(rng, positive, topic, noise)
        tweets.append(Tweet(int(ids[k]), start + int(times[k]), label, f"user_{int(rng.integers(500)):03d}", text, tz=tz))
    return Corpus(tweets)


def _background(rng, n, lo, hi, vocab, length=6):
    times = rng.integers(lo, hi, n)
    return [(int(t), " ".join(_words(rng, vocab, length))) for t in times]


def _pack(items, start_id=1) -> Corpus:
    return Corpus(Tweet(start_id + k, t, None, "u", text) for k, (t, text) in enumerate(items))


def planted_burst(
    seed: int,
    window: tuple[int, int],
    span: int,
    rate: float = 100.0,
    factor: float = 10.0,
    keywords: Sequence[str] = ("storm", "flood", "rain"),
    background_share: float = 0.02,
) -> Corpus:
    """Uniform background chatter plus a burst of ``keywords`` inside ``window``.

    Background tweets arrive at ``rate`` per ``span / 32`` seconds over
    [0, span]; inside ``window`` the total arrival rate is ``factor`` times
    higher and the extra tweets all carry the burst keywords. Outside the
    window the keywords still appear in a small share of tweets. Tweets pin
    both ends of the span so time slicing is exactly reproducible.
    """
    rng = np.random.default_rng(seed)
    vocab = [f"w{j:03d}" for j in range(200)]
    unit = span / 32
    items = [(0, "w000 w001"), (span, "w002 w003")]
    items += _background(rng, int(rate * 32), 0, span + 1, vocab)
    lo, hi = window
    n_extra = int(round((factor - 1.0) * rate * (hi - lo) / unit))
    for t in rng.integers(lo, hi, n_extra):
        words = _words(rng, vocab, 3) + list(keywords)
        rng.shuffle(words)
        items.append((int(t), " ".join(words)))
    n_share = int(background_share * rate * 32)
    for t in rng.integers(0, span + 1, n_share):
        items.append((int(t), " ".join(_words(rng, vocab, 4) + [keywords[int(rng.integers(len(keywords)))]])))
    return _pack(items)


def two_vocabularies(
    seed: int,
    n_docs: int = 200,
    doc_len: int = 8,
    span: int = 7200,
    vocabularies: Sequence[Sequence[str]] = (("alpha", "bravo", "charlie"), ("xray", "yankee", "zulu")),
) -> tuple[Corpus, list[int]]:
    """Docs drawn entirely from one of two disjoint vocabularies; returns (corpus, source per tweet id order)."""
    rng = np.random.default_rng(seed)
    items, source = [], []
    for k in range(n_docs):
        v = int(rng.integers(len(vocabularies)))
        items.append((int(rng.integers(0, span + 1)), " ".join(_words(rng, vocabularies[v], doc_len))))
        source.append(v)
    corpus = _pack(items)
    by_id = {k + 1: source[k] for k in range(n_docs)}
    return corpus, [by_id[t.id] for t in corpus]
