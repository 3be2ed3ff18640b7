"""Tweet corpus ingestion and stratified subsampling.

The input is the six-field Sentiment140 CSV layout::

    polarity, id, date, query, user, text

where ``date`` looks like ``Mon Apr 06 22:19:45 PDT 2009``.
"""
from __future__ import annotations

import calendar
import csv
import enum
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

log = logging.getLogger(__name__)

# Offsets in seconds east of UTC. Unknown zones are a parse error.
TIMEZONES = {"UTC": 0, "PDT": -7 * 3600, "PST": -8 * 3600}

MAX_MALFORMED_FRACTION = 0.01

_DATE_FORMAT = "%a %b %d %H:%M:%S %Y"


class CorpusError(ValueError):
    """Raised for corpus files or subset requests that cannot be honoured."""


class SentimentLabel(enum.IntEnum):
    """Tweet polarity. The integer order is used for deterministic tie-breaks."""

    NEGATIVE = 0
    NEUTRAL = 1
    POSITIVE = 2

    @classmethod
    def from_polarity(cls, value: str | int) -> "SentimentLabel":
        return _POLARITY[int(value)]

    @property
    def polarity(self) -> int:
        return {0: 0, 1: 2, 2: 4}[int(self)]

    @property
    def symbol(self) -> str:
        return {0: "-", 1: "0", 2: "+"}[int(self)]


_POLARITY = {0: SentimentLabel.NEGATIVE, 2: SentimentLabel.NEUTRAL, 4: SentimentLabel.POSITIVE}


@dataclass(frozen=True)
class Tweet:
    id: int
    timestamp: int
    label: SentimentLabel | None
    user: str
    raw_text: str
    query: str = "NO_QUERY"
    tz: str = "UTC"

    def __post_init__(self):
        if not self.raw_text.strip():
            raise CorpusError(f"tweet {self.id}: empty text")
        if not 0 <= self.id < 2**64:
            raise CorpusError(f"tweet id {self.id} outside unsigned 64-bit range")

    @property
    def date_string(self) -> str:
        """The timestamp rendered back in the source CSV date format."""
        local = time.gmtime(self.timestamp + TIMEZONES[self.tz])
        stamp = time.strftime(_DATE_FORMAT, local)
        # strftime puts the year last; the TZ abbreviation sits before it.
        head, year = stamp.rsplit(" ", 1)
        return f"{head} {self.tz} {year}"

    def to_row(self) -> list[str]:
        polarity = "" if self.label is None else str(self.label.polarity)
        return [polarity, str(self.id), self.date_string, self.query, self.user, self.raw_text]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "timestamp": self.timestamp,
            "label": None if self.label is None else self.label.name.lower(),
            "user": self.user,
            "text": self.raw_text,
            "query": self.query,
            "tz": self.tz,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Tweet":
        label = obj.get("label")
        return cls(
            id=int(obj["id"]),
            timestamp=int(obj["timestamp"]),
            label=None if label is None else SentimentLabel[label.upper()],
            user=obj.get("user", ""),
            raw_text=obj["text"],
            query=obj.get("query", "NO_QUERY"),
            tz=obj.get("tz", "UTC"),
        )


class Corpus:
    """An immutable, timestamp-ordered collection of tweets with unique ids."""

    def __init__(self, tweets: Iterable[Tweet] = ()):
        ordered = sorted(tweets, key=lambda t: (t.timestamp, t.id))
        ids = [t.id for t in ordered]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate tweet ids in corpus")
        self._tweets = tuple(ordered)
        self._by_id = {t.id: t for t in ordered}

    @property
    def tweets(self) -> tuple[Tweet, ...]:
        return self._tweets

    @property
    def span(self) -> tuple[int, int] | None:
        if not self._tweets:
            return None
        return self._tweets[0].timestamp, self._tweets[-1].timestamp

    def __len__(self) -> int:
        return len(self._tweets)

    def __iter__(self) -> Iterator[Tweet]:
        return iter(self._tweets)

    def __getitem__(self, i):
        return self._tweets[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self._tweets == other._tweets

    def get(self, tweet_id: int) -> Tweet:
        return self._by_id[tweet_id]

    def __contains__(self, tweet_id: int) -> bool:
        return tweet_id in self._by_id

    @property
    def ids(self) -> list[int]:
        return [t.id for t in self._tweets]

    @property
    def labels(self) -> list[SentimentLabel | None]:
        return [t.label for t in self._tweets]

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([t.timestamp for t in self._tweets], dtype=np.int64)

    def shifted(self, offset: int) -> "Corpus":
        """Copy with every timestamp moved by ``offset`` seconds."""
        from dataclasses import replace

        return Corpus(replace(t, timestamp=t.timestamp + offset) for t in self._tweets)

    def binary(self) -> "Corpus":
        """Only the Negative/Positive tweets, as used for training."""
        keep = (SentimentLabel.NEGATIVE, SentimentLabel.POSITIVE)
        return Corpus(t for t in self._tweets if t.label in keep)

    def label_counts(self) -> dict[SentimentLabel, int]:
        counts: dict[SentimentLabel, int] = {}
        for t in self._tweets:
            if t.label is not None:
                counts[t.label] = counts.get(t.label, 0) + 1
        return dict(sorted(counts.items()))


@dataclass
class ParseReport:
    rows: int = 0
    parsed: int = 0
    malformed: int = 0
    duplicates: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def skipped(self) -> int:
        return self.malformed + self.duplicates


def parse_date(text: str) -> tuple[int, str]:
    """Parse ``DOW Mon DD HH:MM:SS TZ YYYY`` into (epoch seconds UTC, zone)."""
    parts = text.split()
    if len(parts) != 6:
        raise ValueError(f"bad date {text!r}")
    tz = parts[4]
    if tz not in TIMEZONES:
        raise ValueError(f"unknown timezone {tz!r}")
    local = time.strptime(" ".join(parts[:4] + parts[5:]), _DATE_FORMAT)
    return calendar.timegm(local) - TIMEZONES[tz], tz


def parse_row(row: Sequence[str]) -> Tweet:
    if len(row) != 6:
        raise ValueError(f"expected 6 fields, got {len(row)}")
    polarity, tweet_id, date, query, user, text = row
    polarity = polarity.strip()
    if polarity:
        if polarity not in ("0", "2", "4"):
            raise ValueError(f"bad polarity {polarity!r}")
        label = SentimentLabel.from_polarity(polarity)
    else:
        label = None
    timestamp, tz = parse_date(date)
    return Tweet(
        id=int(tweet_id), timestamp=timestamp, label=label, user=user, raw_text=text, query=query, tz=tz
    )


def iter_rows(path: str | Path) -> Iterator[list[str]]:
    with open(path, encoding="utf-8", errors="replace", newline="") as fh:
        yield from csv.reader(fh)


def parse_csv(path: str | Path, limit: int | None = None) -> tuple[Corpus, ParseReport]:
    """Read a Sentiment140-style CSV.

    Malformed rows and repeated ids are skipped and counted. More than 1% of
    skipped rows means the file is probably not in this format and raises
    :class:`CorpusError`.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"cannot read corpus file {path}")
    report = ParseReport()
    tweets: dict[int, Tweet] = {}
    try:
        for row in iter_rows(path):
            if limit is not None and report.parsed >= limit:
                break
            if not row:
                continue
            report.rows += 1
            try:
                tweet = parse_row(row)
            except (ValueError, CorpusError) as exc:
                report.malformed += 1
                if len(report.errors) < 20:
                    report.errors.append(f"row {report.rows}: {exc}")
                continue
            if tweet.id in tweets:
                report.duplicates += 1
                continue
            tweets[tweet.id] = tweet
            report.parsed += 1
    except (OSError, csv.Error) as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc

    if report.rows and report.skipped / report.rows > MAX_MALFORMED_FRACTION:
        raise CorpusError(
            f"{report.skipped} of {report.rows} rows malformed in {path}; "
            f"wrong file format? first errors: {report.errors[:3]}"
        )
    if report.skipped:
        log.warning("skipped %d malformed and %d duplicate rows", report.malformed, report.duplicates)
    return Corpus(tweets.values()), report


def format_row(tweet: Tweet) -> str:
    """One CSV line (with trailing newline), every field double-quoted."""
    buf = io.StringIO()
    csv.writer(buf, quoting=csv.QUOTE_ALL, lineterminator="\n").writerow(tweet.to_row())
    return buf.getvalue()


def write_csv(corpus: Iterable[Tweet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for tweet in corpus:
            fh.write(format_row(tweet))


def dump_jsonl(corpus: Iterable[Tweet], path: str | Path, header: dict | None = None) -> None:
    """One JSON object per tweet; an optional ``{"header": ...}`` line goes first."""
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(json.dumps({"header": header}, ensure_ascii=False, sort_keys=True) + "\n")
        for tweet in corpus:
            fh.write(json.dumps(tweet.to_json(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_jsonl(path: str | Path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        objs = (json.loads(line) for line in fh if line.strip())
        return Corpus(Tweet.from_json(o) for o in objs if "header" not in o)


def _allocate(counts: dict, sizes: Sequence[int], total: int) -> list[dict]:
    """Per-label quotas for each size, nested across sizes.

    Sizes are filled in ascending order; each extra slot goes to the label
    furthest below its proportional share (label order breaks ties), so a
    label's quota never shrinks as the size grows.
    """
    order = sorted(range(len(sizes)), key=lambda i: sizes[i])
    alloc = {k: 0 for k in counts}
    out: list[dict] = [{} for _ in sizes]
    for i in order:
        s = sizes[i]
        while sum(alloc.values()) < s:
            room = [k for k in counts if alloc[k] < counts[k]]
            k = max(room, key=lambda k: (s * counts[k] / total - alloc[k], -int(k)))
            alloc[k] += 1
        out[i] = dict(alloc)
    return out


def stratified_subsets(corpus: Corpus, sizes: Sequence[int], seed: int) -> list[Corpus]:
    """Nested random subsets that keep the label distribution.

    Each label's tweets are shuffled once with ``seed``; a subset of size
    ``s`` takes the first share of every label's shuffle, so smaller subsets
    are always contained in larger ones.
    """
    if any(t.label is None for t in corpus):
        raise CorpusError("stratified subsets need a fully labelled corpus")
    n = len(corpus)
    for s in sizes:
        if s > n or s < 0:
            raise CorpusError(f"subset size {s} outside corpus of {n} tweets")
    rng = np.random.default_rng(seed)
    by_label: dict[SentimentLabel, list[int]] = {}
    for i, t in enumerate(corpus):
        by_label.setdefault(t.label, []).append(i)
    shuffled = {k: rng.permutation(np.array(v)) for k, v in sorted(by_label.items())}
    counts = {k: len(v) for k, v in shuffled.items()}

    subsets = []
    for alloc in _allocate(counts, list(sizes), n):
        picked = [int(i) for k in shuffled for i in shuffled[k][: alloc[k]]]
        subsets.append(Corpus(corpus[i] for i in picked))
    return subsets
