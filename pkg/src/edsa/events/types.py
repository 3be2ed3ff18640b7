from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

KEYWORDS_PER_EVENT = 10


class EventError(ValueError):
    pass


class Method(str, enum.Enum):
    MABED = "mabed"
    OLDA = "olda"
    PEAKY = "peaky"

    @property
    def title(self) -> str:
        return {"mabed": "MABED", "olda": "OLDA", "peaky": "Peaky Topics"}[self.value]


@dataclass(frozen=True)
class Event:
    method: Method
    keywords: tuple[tuple[str, float], ...]
    start: int
    end: int
    magnitude: float
    tweet_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.start > self.end:
            raise EventError(f"interval start {self.start} after end {self.end}")
        if self.magnitude < 0:
            raise EventError("negative magnitude")
        terms = [k for k, _ in self.keywords]
        if len(set(terms)) != len(terms):
            raise EventError(f"repeated keywords {terms}")

    @property
    def terms(self) -> list[str]:
        return [k for k, _ in self.keywords]

    def sort_key(self):
        first = self.keywords[0][0] if self.keywords else ""
        return (-self.magnitude, self.start, first)

    def shifted(self, offset: int) -> "Event":
        return Event(self.method, self.keywords, self.start + offset, self.end + offset,
                     self.magnitude, self.tweet_ids)

    def to_json(self, with_ids: bool = True) -> dict:
        out = {
            "method": self.method.value,
            "magnitude": self.magnitude,
            "start": self.start,
            "end": self.end,
            "keywords": self.terms,
            "weights": [w for _, w in self.keywords],
            "tweet_count": len(self.tweet_ids),
        }
        if with_ids:
            out["tweet_ids"] = list(self.tweet_ids)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Event":
        weights = obj.get("weights") or [0.0] * len(obj["keywords"])
        return cls(
            Method(obj["method"]),
            tuple(zip(obj["keywords"], (float(w) for w in weights))),
            int(obj["start"]),
            int(obj["end"]),
            float(obj["magnitude"]),
            tuple(int(i) for i in obj.get("tweet_ids", ())),
        )


def rank(events: Iterable[Event]) -> list[Event]:
    """Descending magnitude; ties by earliest start, then first keyword."""
    return sorted(events, key=Event.sort_key)


def merge_duplicates(events: Sequence[Event], threshold: int | None = 5) -> list[Event]:
    """Fold events sharing ``threshold`` or more keywords into the stronger one.

    Events are visited in rank order; a duplicate widens the kept event's
    interval and adds its tweets, the kept keywords and magnitude stay.
    ``threshold`` of None or 0 disables merging.
    """
    kept: list[Event] = []
    for ev in rank(events):
        if threshold:
            terms = set(ev.terms)
            hit = next((i for i, k in enumerate(kept) if len(terms & set(k.terms)) >= threshold), None)
            if hit is not None:
                k = kept[hit]
                kept[hit] = Event(
                    k.method, k.keywords, min(k.start, ev.start), max(k.end, ev.end), k.magnitude,
                    tuple(sorted(set(k.tweet_ids) | set(ev.tweet_ids))),
                )
                continue
        kept.append(ev)
    return rank(kept)


def events_to_json(events: Sequence[Event], **extra) -> str:
    payload = [e.to_json() for e in events]
    if extra:
        return json.dumps(dict(extra, events=payload), indent=1, sort_keys=True)
    return json.dumps(payload, indent=1, sort_keys=True)


def _fmt_ts(ts: int) -> str:
    return time.strftime("%Y-%m-%d %H:%M:%S", time.gmtime(ts))


def format_table(events: Sequence[Event]) -> str:
    """Fixed-width text table: Magnitude, Start Date, End Date, Topic."""
    rows = [("Magnitude", "Start Date", "End Date", "Topic")]
    for e in events:
        mag = f"{e.magnitude:.0f}" if float(e.magnitude).is_integer() else f"{e.magnitude:.2f}"
        rows.append((mag, _fmt_ts(e.start), _fmt_ts(e.end), " ".join(e.terms)))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = []
    for r in rows:
        lines.append("  ".join(c.rjust(w) if i == 0 else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))) + "  " + r[3])
    return "\n".join(lines) + "\n"
