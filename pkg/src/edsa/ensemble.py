"""Event-level and tweet-level sentiment by majority vote over several models.

For every detection method the corpus is tokenised with the CT pipeline and
its events detected. Each event's member tweets are labelled by every
sentiment model. A model's label for the event is the mode of its tweet
labels; a tweet's voted label is the mode across models; the event's voted
label is the mode of the models' event labels. Ties go to the smallest label
in the order Negative < Neutral < Positive.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .classifiers import Prediction, SentimentPipeline
from .corpus import Corpus, SentimentLabel
from .events import Event, Method, detect, make_slices
from .preprocess import Pipeline, PipelineSpec, apply_all
from .seeding import derive_seed

log = logging.getLogger(__name__)


class EnsembleError(ValueError):
    pass


def mode(labels: Sequence[SentimentLabel]) -> SentimentLabel:
    """Most frequent label; ties resolve to the smallest label."""
    if not len(labels):
        raise EnsembleError("mode of an empty label list")
    counts = Counter(SentimentLabel(x) for x in labels)
    top = max(counts.values())
    return min(lab for lab, c in counts.items() if c == top)


def _name(label: SentimentLabel) -> str:
    return SentimentLabel(label).name.lower()


@dataclass(frozen=True)
class EventVote:
    method: Method
    event: Event
    vote: SentimentLabel
    per_model: dict[str, SentimentLabel]
    tweets: dict[int, SentimentLabel]  # tweet id -> voted label
    tweet_models: dict[int, dict[str, SentimentLabel]]  # tweet id -> model -> label


@dataclass
class EnsembleReport:
    """Voted labels per (method, event, tweet) and per (method, event)."""

    events: list[EventVote] = field(default_factory=list)
    models: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def individual(self) -> dict[tuple[str, int, int], SentimentLabel]:
        """Per-tweet voted labels keyed by (method, event rank, tweet id)."""
        out = {}
        for k, ev in self._ranked():
            for tid, lab in ev.tweets.items():
                out[(ev.method.value, k, tid)] = lab
        return out

    @property
    def event_labels(self) -> dict[tuple[str, int], SentimentLabel]:
        """Per-event voted labels keyed by (method, event rank)."""
        return {(ev.method.value, k): ev.vote for k, ev in self._ranked()}

    def _ranked(self):
        counters: Counter = Counter()
        for ev in self.events:
            yield counters[ev.method], ev
            counters[ev.method] += 1

    def to_json(self) -> dict:
        methods = []
        for m in sorted({ev.method for ev in self.events}, key=lambda m: m.value):
            evs = []
            for ev in (e for e in self.events if e.method is m):
                evs.append({
                    "keywords": ev.event.terms,
                    "interval": [ev.event.start, ev.event.end],
                    "magnitude": ev.event.magnitude,
                    "vote": _name(ev.vote),
                    "per_model": {k: _name(v) for k, v in sorted(ev.per_model.items())},
                    "tweets": [
                        {"id": tid, "vote": _name(ev.tweets[tid]),
                         "per_model": {k: _name(v) for k, v in sorted(ev.tweet_models[tid].items())}}
                        for tid in sorted(ev.tweets)
                    ],
                })
            methods.append({"name": m.value, "events": evs})
        return dict(self.meta, models=list(self.models), methods=methods)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        """One row per (method, event, tweet) with every model's label."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "event", "start", "end", "magnitude", "keywords", "event_vote",
                    "tweet_id", "tweet_vote", *self.models])
        for k, ev in self._ranked():
            for tid in sorted(ev.tweets):
                w.writerow([
                    ev.method.value, k, ev.event.start, ev.event.end, repr(ev.event.magnitude),
                    " ".join(ev.event.terms), _name(ev.vote), tid, _name(ev.tweets[tid]),
                    *(_name(ev.tweet_models[tid][m]) for m in self.models),
                ])
        return buf.getvalue()


def vote_event(method: Method, event: Event, predictions: Mapping[str, Mapping[int, SentimentLabel]]) -> EventVote:
    """Assemble one event's votes from per-model tweet labels."""
    tids = sorted(event.tweet_ids)
    models = sorted(predictions)
    per_model = {m: mode([predictions[m][t] for t in tids]) for m in models}
    tweet_models = {t: {m: predictions[m][t] for m in models} for t in tids}
    tweets = {t: mode(list(tweet_models[t].values())) for t in tids}
    return EventVote(method, event, mode(list(per_model.values())), per_model, tweets, tweet_models)


class VotingEnsemble:
    """Per-tweet majority vote of several trained pipelines.

    The score is the fraction of models that voted for the winning label.
    """

    def __init__(self, pipelines: Mapping[str, SentimentPipeline], threads: int = 1):
        if not pipelines:
            raise EnsembleError("an ensemble needs at least one model")
        self.pipelines = dict(sorted(pipelines.items()))
        self.threads = max(1, int(threads))

    def predict_all(self, tweets) -> dict[str, list[Prediction]]:
        names = list(self.pipelines)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(pool.map(lambda n: self.pipelines[n].predict_tweets(tweets), names))
        return dict(zip(names, results))

    def predict_tweets(self, tweets) -> list[Prediction]:
        per = self.predict_all(tweets)
        out = []
        for i in range(len(tweets)):
            labels = [per[m][i].label for m in per]
            win = mode(labels)
            out.append(Prediction(win, labels.count(win) / len(labels)))
        return out


def detect_events(
    corpus: Corpus,
    method: Method | str,
    num_slices: int = 32,
    top_k: int = 50,
    seed: int = 0,
    docs=None,
    **params,
) -> list[Event]:
    """CT preprocessing, time slicing and one detector."""
    docs = apply_all(corpus, PipelineSpec.resolve(Pipeline.CT)) if docs is None else docs
    slices = make_slices(corpus, num_slices, docs)
    return detect(method, slices, top_k=top_k, seed=seed, **params)


def run_edsa(
    corpus: Corpus,
    methods: Mapping[Method | str, dict] | Sequence[Method | str],
    models: Mapping[str, SentimentPipeline],
    events: Mapping[Method | str, Sequence[Event]] | None = None,
    threads: int = 1,
    num_slices: int = 32,
    top_k: int = 50,
    seed: int = 0,
) -> EnsembleReport:
    """Detect events, label their tweets with every model and reduce by mode vote.

    ``methods`` maps each detection method to its keyword parameters.
    Precomputed ``events`` skip detection for the methods they cover; each
    detector's seed is derived from ``seed`` and the method name. The
    result does not depend on ``threads``: work items are keyed and reduced
    in sorted order.
    """
    if not models:
        raise EnsembleError("no sentiment models enabled")
    if not isinstance(methods, Mapping):
        methods = {m: {} for m in methods}
    methods = {Method(m): dict(p) for m, p in methods.items()}
    given = {Method(m): list(v) for m, v in (events or {}).items()}
    threads = max(1, int(threads))
    todo = [m for m in sorted(methods, key=lambda m: m.value) if m not in given]

    found: dict[Method, list[Event]] = dict(given)
    if todo:
        edtp = apply_all(corpus, PipelineSpec.resolve(Pipeline.CT))

        def run(m):
            return detect_events(corpus, m, num_slices, top_k, derive_seed(seed, f"events/{m.value}"),
                                 docs=edtp, **methods[m])

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for m, evs in zip(todo, pool.map(run, todo)):
                found[m] = evs

    kept: list[tuple[Method, Event]] = []
    for m in sorted(methods, key=lambda m: m.value):
        for ev in found.get(m, []):
            missing = [t for t in ev.tweet_ids if t not in corpus]
            if missing:
                raise EnsembleError(f"{m.value} event lists tweet {missing[0]} absent from the corpus")
            if not ev.tweet_ids:
                log.warning("%s event %s has no member tweets; dropped", m.value, ev.terms[:3])
                continue
            kept.append((m, ev))

    # Every member tweet is labelled once per model, then votes are reduced.
    ids = sorted({t for _, ev in kept for t in ev.tweet_ids})
    tweets = [corpus.get(t) for t in ids]
    ensemble = VotingEnsemble(models, threads)
    per = ensemble.predict_all(tweets)
    predictions = {m: {t: p.label for t, p in zip(ids, preds)} for m, preds in per.items()}

    votes = [vote_event(m, ev, predictions) for m, ev in kept]
    return EnsembleReport(votes, tuple(sorted(models)))
