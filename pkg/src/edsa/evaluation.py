"""Accuracy, precision and recall under stratified k-fold cross-validation."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .classifiers import Prediction, train_pipeline
from .corpus import SentimentLabel, Tweet

CSV_COLUMNS = ("dataset", "algorithm", "term_weight", "pipeline", "accuracy", "precision", "recall")


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float | None:
        return (self.tp + self.tn) / self.total if self.total else None

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    def __add__(self, other: "Metrics") -> "Metrics":
        return Metrics(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    def to_dict(self) -> dict:
        return dict(asdict(self), accuracy=self.accuracy, precision=self.precision, recall=self.recall)


def _label(x) -> SentimentLabel:
    return x.label if isinstance(x, Prediction) else SentimentLabel(x)


def score(preds: Sequence, truth: Sequence, positive_class: SentimentLabel = SentimentLabel.POSITIVE) -> Metrics:
    """Confusion counts with ``positive_class`` as the positive class."""
    if len(preds) != len(truth):
        raise EvaluationError(f"{len(preds)} predictions for {len(truth)} labels")
    p = np.array([_label(x) == positive_class for x in preds], dtype=bool)
    t = np.array([SentimentLabel(x) == positive_class for x in truth], dtype=bool)
    return Metrics(int(np.sum(p & t)), int(np.sum(p & ~t)), int(np.sum(~p & ~t)), int(np.sum(~p & t)))


def stratified_folds(labels: Sequence, k: int, seed: int = 42) -> list[np.ndarray]:
    """Sorted index arrays of ``k`` folds; each class is shuffled and dealt round-robin."""
    if k < 2:
        raise EvaluationError("k-fold needs k >= 2")
    labels = np.array([int(x) for x in labels])
    if k > len(labels):
        raise EvaluationError(f"k={k} exceeds {len(labels)} documents")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if len(members) < k:
            raise EvaluationError(f"class {SentimentLabel(c).name} has {len(members)} documents, fewer than k={k}")
        members = members[rng.permutation(len(members))]
        for j, i in enumerate(members):
            folds[(j + offset) % k].append(int(i))
        # Continue dealing where the last class stopped so fold sizes differ by at most one.
        offset = (offset + len(members)) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


@dataclass
class KFoldResult:
    folds: list[Metrics]

    @property
    def pooled(self) -> Metrics:
        out = Metrics(0, 0, 0, 0)
        for m in self.folds:
            out = out + m
        return out

    def mean(self, name: str) -> float | None:
        vals = [getattr(m, name) for m in self.folds]
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else None

    @property
    def accuracy(self) -> float | None:
        return self.mean("accuracy")

    @property
    def precision(self) -> float | None:
        return self.mean("precision")

    @property
    def recall(self) -> float | None:
        return self.mean("recall")

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
            "folds": [m.to_dict() for m in self.folds],
        }


Trainer = Callable[[Sequence[Tweet]], object]


def kfold(tweets: Sequence[Tweet], trainer: Trainer, k: int = 5, seed: int = 42, threads: int = 1) -> KFoldResult:
    """Retrain on k-1 folds, score the held-out fold; repeat for every fold.

    ``trainer`` maps training tweets to an object with ``predict_tweets``.
    """
    tweets = list(tweets)
    labels = [t.label for t in tweets]
    if any(lab is None for lab in labels):
        raise EvaluationError("k-fold needs labelled tweets")
    folds = stratified_folds(labels, k, seed)

    def run(j):
        held = set(folds[j].tolist())
        train = [tweets[i] for i in range(len(tweets)) if i not in held]
        test = [tweets[i] for i in folds[j]]
        model = trainer(train)
        return score(model.predict_tweets(test), [t.label for t in test])

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        return KFoldResult(list(pool.map(run, range(k))))


def holdout(tweets: Sequence[Tweet], trainer: Trainer, test_fraction: float = 0.2, seed: int = 42) -> Metrics:
    """Single stratified split scored once."""
    tweets = list(tweets)
    k = int(round(1.0 / test_fraction))
    test_idx = stratified_folds([t.label for t in tweets], k, seed)[0]
    held = set(test_idx.tolist())
    model = trainer([t for i, t in enumerate(tweets) if i not in held])
    test = [tweets[i] for i in test_idx]
    return score(model.predict_tweets(test), [t.label for t in test])


def model_trainer(name: str, pipeline: str = "sct", hyperparams: dict | None = None, seed: int = 0, **kw) -> Trainer:
    def train(tweets):
        return train_pipeline(name, tweets, pipeline=pipeline, hyperparams=hyperparams, seed=seed, **kw)
    return train


def ensemble_trainer(names: Sequence[str], pipeline: str = "sct", hyperparams: dict | None = None,
                     seed: int | Mapping[str, int] = 0, threads: int = 1, **kw) -> Trainer:
    """Train every named model and vote.

    ``hyperparams`` maps model name to its settings; ``seed`` is one seed for
    all models or a per-model mapping.
    """
    from .ensemble import VotingEnsemble

    seeds = seed if isinstance(seed, Mapping) else {n: seed for n in names}

    def train(tweets):
        pipes = {n: train_pipeline(n, tweets, pipeline=pipeline, hyperparams=(hyperparams or {}).get(n),
                                   seed=seeds[n], **kw) for n in names}
        return VotingEnsemble(pipes, threads)
    return train


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.4f}"


def metrics_csv(rows: Sequence[dict]) -> str:
    """Table-shaped CSV; each row has the CSV_COLUMNS keys, missing ratios left blank."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r["dataset"], r["algorithm"], r["term_weight"], r["pipeline"],
                    _fmt(r.get("accuracy")), _fmt(r.get("precision")), _fmt(r.get("recall"))])
    return buf.getvalue()
