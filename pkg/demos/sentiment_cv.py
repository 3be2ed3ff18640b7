"""Five-fold comparison of the sentiment models on a synthetic labelled corpus.

The corpus mixes polar phrases with neutral filler and flips a share of
labels, so no model reaches perfect accuracy. Real numbers need the
Sentiment140 file and the ``edsa evaluate`` command.

    python3 demos/sentiment_cv.py
"""
import numpy as np

from edsa.corpus import SentimentLabel
from edsa.evaluation import ensemble_trainer, kfold, metrics_csv, model_trainer
from edsa.synthetic import tweet_corpus

tweets = list(tweet_corpus(2000, seed=3, noise=0.5))
positive = np.array([t.label is SentimentLabel.POSITIVE for t in tweets])
print(f"{len(tweets)} tweets, positive share {positive.mean():.2f}")

# Embedding models get deliberately small settings so the demo runs in seconds;
# they lag the bag-of-words models at this size.
small = {
    "softmax": {"epochs": 20},
    "lstm": {"hidden": 16, "epochs": 3},
}
cbow = {"dim": 32, "epochs": 3}

rows = []
for name in ("nb", "lr", "rc", "svm", "softmax", "lstm"):
    trainer = model_trainer(name, "sct", small.get(name), seed=1, cbow_params=cbow)
    result = kfold(tweets, trainer, k=5, seed=2)
    rows.append({"dataset": "synthetic", "algorithm": name, "term_weight": "", "pipeline": "sct",
                 "accuracy": result.accuracy, "precision": result.precision, "recall": result.recall})
    spread = np.std([m.accuracy for m in result.folds])
    print(f"{name:8s} accuracy {result.accuracy:.3f}  (fold std {spread:.3f})")

names = ["nb", "lr", "rc", "svm", "softmax"]
vote = kfold(tweets, ensemble_trainer(names, "sct", small, seed=1, cbow_params=cbow), k=5, seed=2)
rows.append({"dataset": "synthetic", "algorithm": "edsa", "term_weight": "mixed", "pipeline": "sct",
             "accuracy": vote.accuracy, "precision": vote.precision, "recall": vote.recall})
print(f"{'edsa':8s} accuracy {vote.accuracy:.3f}  (mode vote of {', '.join(names)})")

print()
print(metrics_csv(rows))
