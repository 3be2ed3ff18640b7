"""End to end on synthetic data: detect events, label their tweets, vote.

Each tweet in an event gets one label per model, the mode across models is
the tweet's label, and the mode across the event's tweets is the event's
label. Ties go to Negative.

    python3 demos/edsa_pipeline.py
"""
from collections import Counter

from edsa.classifiers import train_pipeline
from edsa.ensemble import run_edsa
from edsa.seeding import derive_seed
from edsa.synthetic import tweet_corpus

SEED = 42
corpus = tweet_corpus(1500, seed=5)
train = list(corpus)[:1000]
print(f"training on {len(train)} tweets, detecting events in {len(corpus)}")

models = {name: train_pipeline(name, train, seed=derive_seed(SEED, f"model/{name}"))
          for name in ("nb", "lr", "rc", "svm")}

report = run_edsa(corpus, ["mabed", "peaky"], models, num_slices=16, top_k=5, seed=SEED)

for vote in report.events:
    ev = vote.event
    tally = Counter(lab.name.lower() for lab in vote.tweets.values())
    print(f"{ev.method.value:6s} mag {ev.magnitude:8.2f}  {' '.join(ev.terms[:5]):40s} "
          f"{vote.vote.name.lower():8s} tweets {dict(tally)}")

agree = sum(len(set(v.per_model.values())) == 1 for v in report.events)
print(f"\n{agree}/{len(report.events)} events labelled the same by every model")
print("first CSV rows:")
print("\n".join(report.to_csv().splitlines()[:4]))
