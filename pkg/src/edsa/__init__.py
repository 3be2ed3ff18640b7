"""Bursty-event detection and ensemble sentiment labelling for tweet corpora.

Subpackages: ``corpus`` (CSV ingest and subsets), ``preprocess`` (token
pipelines), ``vectorize`` (bag-of-words, TF-IDF, CBOW), ``events`` (MABED,
online LDA, Peaky Topics), ``classifiers`` (six sentiment models),
``ensemble`` (majority vote), ``evaluation`` (k-fold metrics), ``cli``.
"""
__version__ = "0.1.0"
