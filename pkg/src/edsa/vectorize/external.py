"""Dense per-tweet vectors produced outside this package.

File format, UTF-8, one row per tweet::

    <id>\\t<f1> <f2> ... <fd>
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from .bow import VectorizeError


class ExternalEmbeddings:
    def __init__(self, vectors: Mapping[int, np.ndarray]):
        self.vectors = {int(k): np.asarray(v, dtype=np.float64) for k, v in vectors.items()}
        dims = {v.shape for v in self.vectors.values()}
        if len(dims) > 1:
            raise VectorizeError(f"vectors of differing shapes {sorted(dims)}")
        self.dim = next(iter(dims))[0] if dims else 0
        for k, v in self.vectors.items():
            if not np.all(np.isfinite(v)):
                raise VectorizeError(f"non-finite entry in vector {k}")

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, tweet_id: int) -> np.ndarray:
        return self.vectors[tweet_id]

    def __contains__(self, tweet_id: int) -> bool:
        return tweet_id in self.vectors

    def matrix(self, ids) -> np.ndarray:
        missing = [i for i in ids if i not in self.vectors]
        if missing:
            raise VectorizeError(f"{len(missing)} tweets have no external vector, e.g. {missing[0]}")
        return np.stack([self.vectors[i] for i in ids]) if ids else np.zeros((0, self.dim))


def load_embeddings(path: str | Path) -> ExternalEmbeddings:
    vectors: dict[int, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                key, values = line.split("\t", 1)
                tweet_id = int(key)
                vec = np.array([float(x) for x in values.split()], dtype=np.float64)
            except ValueError as exc:
                raise VectorizeError(f"{path}:{lineno}: {exc}") from exc
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise VectorizeError(f"{path}:{lineno}: expected {dim} values, got {len(vec)}")
            if tweet_id in vectors:
                raise VectorizeError(f"{path}:{lineno}: duplicate id {tweet_id}")
            vectors[tweet_id] = vec
    return ExternalEmbeddings(vectors)


def write_embeddings(emb: ExternalEmbeddings | Mapping[int, np.ndarray], path: str | Path) -> None:
    vectors = emb.vectors if isinstance(emb, ExternalEmbeddings) else emb
    with open(path, "w", encoding="utf-8") as fh:
        for k in sorted(vectors):
            # repr round-trips float64 exactly
            fh.write(f"{k}\t{' '.join(repr(float(x)) for x in vectors[k])}\n")
