"""Vocabulary and sparse document-term weights (raw counts, TF, TF-IDF)."""
from __future__ import annotations

import enum
import hashlib
import json
import math
import zipfile
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from ..preprocess import TokenizedDoc


class VectorizeError(ValueError):
    pass


class Scheme(str, enum.Enum):
    RAW = "raw"
    TF = "tf"
    TFIDF = "tfidf"


def tf(term_count: float, doc_len: int) -> float:
    if doc_len < 1:
        raise VectorizeError("document length must be at least 1")
    return term_count / doc_len


def idf(n: int, n_j: int) -> float:
    if n_j <= 0:
        raise VectorizeError("term not in vocabulary (document frequency 0)")
    if n_j > n:
        raise VectorizeError(f"document frequency {n_j} exceeds corpus size {n}")
    return math.log(n / n_j)


def tfidf(term_count: float, doc_len: int, n: int, n_j: int) -> float:
    """Length-normalised term frequency times unsmoothed natural-log IDF."""
    return tf(term_count, doc_len) * idf(n, n_j)


def terms_digest(terms: Iterable[str]) -> str:
    """Short order-sensitive hash of a term list, used to pair models with vocabularies."""
    h = hashlib.sha256()
    for t in terms:
        h.update(t.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()[:16]


class Vocabulary:
    """Lexicographically indexed term set with per-term document counts."""

    def __init__(self, terms: Sequence[str], doc_freq: Sequence[int], total_docs: int):
        if len(terms) != len(doc_freq):
            raise VectorizeError("terms and doc_freq differ in length")
        self.terms = list(terms)
        self.index = {t: i for i, t in enumerate(self.terms)}
        if len(self.index) != len(self.terms):
            raise VectorizeError("duplicate terms in vocabulary")
        self.doc_freq = np.asarray(doc_freq, dtype=np.int64)
        self.total_docs = int(total_docs)
        if len(self.terms) and (self.doc_freq.min() < 1 or self.doc_freq.max() > self.total_docs):
            raise VectorizeError("document frequencies must lie in [1, total_docs]")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    @classmethod
    def build(cls, docs: Iterable[Sequence[str]], min_df: int = 1) -> "Vocabulary":
        df: Counter = Counter()
        n = 0
        for tokens in docs:
            n += 1
            df.update(set(tokens))
        terms = sorted(t for t, c in df.items() if c >= min_df)
        return cls(terms, [df[t] for t in terms], n)

    @property
    def idf(self) -> np.ndarray:
        return np.log(self.total_docs / self.doc_freq)

    def digest(self) -> str:
        return terms_digest(self.terms)

    def to_json(self) -> dict:
        return {"terms": self.terms, "doc_freq": self.doc_freq.tolist(), "total_docs": self.total_docs}

    @classmethod
    def from_json(cls, obj: dict) -> "Vocabulary":
        return cls(obj["terms"], obj["doc_freq"], obj["total_docs"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class DocTermMatrix:
    """Rows are documents, columns vocabulary indices.

    Every distinct in-vocabulary token of a document is stored, even when its
    weight is zero (a TF-IDF term present in every document).
    """

    matrix: sp.csr_matrix
    scheme: Scheme

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def row(self, i: int) -> dict[int, float]:
        lo, hi = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return dict(zip(self.matrix.indices[lo:hi].tolist(), self.matrix.data[lo:hi].tolist()))

    def __getitem__(self, rows) -> "DocTermMatrix":
        return DocTermMatrix(self.matrix[rows], self.scheme)

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def save(self, path: str | Path, meta: dict | None = None) -> None:
        """npz archive; ``meta`` is stored as a JSON string under "meta"."""
        m = self.matrix
        arrays = {
            "data": m.data, "indices": m.indices, "indptr": m.indptr, "shape": np.array(m.shape),
            "scheme": np.array(self.scheme.value), "meta": np.array(json.dumps(meta or {}, sort_keys=True)),
        }
        # Fixed entry timestamps keep the archive byte-identical across runs.
        with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
            for name, arr in arrays.items():
                info = zipfile.ZipInfo(f"{name}.npy", date_time=(1980, 1, 1, 0, 0, 0))
                with zf.open(info, "w") as fh:
                    np.lib.format.write_array(fh, np.asanyarray(arr), allow_pickle=False)

    @classmethod
    def load(cls, path: str | Path) -> "DocTermMatrix":
        with np.load(path) as z:
            m = sp.csr_matrix((z["data"], z["indices"], z["indptr"]), shape=tuple(z["shape"]))
            return cls(m, Scheme(str(z["scheme"])))


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenizedDoc) else doc


def transform(docs: Sequence, vocab: Vocabulary, scheme: Scheme | str) -> DocTermMatrix:
    """Weight ``docs`` against a fixed vocabulary; unknown tokens are dropped.

    TF uses the length of the document after unknown tokens are removed, so a
    row's TF weights always sum to one.
    """
    scheme = Scheme(scheme)
    idf_vals = vocab.idf if scheme is Scheme.TFIDF else None
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        counts = Counter(vocab.index[t] for t in _tokens(doc) if t in vocab.index)
        cols = sorted(counts)
        vals = np.array([counts[c] for c in cols], dtype=np.float64)
        if scheme is not Scheme.RAW and len(cols):
            vals = vals / vals.sum()
            if idf_vals is not None:
                vals = vals * idf_vals[cols]
        indices.extend(cols)
        data.extend(vals.tolist())
        indptr.append(len(indices))
    m = sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int32), np.array(indptr)),
        shape=(len(indptr) - 1, len(vocab)),
    )
    return DocTermMatrix(m, scheme)


def build_matrix(
    docs: Sequence, scheme: Scheme | str = Scheme.RAW, min_df: int = 1
) -> tuple[Vocabulary, DocTermMatrix]:
    if not docs:
        raise VectorizeError("no documents")
    toks = [_tokens(d) for d in docs]
    if not any(toks):
        raise VectorizeError("every document is empty")
    vocab = Vocabulary.build(toks, min_df=min_df)
    return vocab, transform(toks, vocab, scheme)
