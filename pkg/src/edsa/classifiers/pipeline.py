"""A trained sentiment model bundled with its preprocessing and featuriser.

Bag-of-words models (nb, lr, rc, svm) carry a Vocabulary. The softmax head
reads either external per-tweet vectors or mean CBOW vectors; the LSTM reads
CBOW vector sequences. The CBOW embeddings are trained on the model's own
training documents.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import container
from ..corpus import Tweet
from ..preprocess import Pipeline, PipelineSpec, TokenizedDoc, apply_all
from ..vectorize import (
    CbowModel,
    ExternalEmbeddings,
    Scheme,
    Vocabulary,
    mean_vector,
    terms_digest,
    train_cbow,
    transform,
)
from .base import ClassifierError, HashMismatch, Prediction
from .linear import LinearKind, LinearModel, train_linear
from .lstm import DEFAULTS as LSTM_DEFAULTS
from .lstm import LstmModel, train_lstm, train_lstm_tokens
from .nb import NbModel, train_nb
from .softmax import SoftmaxHead, train_softmax_head

FORMAT = "edsa-model"
CBOW_DEFAULTS = {"dim": 100, "window": 5, "epochs": 5, "lr": 0.025, "negatives": 5, "batch_size": 64}


class ModelName(str, enum.Enum):
    NB = "nb"
    LR = "lr"
    RC = "rc"
    SVM = "svm"
    SOFTMAX = "softmax"
    LSTM = "lstm"

    @property
    def scheme(self) -> Scheme | None:
        return {"nb": Scheme.RAW, "rc": Scheme.RAW, "lr": Scheme.TFIDF, "svm": Scheme.TFIDF}.get(self.value)

    @property
    def uses_cbow(self) -> bool:
        return self in (ModelName.SOFTMAX, ModelName.LSTM)


def _token_lists(docs) -> list[tuple[str, ...]]:
    return [d.tokens if isinstance(d, TokenizedDoc) else tuple(d) for d in docs]


def sequences(cbow: CbowModel, docs, max_len: int) -> list[np.ndarray]:
    """Per-doc (T, dim) vector sequences, truncated to ``max_len``.

    Unknown tokens map to zero vectors; an empty doc becomes one zero step.
    """
    out = []
    for toks in _token_lists(docs):
        idx = [cbow.index.get(t, -1) for t in toks[:max_len]] or [-1]
        seq = np.zeros((len(idx), cbow.dim))
        known = [k for k, j in enumerate(idx) if j >= 0]
        seq[known] = cbow.V_in[[idx[k] for k in known]]
        out.append(seq)
    return out


def standardized(cbow: CbowModel) -> CbowModel:
    """Copy of ``cbow`` whose input vectors are z-scored per dimension over the vocabulary.

    Raw CBOW vectors are small and share one dominant direction; centring and
    scaling them gives the downstream classifiers usable inputs.
    """
    mu, sd = cbow.V_in.mean(axis=0), cbow.V_in.std(axis=0)
    sd[sd == 0] = 1.0
    return CbowModel(cbow.vocab, (cbow.V_in - mu) / sd, cbow.U, cbow.window, cbow.seed, cbow.losses)


@dataclass
class SentimentPipeline:
    name: ModelName
    satp: PipelineSpec
    model: NbModel | LinearModel | SoftmaxHead | LstmModel
    vocab: Vocabulary | None = None
    cbow: CbowModel | None = None
    embeddings: ExternalEmbeddings | None = None

    @property
    def vocab_hash(self) -> str:
        if self.vocab is not None:
            return self.vocab.digest()
        return terms_digest(self.cbow.vocab) if self.cbow is not None else ""

    def tokens(self, tweets: Sequence[Tweet]) -> list[TokenizedDoc]:
        return apply_all(tweets, self.satp)

    def features(self, tweets: Sequence[Tweet], docs=None):
        """Model input for ``tweets``; ``docs`` may pass already-preprocessed tokens."""
        docs = self.tokens(tweets) if docs is None else docs
        if self.name.scheme is not None:
            return transform(docs, self.vocab, self.name.scheme)
        if self.name is ModelName.LSTM:
            return sequences(self.cbow, docs, int(self.model.hyperparams.get("max_len", LSTM_DEFAULTS["max_len"])))
        if self.embeddings is not None:
            return self.embeddings.matrix([t.id for t in tweets])
        if self.cbow is None:
            raise ClassifierError("softmax head was trained on external vectors; supply them")
        return np.stack([mean_vector(self.cbow, d) for d in docs]) if docs else np.zeros((0, self.cbow.dim))

    def predict_tweets(self, tweets: Sequence[Tweet]) -> list[Prediction]:
        if not len(tweets):
            return []
        return self.model.predict_batch(self.features(tweets))

    def predict_tweet(self, tweet: Tweet) -> Prediction:
        return self.predict_tweets([tweet])[0]

    def save(self, path: str | Path, seed: int | None = None, meta: dict | None = None) -> None:
        """Write the container; ``meta`` entries are added to its manifest."""
        model = self.model
        manifest = {
            **(meta or {}),
            "format": FORMAT,
            "kind": self.name.value,
            "pipeline": {k: (v.value if isinstance(v, enum.Enum) else v) for k, v in asdict(self.satp).items()},
            "dims": {"input": int(model.dim)},
            "hyperparams": model.hyperparams,
            "seed": int(getattr(model, "seed", 0) if seed is None else seed),
            "vocab_hash": self.vocab_hash,
            "external_vectors": self.embeddings is not None or (self.name.uses_cbow and self.cbow is None),
        }
        if isinstance(model, LinearModel):
            manifest["linear_kind"] = model.kind.value
        if isinstance(model, LstmModel):
            manifest["dims"]["hidden"] = model.n
        arrays = {f"model.{k}": v for k, v in model.arrays().items()}
        if self.vocab is not None:
            manifest["vocab"] = self.vocab.to_json()
        if self.cbow is not None:
            manifest["cbow"] = {"vocab": self.cbow.vocab, "window": self.cbow.window, "seed": self.cbow.seed}
            arrays["cbow.V_in"] = self.cbow.V_in
        container.write(path, manifest, arrays)

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary | None = None,
             embeddings: ExternalEmbeddings | None = None) -> "SentimentPipeline":
        manifest, arrays = container.read(path)
        if manifest.get("format") != FORMAT:
            raise ClassifierError(f"{path}: not a sentiment model file")
        name = ModelName(manifest["kind"])
        pfields = dict(manifest["pipeline"])
        satp = PipelineSpec(**dict(pfields, name=Pipeline(pfields["name"])))
        own_vocab = Vocabulary.from_json(manifest["vocab"]) if "vocab" in manifest else None
        cbow = None
        if "cbow" in manifest:
            c = manifest["cbow"]
            V_in = arrays["cbow.V_in"]
            cbow = CbowModel(c["vocab"], V_in, np.zeros_like(V_in), c["window"], c["seed"])
        stored = own_vocab.digest() if own_vocab is not None else (terms_digest(cbow.vocab) if cbow else "")
        if stored != manifest["vocab_hash"]:
            raise HashMismatch(f"{path}: embedded vocabulary does not match its hash")
        if vocab is not None and vocab.digest() != manifest["vocab_hash"]:
            raise HashMismatch(
                f"{path}: model/vocab hash mismatch ({manifest['vocab_hash']} vs {vocab.digest()})"
            )
        a = {k.split(".", 1)[1]: v for k, v in arrays.items() if k.startswith("model.")}
        hp, seed = manifest["hyperparams"], manifest["seed"]
        h = manifest["vocab_hash"]
        if name is ModelName.NB:
            model = NbModel(a["log_prior"], a["log_lik"], h, hp.get("alpha", 1.0))
        elif name.scheme is not None:
            model = LinearModel(LinearKind(manifest["linear_kind"]), a["beta"], a["scale"], hp, h, seed)
        elif name is ModelName.SOFTMAX:
            model = SoftmaxHead(a["W"], a["b"], hp, seed, [], h)
        else:
            head = SoftmaxHead(a["W_y"], a["b_y"], {}, seed)
            model = LstmModel(a["W"], a["V"], a["b"], head, hp, seed, [], h)
        if manifest.get("external_vectors") and embeddings is None:
            raise ClassifierError(f"{path}: model reads external vectors; supply the embeddings file")
        return cls(name, satp, model, own_vocab, cbow, embeddings)


def train_pipeline(
    name: ModelName | str,
    tweets: Sequence[Tweet],
    labels=None,
    pipeline: str | Pipeline | PipelineSpec = Pipeline.SCT,
    hyperparams: dict | None = None,
    seed: int = 0,
    embeddings: ExternalEmbeddings | None = None,
    cbow_params: dict | None = None,
    docs: Sequence[TokenizedDoc] | None = None,
) -> SentimentPipeline:
    """Preprocess, featurise and fit one model. ``labels`` default to the tweets' own."""
    name = ModelName(name)
    satp = pipeline if isinstance(pipeline, PipelineSpec) else PipelineSpec.resolve(pipeline)
    labels = [t.label for t in tweets] if labels is None else list(labels)
    docs = apply_all(tweets, satp) if docs is None else docs
    if name.scheme is not None:
        vocab = Vocabulary.build(_token_lists(docs))
        if not len(vocab):
            raise ClassifierError("training documents are all empty after preprocessing")
        X = transform(docs, vocab, name.scheme)
        if name is ModelName.NB:
            unknown = set(hyperparams or {}) - {"alpha"}
            if unknown:
                raise ClassifierError(f"unknown nb hyperparameters: {sorted(unknown)}")
            model = train_nb(X, labels, alpha=(hyperparams or {}).get("alpha", 1.0), vocab_hash=vocab.digest())
        else:
            model = train_linear(X, labels, name.value, hyperparams, seed=seed, vocab_hash=vocab.digest())
        return SentimentPipeline(name, satp, model, vocab=vocab)

    if name is ModelName.SOFTMAX and embeddings is not None:
        model = train_softmax_head(embeddings.matrix([t.id for t in tweets]), labels, hyperparams, seed)
        return SentimentPipeline(name, satp, model, embeddings=embeddings)
    cp = dict(CBOW_DEFAULTS)
    unknown = set(cbow_params or {}) - set(cp)
    if unknown:
        raise ClassifierError(f"unknown cbow hyperparameters: {sorted(unknown)}")
    cp.update(cbow_params or {})
    cbow = standardized(train_cbow(docs, seed=seed, **cp))
    if name is ModelName.SOFTMAX:
        X = np.stack([mean_vector(cbow, d) for d in docs])
        model = train_softmax_head(X, labels, hyperparams, seed)
    else:
        hp = dict(LSTM_DEFAULTS, **(hyperparams or {}))
        if hp["tune_embeddings"]:
            rows = [[cbow.index.get(t, -1) for t in toks] for toks in _token_lists(docs)]
            model, table = train_lstm_tokens(rows, cbow.V_in, labels, hyperparams, seed)
            cbow = CbowModel(cbow.vocab, table, cbow.U, cbow.window, cbow.seed, cbow.losses)
        else:
            model = train_lstm(sequences(cbow, docs, int(hp["max_len"])), labels, hyperparams, seed)
    model.vocab_hash = terms_digest(cbow.vocab)
    return SentimentPipeline(name, satp, model, cbow=cbow)
