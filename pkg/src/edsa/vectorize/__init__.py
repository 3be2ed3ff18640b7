from .bow import (
    DocTermMatrix,
    Scheme,
    VectorizeError,
    Vocabulary,
    build_matrix,
    idf,
    tf,
    terms_digest,
    tfidf,
    transform,
)
from .cbow import CbowModel, embed_doc, mean_vector, train_cbow
from .external import ExternalEmbeddings, load_embeddings, write_embeddings

__all__ = [
    "CbowModel",
    "DocTermMatrix",
    "ExternalEmbeddings",
    "Scheme",
    "VectorizeError",
    "Vocabulary",
    "build_matrix",
    "embed_doc",
    "idf",
    "load_embeddings",
    "mean_vector",
    "tf",
    "terms_digest",
    "tfidf",
    "train_cbow",
    "transform",
    "write_embeddings",
]
