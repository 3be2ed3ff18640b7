from .base import CLASSES, ClassifierError, HashMismatch, Prediction, decide, encode_labels, sigmoid
from .linear import (
    LinearKind,
    LinearModel,
    hinge_objective,
    lipschitz_step,
    log_likelihood,
    log_likelihood_grad,
    train_linear,
)
from .lstm import LstmModel, init_params, lstm_forward, lstm_loss_and_grads, pad_batch, train_lstm, train_lstm_tokens
from .nb import NbModel, train_nb
from .pipeline import ModelName, SentimentPipeline, sequences, standardized, train_pipeline
from .softmax import SoftmaxHead, softmax_loss_and_grads, train_softmax_head

__all__ = [
    "CLASSES",
    "ClassifierError",
    "HashMismatch",
    "LinearKind",
    "LinearModel",
    "LstmModel",
    "ModelName",
    "NbModel",
    "Prediction",
    "SentimentPipeline",
    "SoftmaxHead",
    "decide",
    "encode_labels",
    "hinge_objective",
    "init_params",
    "lipschitz_step",
    "log_likelihood",
    "log_likelihood_grad",
    "lstm_forward",
    "lstm_loss_and_grads",
    "pad_batch",
    "sequences",
    "sigmoid",
    "softmax_loss_and_grads",
    "standardized",
    "train_linear",
    "train_lstm",
    "train_lstm_tokens",
    "train_nb",
    "train_pipeline",
    "train_softmax_head",
]
