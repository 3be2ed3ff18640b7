"""Single-layer LSTM with a softmax head on the final hidden state.

Per step, in this order::

    i_t  = sigmoid(W_i x_t + V_i h_{t-1} + b_i)
    f_t  = sigmoid(W_f x_t + V_f h_{t-1} + b_f)
    o_t  = sigmoid(W_o x_t + V_o h_{t-1} + b_o)
    c~_t = tanh(W_c x_t + V_c h_{t-1} + b_c)
    c_t  = f_t * c_{t-1} + i_t * c~_t
    h_t  = o_t * tanh(c_t)

with h_0 = c_0 = 0. The four gate blocks are stored stacked in the order
i, f, o, c: ``W`` is (4n, m), ``V`` is (4n, n), ``b`` is (4n,). Batches of
unequal length are right-padded; past a sequence's end its state is carried
unchanged, so the head always sees the state after the last real token.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .base import CLASSES, ClassifierError, Prediction, encode_labels, sigmoid, softmax
from .softmax import SoftmaxHead

log = logging.getLogger(__name__)

GATES = ("i", "f", "o", "c")
DEFAULTS = {
    "hidden": 128, "epochs": 10, "batch_size": 64, "lr": 1e-3, "clip": 5.0, "max_len": 30,
    "tune_embeddings": True,
}


@dataclass
class LstmModel:
    W: np.ndarray
    V: np.ndarray
    b: np.ndarray
    head: SoftmaxHead
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0
    losses: list = field(default_factory=list)
    vocab_hash: str = ""
    kind: str = field(default="lstm", init=False)

    def __post_init__(self):
        n = self.V.shape[1]
        if self.W.shape[0] != 4 * n or self.V.shape != (4 * n, n) or self.b.shape != (4 * n,):
            raise ClassifierError("LSTM parameter shapes are inconsistent")
        if self.head.dim != n:
            raise ClassifierError("head input size differs from the hidden size")
        for a in (self.W, self.V, self.b):
            if not np.all(np.isfinite(a)):
                raise ClassifierError("non-finite LSTM parameters")

    @property
    def n(self) -> int:
        return self.V.shape[1]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    dim = m

    def gate(self, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(W, V, b) blocks of one gate: ``i``, ``f``, ``o`` or ``c``."""
        k = GATES.index(name)
        s = slice(k * self.n, (k + 1) * self.n)
        return self.W[s], self.V[s], self.b[s]

    def params(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "V": self.V, "b": self.b, "W_y": self.head.W, "b_y": self.head.b}

    arrays = params

    def final_hidden(self, seqs) -> np.ndarray:
        X, lengths = pad_batch(seqs, self.m)
        return _forward(self.params(), X, lengths)[0]

    def predict_batch(self, seqs) -> list[Prediction]:
        return self.head.predict_batch(self.final_hidden(seqs)) if len(seqs) else []

    def predict(self, seq) -> Prediction:
        return self.predict_batch([seq])[0]


def pad_batch(seqs: Sequence[np.ndarray], m: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack (T_i, m) sequences into a zero-padded (B, T, m) array plus lengths."""
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    if len(seqs) and lengths.min() < 1:
        raise ClassifierError("sequences must hold at least one step")
    T = int(lengths.max()) if len(seqs) else 0
    X = np.zeros((len(seqs), T, m))
    for k, s in enumerate(seqs):
        s = np.asarray(s, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != m:
            raise ClassifierError(f"expected steps of dimension {m}, got shape {s.shape}")
        X[k, : len(s)] = s
    return X, lengths


def _forward(p: dict, X: np.ndarray, lengths: np.ndarray):
    B, T, _ = X.shape
    n = p["V"].shape[1]
    pre_x = X @ p["W"].T + p["b"]  # (B, T, 4n)
    h = np.zeros((B, n))
    c = np.zeros((B, n))
    cache = []
    for t in range(T):
        a = pre_x[:, t] + h @ p["V"].T
        i = sigmoid(a[:, :n])
        f = sigmoid(a[:, n: 2 * n])
        o = sigmoid(a[:, 2 * n: 3 * n])
        g = np.tanh(a[:, 3 * n:])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        active = (t < lengths)[:, None]
        cache.append((h, c, i, f, o, g, tc, active))
        c = np.where(active, c_new, c)
        h = np.where(active, h_new, h)
    return h, cache


def lstm_forward(model: LstmModel, seq) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Run one sequence; returns h_T and the per-step trace of every gate and state."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or len(seq) < 1:
        raise ClassifierError("sequence must be a non-empty (T, m) array")
    if seq.shape[1] != model.m:
        raise ClassifierError(f"expected steps of dimension {model.m}, got {seq.shape[1]}")
    h, cache = _forward(model.params(), seq[None], np.array([len(seq)]))
    names = ("h_prev", "c_prev", "i", "f", "o", "c_tilde", "tanh_c")
    trace = {k: np.stack([step[j][0] for step in cache]) for j, k in enumerate(names)}
    trace["c"] = trace["f"] * trace["c_prev"] + trace["i"] * trace["c_tilde"]
    trace["h"] = trace["o"] * trace["tanh_c"]
    return h[0], trace


def lstm_loss_and_grads(p: dict, X: np.ndarray, lengths: np.ndarray, y: np.ndarray, input_grad: bool = False):
    """Mean cross-entropy of the head on h_T, with BPTT gradients for every block of ``p``.

    With ``input_grad`` the gradient with respect to ``X`` is returned under "X".
    """
    h_T, cache = _forward(p, X, lengths)
    B = len(y)
    n = p["V"].shape[1]
    z = h_T @ p["W_y"].T + p["b_y"]
    prob = softmax(z, axis=1)
    loss = float(-np.log(np.maximum(prob[np.arange(B), y], 1e-300)).mean())
    dz = prob.copy()
    dz[np.arange(B), y] -= 1.0
    dz /= B
    grads = {k: np.zeros_like(p[k]) for k in ("W", "V", "b")}
    if input_grad:
        grads["X"] = np.zeros_like(X)
    grads["W_y"] = dz.T @ h_T
    grads["b_y"] = dz.sum(axis=0)
    dh = dz @ p["W_y"]
    dc = np.zeros((B, n))
    for t in range(len(cache) - 1, -1, -1):
        h_prev, c_prev, i, f, o, g, tc, active = cache[t]
        do = dh * tc
        dct = dc + dh * o * (1.0 - tc * tc)
        da = np.concatenate([
            dct * g * i * (1.0 - i),
            dct * c_prev * f * (1.0 - f),
            do * o * (1.0 - o),
            dct * i * (1.0 - g * g),
        ], axis=1) * active
        grads["W"] += da.T @ X[:, t]
        grads["V"] += da.T @ h_prev
        grads["b"] += da.sum(axis=0)
        if input_grad:
            grads["X"][:, t] = da @ p["W"]
        # Inactive (padding) steps pass state and gradient straight through.
        dh = np.where(active, da @ p["V"], dh)
        dc = np.where(active, dct * f, dc)
    return loss, grads


def init_params(m: int, n: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    r = 1.0 / np.sqrt(n)
    return {
        "W": rng.uniform(-r, r, size=(4 * n, m)),
        "V": rng.uniform(-r, r, size=(4 * n, n)),
        "b": np.zeros(4 * n),
        "W_y": rng.uniform(-r, r, size=(len(CLASSES), n)),
        "b_y": np.zeros(len(CLASSES)),
    }


def _adam(p, grads, mom, vel, step, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    for k in grads:
        mom[k] = beta1 * mom[k] + (1 - beta1) * grads[k]
        vel[k] = beta2 * vel[k] + (1 - beta2) * grads[k] ** 2
        m_hat = mom[k] / (1 - beta1 ** step)
        v_hat = vel[k] / (1 - beta2 ** step)
        p[k] -= lr * m_hat / (np.sqrt(v_hat) + eps)


def _resolve(hyperparams, n_seqs, labels):
    params = dict(DEFAULTS)
    unknown = set(hyperparams or {}) - set(params)
    if unknown:
        raise ClassifierError(f"unknown lstm hyperparameters: {sorted(unknown)}")
    params.update(hyperparams or {})
    if not n_seqs:
        raise ClassifierError("no training sequences")
    y = encode_labels(labels)
    if len(y) != n_seqs:
        raise ClassifierError("labels and sequences differ in number")
    return params, y


def _train(batches, n_seqs, m, y, params, seed, table=None):
    """Shared Adam loop. ``batches(sel)`` yields (X, lengths, idx) for one mini-batch;
    ``idx`` holds table rows when ``table`` is being tuned, else None."""
    rng = np.random.default_rng(seed)
    p = init_params(m, int(params["hidden"]), rng)
    if table is not None:
        # Extra last row is the all-zero vector for unknown tokens and padding.
        p["E"] = np.vstack([table, np.zeros((1, m))])
    mom = {k: np.zeros_like(v) for k, v in p.items()}
    vel = {k: np.zeros_like(v) for k, v in p.items()}
    lr, clip, bs = float(params["lr"]), float(params["clip"]), int(params["batch_size"])
    step = 0
    losses = []
    for epoch in range(int(params["epochs"])):
        order = rng.permutation(n_seqs)
        total = 0.0
        for start in range(0, n_seqs, bs):
            sel = order[start: start + bs]
            X, lengths, idx = batches(sel, p.get("E"))
            loss, grads = lstm_loss_and_grads(p, X, lengths, y[sel], input_grad=idx is not None)
            if not np.isfinite(loss):
                raise ClassifierError(f"LSTM loss diverged at epoch {epoch}")
            if idx is not None:
                gE = np.zeros_like(p["E"])
                np.add.at(gE, idx, grads.pop("X"))
                gE[-1] = 0.0
                grads["E"] = gE
            norm = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
            if norm > clip:
                for g in grads.values():
                    g *= clip / norm
            step += 1
            _adam(p, grads, mom, vel, step, lr)
            total += loss * len(sel)
        losses.append(total / n_seqs)
        log.debug("lstm epoch %d loss %.4f", epoch, losses[-1])
    head = SoftmaxHead(p["W_y"], p["b_y"], {}, seed)
    model = LstmModel(p["W"], p["V"], p["b"], head, params, seed, losses)
    return model, (p["E"][:-1] if table is not None else None)


def train_lstm(seqs: Sequence[np.ndarray], labels, hyperparams: dict | None = None, seed: int = 0) -> LstmModel:
    """Adam on mini-batches of fixed vector sequences with global gradient-norm clipping."""
    params, y = _resolve(hyperparams, len(seqs), labels)
    max_len = int(params["max_len"])
    seqs = [np.asarray(s, dtype=np.float64)[:max_len] for s in seqs]
    m = seqs[0].shape[1]

    def batches(sel, _):
        X, lengths = pad_batch([seqs[k] for k in sel], m)
        return X, lengths, None

    return _train(batches, len(seqs), m, y, params, seed)[0]


def train_lstm_tokens(
    token_seqs: Sequence[Sequence[int]], table: np.ndarray, labels,
    hyperparams: dict | None = None, seed: int = 0,
) -> tuple[LstmModel, np.ndarray]:
    """Like :func:`train_lstm` but the input vectors are rows of ``table`` and are tuned too.

    ``token_seqs`` hold row indices, -1 for tokens without a vector. Returns
    the model and the tuned table.
    """
    params, y = _resolve(hyperparams, len(token_seqs), labels)
    max_len = int(params["max_len"])
    V, m = table.shape
    rows = []
    for s in token_seqs:
        r = np.asarray(s, dtype=np.int64)[:max_len]
        r = np.where(r < 0, V, r)
        rows.append(r if len(r) else np.array([V]))

    def batches(sel, E):
        lengths = np.array([len(rows[k]) for k in sel], dtype=np.int64)
        idx = np.full((len(sel), int(lengths.max())), V, dtype=np.int64)
        for j, k in enumerate(sel):
            idx[j, : lengths[j]] = rows[k]
        return E[idx], lengths, idx

    return _train(batches, len(rows), m, y, params, seed, np.asarray(table, dtype=np.float64))
