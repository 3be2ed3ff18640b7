import math

import numpy as np
import pytest
import scipy.sparse as sp

import oracles
from edsa.classifiers import (
    ClassifierError,
    HashMismatch,
    LinearKind,
    LinearModel,
    LstmModel,
    ModelName,
    Prediction,
    SentimentPipeline,
    SoftmaxHead,
    encode_labels,
    hinge_objective,
    init_params,
    log_likelihood,
    log_likelihood_grad,
    lstm_forward,
    lstm_loss_and_grads,
    pad_batch,
    softmax_loss_and_grads,
    train_linear,
    train_lstm,
    train_nb,
    train_pipeline,
    train_softmax_head,
)
from edsa.classifiers.base import softmax
from edsa.corpus import SentimentLabel
from edsa.synthetic import tweet_corpus
from edsa.vectorize import DocTermMatrix, Scheme, Vocabulary, build_matrix, transform

NEG, POS = SentimentLabel.NEGATIVE, SentimentLabel.POSITIVE


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))))


def dtm(X, scheme=Scheme.TFIDF):
    return DocTermMatrix(sp.csr_matrix(np.asarray(X, dtype=float)), scheme)


class TestLabels:
    def test_encode(self):
        assert encode_labels([NEG, POS, POS]).tolist() == [0, 1, 1]

    @pytest.mark.parametrize("labels", [[], [POS, POS], [NEG, SentimentLabel.NEUTRAL]])
    def test_rejects(self, labels):
        with pytest.raises(ClassifierError):
            encode_labels(labels)

    def test_prediction_validation(self):
        with pytest.raises(ClassifierError):
            Prediction(POS, 1.5)
        Prediction(POS, 1.5, probability=False)


TOY_DOCS = [["good", "good", "fun"], ["good", "nice"], ["fun"], ["bad", "sad"], ["bad", "bad", "good"], ["sad"]]
TOY_LABELS = [POS, POS, POS, NEG, NEG, NEG]


class TestNaiveBayes:
    def _fit(self, docs, labels, alpha=1.0):
        vocab, X = build_matrix(docs, Scheme.RAW)
        return vocab, train_nb(X, labels, alpha=alpha)

    def test_separable(self):
        vocab, nb = self._fit([["good"], ["bad"]], [POS, NEG])
        assert nb.predict(transform([["good"]], vocab, Scheme.RAW)).label is POS
        assert nb.predict(transform([["bad"]], vocab, Scheme.RAW)).label is NEG

    def test_empty_doc_uses_prior(self):
        vocab, nb = self._fit([["a"], ["b"], ["c"]], [POS, NEG, NEG])
        assert nb.predict(transform([[]], vocab, Scheme.RAW)).label is NEG
        vocab, nb = self._fit([["a"], ["b"], ["c"]], [POS, POS, NEG])
        assert nb.predict(transform([[]], vocab, Scheme.RAW)).label is POS

    def test_posterior_hand_value(self):
        # (4/11 * 3/11 * 1/11) / (4/11 * 3/11 * 1/11 + 2/11 * 1/11 * 4/11) = 12/20
        vocab, nb = self._fit(TOY_DOCS, TOY_LABELS)
        p = nb.posterior(transform([["good", "fun", "bad"]], vocab, Scheme.RAW))[0]
        assert abs(p[1] - 0.6) <= 1e-12 and abs(p[0] - 0.4) <= 1e-12

    def test_posterior_randomized(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            docs = [list(rng.choice(list("abcde"), size=rng.integers(1, 5))) for _ in range(6)]
            labels = [POS, NEG] * 3
            vocab, nb = self._fit(docs, labels)
            query = list(rng.choice(list("abcdef"), size=4))
            want = oracles.nb_posterior(docs, labels, query)
            got = nb.posterior(transform([query], vocab, Scheme.RAW))[0]
            assert abs(got[1] - float(want[POS])) <= 1e-12

    def test_own_training_doc(self):
        vocab, nb = self._fit(TOY_DOCS, TOY_LABELS)
        preds = nb.predict_batch(transform(TOY_DOCS, vocab, Scheme.RAW))
        assert [p.label for p in preds] == TOY_LABELS

    def test_scheme_checked(self):
        _, nb = self._fit(TOY_DOCS, TOY_LABELS)
        with pytest.raises(ClassifierError):
            nb.predict_batch(dtm(np.ones((1, nb.dim))))


class TestLinear:
    def test_lr_gradient(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(30, 10))
        y = rng.integers(0, 2, 30).astype(float)
        beta = rng.normal(size=11) * 0.3
        g = log_likelihood_grad(beta, X, y)
        h = 1e-6
        fd = np.array([(log_likelihood(beta + h * e, X, y) - log_likelihood(beta - h * e, X, y)) / (2 * h)
                       for e in np.eye(11)])
        assert rel_err(g, fd) < 1e-5

    def test_lr_separable(self):
        m = train_linear(dtm([[1.0, 0.0], [0.0, 1.0]]), [POS, NEG], "lr", {"epochs": 500, "tol": 0.0})
        assert m.losses[-1] < 0.05
        assert m.losses[-1] < m.losses[0]

    def test_svm_separable(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        m = train_linear(dtm(X), [POS, NEG], "svm", {"epochs": 500, "C": 10.0, "batch_size": 2})
        d = m.decision(dtm(X))
        assert np.all(np.array([1, -1]) * d >= 1.0 - 1e-9)

    def test_ridge_penalty_dominates(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(60, 5))
        X -= X.mean(axis=0)
        y = [POS if v > 0 else NEG for v in X[:, 0]]
        m = train_linear(dtm(X, Scheme.RAW), y, "rc", {"lam": 1e6})
        assert np.abs(m.beta[1:]).max() < 1e-3

    def test_svm_zero_decision_is_positive(self):
        m = LinearModel(LinearKind.SVM, np.zeros(3), np.ones(2))
        p = m.predict(dtm([[0.3, 0.7]]))
        assert p.score == 0.0 and p.label is POS and not p.probability

    def test_lr_half_is_positive(self):
        m = LinearModel(LinearKind.LR, np.zeros(3), np.ones(2))
        p = m.predict(dtm([[1.0, 2.0]]))
        assert p.score == 0.5 and p.label is POS

    def test_batch_equals_single(self):
        rng = np.random.default_rng(3)
        X = rng.random((40, 6))
        y = [POS if r[0] + r[1] > 1 else NEG for r in X]
        for kind in ("lr", "svm"):
            m = train_linear(dtm(X), y, kind)
            batch = m.predict_batch(dtm(X))
            assert batch == [m.predict(dtm(X[i: i + 1])) for i in range(40)]

    def test_hinge_objective(self):
        X = np.array([[1.0], [-1.0]])
        assert hinge_objective(np.array([0.0, 2.0]), X, np.array([1.0, -1.0]), 1.0) == 2.0

    def test_unknown_hyperparameter(self):
        with pytest.raises(ClassifierError):
            train_linear(dtm(np.eye(2)), [POS, NEG], "lr", {"gamma": 1})

    def test_wrong_scheme(self):
        with pytest.raises(ClassifierError):
            train_linear(dtm(np.eye(2), Scheme.RAW), [POS, NEG], "lr")


class TestSoftmax:
    def test_normalised_and_shift_invariant(self):
        rng = np.random.default_rng(4)
        z = rng.normal(size=(50, 2)) * 30
        np.testing.assert_allclose(softmax(z, axis=1).sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(softmax(z + 123.4, axis=1), softmax(z, axis=1), atol=1e-9)

    def test_gradient(self):
        rng = np.random.default_rng(5)
        W, b = rng.normal(size=(2, 6)), rng.normal(size=2)
        X, y = rng.normal(size=(12, 6)), rng.integers(0, 2, 12)
        _, gW, gb = softmax_loss_and_grads(W, b, X, y)
        h = 1e-6
        fd = np.zeros_like(W)
        for idx in np.ndindex(W.shape):
            E = np.zeros_like(W)
            E[idx] = h
            fd[idx] = (softmax_loss_and_grads(W + E, b, X, y)[0] - softmax_loss_and_grads(W - E, b, X, y)[0]) / (2 * h)
        fdb = np.array([(softmax_loss_and_grads(W, b + h * e, X, y)[0] - softmax_loss_and_grads(W, b - h * e, X, y)[0])
                        / (2 * h) for e in np.eye(2)])
        assert rel_err(gW, fd) < 1e-5 and rel_err(gb, fdb) < 1e-5

    def test_learns_separable(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(200, 4))
        y = [POS if v > 0 else NEG for v in X[:, 0]]
        head = train_softmax_head(X, y, seed=1)
        acc = np.mean([p.label == t for p, t in zip(head.predict_batch(X), y)])
        assert acc > 0.95

    def test_standardization_folded(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(100, 3)) * [1, 10, 0.1] + [5, -3, 0]
        y = [POS if v > 5 else NEG for v in X[:, 0]]
        head = train_softmax_head(X, y, seed=0)
        np.testing.assert_allclose(head.proba(X).sum(axis=1), 1.0)
        assert head.W.shape == (2, 3)


def _lstm(p):
    head = SoftmaxHead(p["W_y"], p["b_y"])
    return LstmModel(p["W"], p["V"], p["b"], head)


class TestLstmForward:
    def test_zero_weights(self):
        n, m = 3, 2
        p = {"W": np.zeros((4 * n, m)), "V": np.zeros((4 * n, n)), "b": np.zeros(4 * n),
             "W_y": np.zeros((2, n)), "b_y": np.zeros(2)}
        h, tr = lstm_forward(_lstm(p), np.ones((5, m)))
        for g in ("i", "f", "o"):
            assert np.all(tr[g] == 0.5)
        assert not tr["c_tilde"].any() and not tr["c"].any() and not h.any()

    def test_length_one(self):
        rng = np.random.default_rng(8)
        p = init_params(3, 4, rng)
        p["b"] = rng.normal(size=16)
        model = _lstm(p)
        x = rng.normal(size=(1, 3))
        h, _ = lstm_forward(model, x)
        Wi, _, bi = model.gate("i")
        Wo, _, bo = model.gate("o")
        Wc, _, bc = model.gate("c")
        sig = lambda v: 1 / (1 + np.exp(-v))  # noqa: E731
        i, o, g = sig(Wi @ x[0] + bi), sig(Wo @ x[0] + bo), np.tanh(Wc @ x[0] + bc)
        np.testing.assert_allclose(h, o * np.tanh(i * g), atol=1e-14)

    def test_empty_sequence_rejected(self):
        p = init_params(2, 3, np.random.default_rng(0))
        with pytest.raises(ClassifierError):
            lstm_forward(_lstm(p), np.zeros((0, 2)))

    def test_scripted_three_steps(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            p = init_params(3, 4, rng)
            p["b"] = rng.normal(size=16) * 0.5
            xs = rng.normal(size=(3, 3))
            h, _ = lstm_forward(_lstm(p), xs)
            want = oracles.lstm_hidden(p["W"].tolist(), p["V"].tolist(), p["b"].tolist(), xs.tolist())
            assert np.max(np.abs(h - want)) < 1e-10

    def test_padding_carries_state(self):
        rng = np.random.default_rng(10)
        model = _lstm(init_params(2, 3, rng))
        seqs = [rng.normal(size=(2, 2)), rng.normal(size=(5, 2))]
        batch = model.final_hidden(seqs)
        for k, s in enumerate(seqs):
            np.testing.assert_allclose(batch[k], lstm_forward(model, s)[0], atol=1e-14)


class TestLstmTraining:
    def test_bptt_gradient(self):
        rng = np.random.default_rng(11)
        p = init_params(2, 3, rng)
        p["b"] = rng.normal(size=12) * 0.3
        X, lengths = pad_batch([rng.normal(size=(4, 2)), rng.normal(size=(3, 2))], 2)
        y = np.array([1, 0])
        _, grads = lstm_loss_and_grads(p, X, lengths, y, input_grad=True)
        h = 1e-6
        worst = 0.0
        for k in ("W", "V", "b", "W_y", "b_y"):
            fd = np.zeros_like(p[k])
            for idx in np.ndindex(p[k].shape):
                q = {key: v.copy() for key, v in p.items()}
                q[k][idx] += h
                up = lstm_loss_and_grads(q, X, lengths, y)[0]
                q[k][idx] -= 2 * h
                down = lstm_loss_and_grads(q, X, lengths, y)[0]
                fd[idx] = (up - down) / (2 * h)
            worst = max(worst, rel_err(grads[k], fd))
        assert worst < 1e-4

    def test_separable_sequences(self):
        rng = np.random.default_rng(12)
        seqs, labels = [], []
        for k in range(200):
            s = rng.normal(size=(int(rng.integers(2, 6)), 3)) * 0.3
            lab = POS if k % 2 else NEG
            s[:, 0] += 1.0 if lab is POS else -1.0
            seqs.append(s)
            labels.append(lab)
        model = train_lstm(seqs, labels, {"hidden": 8, "epochs": 50, "lr": 0.01, "batch_size": 32}, seed=0)
        acc = np.mean([p.label == t for p, t in zip(model.predict_batch(seqs), labels)])
        assert acc > 0.95
        assert abs(model.losses[0] - math.log(2)) < 0.1 or model.losses[0] < math.log(2)

    def test_initial_loss_is_ln2(self):
        rng = np.random.default_rng(13)
        seqs = [rng.normal(size=(4, 3)) for _ in range(200)]
        y = np.array([0, 1] * 100)
        p = init_params(3, 16, rng)
        X, lengths = pad_batch(seqs, 3)
        loss, _ = lstm_loss_and_grads(p, X, lengths, y)
        assert abs(loss - math.log(2)) < 0.1

    def test_seeded(self):
        rng = np.random.default_rng(14)
        seqs = [rng.normal(size=(3, 2)) for _ in range(20)]
        labels = [POS, NEG] * 10
        hp = {"hidden": 4, "epochs": 2}
        a, b = train_lstm(seqs, labels, hp, seed=5), train_lstm(seqs, labels, hp, seed=5)
        assert np.array_equal(a.W, b.W)


@pytest.fixture(scope="module")
def small_corpus():
    return list(tweet_corpus(300, seed=3).binary())


class TestPipeline:
    FAST = {
        "nb": None, "lr": None, "rc": None, "svm": None,
        "softmax": {"epochs": 5},
        "lstm": {"hidden": 8, "epochs": 1},
    }

    @pytest.mark.parametrize("name", list(ModelName))
    def test_save_load_roundtrip(self, name, small_corpus, tmp_path):
        pipe = train_pipeline(name, small_corpus, hyperparams=self.FAST[name.value], seed=1,
                              cbow_params={"dim": 8, "epochs": 1})
        path = tmp_path / f"{name.value}.edsa"
        pipe.save(path, meta={"config_hash": "abc"})
        back = SentimentPipeline.load(path)
        a = pipe.predict_tweets(small_corpus[:50])
        b = back.predict_tweets(small_corpus[:50])
        assert [p.label for p in a] == [p.label for p in b]
        np.testing.assert_allclose([p.score for p in a], [p.score for p in b], atol=1e-4)

    def test_vocab_hash_mismatch(self, small_corpus, tmp_path):
        pipe = train_pipeline("nb", small_corpus)
        pipe.save(tmp_path / "nb.edsa")
        other = Vocabulary.build([["unrelated", "terms"]])
        with pytest.raises(HashMismatch):
            SentimentPipeline.load(tmp_path / "nb.edsa", vocab=other)
        SentimentPipeline.load(tmp_path / "nb.edsa", vocab=pipe.vocab)

    def test_batch_equals_single(self, small_corpus):
        pipe = train_pipeline("rc", small_corpus)
        batch = pipe.predict_tweets(small_corpus[:20])
        assert batch == [pipe.predict_tweet(t) for t in small_corpus[:20]]

    def test_unknown_hyperparameter(self, small_corpus):
        with pytest.raises(ClassifierError):
            train_pipeline("nb", small_corpus, hyperparams={"beta": 1})

    def test_sfe_pipeline(self, small_corpus):
        pipe = train_pipeline("nb", small_corpus, pipeline="sfe")
        assert pipe.satp.negation_fuse
