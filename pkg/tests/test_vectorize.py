import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from edsa.preprocess import PipelineSpec, apply_all
from edsa.synthetic import tweet_corpus
from edsa.vectorize import (
    CbowModel,
    DocTermMatrix,
    ExternalEmbeddings,
    Scheme,
    VectorizeError,
    Vocabulary,
    build_matrix,
    embed_doc,
    load_embeddings,
    mean_vector,
    tfidf,
    train_cbow,
    transform,
    write_embeddings,
)


class TestTfidf:
    def test_term_in_every_doc(self):
        assert tfidf(2, 4, 10, 10) == 0.0

    def test_unit(self):
        assert tfidf(5, 5, math.e * 3, 3) == pytest.approx(1.0, abs=1e-12)

    def test_hand_value(self):
        # 3/6 * ln(8/2)
        assert tfidf(3, 6, 8, 2) == pytest.approx(0.6931471805599453, abs=1e-12)

    @pytest.mark.parametrize("args", [(1, 0, 4, 2), (1, 2, 4, 0), (1, 2, 4, 5)])
    def test_invalid(self, args):
        with pytest.raises(VectorizeError):
            tfidf(*args)


class TestMatrix:
    def test_raw(self):
        vocab, m = build_matrix([["a", "a", "b"], ["b"]], Scheme.RAW)
        assert vocab.terms == ["a", "b"]
        assert m.row(0) == {0: 2.0, 1: 1.0} and m.row(1) == {1: 1.0}

    def test_tfidf_hand(self):
        _, m = build_matrix([["a", "a", "b"], ["b"]], Scheme.TFIDF)
        assert m.row(0)[0] == pytest.approx(2 / 3 * math.log(2), abs=1e-12)
        assert m.row(0)[1] == 0.0 and m.row(1)[1] == 0.0

    def test_single_doc_zero_row(self):
        _, m = build_matrix([["x"]], Scheme.TFIDF)
        assert m.row(0) == {0: 0.0}

    def test_unknown_tokens_dropped(self):
        vocab, _ = build_matrix([["a", "b"]])
        m = transform([["a", "zzz"]], vocab, Scheme.RAW)
        assert m.row(0) == {0: 1.0}

    def test_min_df(self):
        vocab, _ = build_matrix([["a", "b"], ["a"]], min_df=2)
        assert vocab.terms == ["a"]

    def test_empty_corpus(self):
        with pytest.raises(VectorizeError):
            build_matrix([[], []])

    def test_randomized_against_oracle(self):
        """Every weight equals a direct evaluation of tf * ln(N / n_j), 100 trials."""
        rng = np.random.default_rng(0)
        alphabet = list("abcdefgh")
        for _ in range(100):
            docs = [list(rng.choice(alphabet, size=rng.integers(1, 7))) for _ in range(rng.integers(1, 8))]
            vocab, m = build_matrix(docs, Scheme.TFIDF)
            for r, doc in enumerate(docs):
                want = oracles.tfidf_row(doc, docs)
                got = {vocab.terms[j]: w for j, w in m.row(r).items()}
                assert got.keys() == want.keys()
                for t in want:
                    assert abs(got[t] - want[t]) <= 1e-12

    def test_save_load_deterministic(self, tmp_path):
        _, m = build_matrix([["a", "a", "b"], ["b", "c"]], Scheme.TFIDF)
        m.save(tmp_path / "x.npz", {"config_hash": "h"})
        m.save(tmp_path / "y.npz", {"config_hash": "h"})
        assert (tmp_path / "x.npz").read_bytes() == (tmp_path / "y.npz").read_bytes()
        back = DocTermMatrix.load(tmp_path / "x.npz")
        assert back.scheme is Scheme.TFIDF
        assert (back.matrix != m.matrix).nnz == 0

    def test_vocab_json_roundtrip(self, tmp_path):
        vocab, _ = build_matrix([["b", "a"], ["a"]])
        vocab.save(tmp_path / "v.json")
        back = Vocabulary.load(tmp_path / "v.json")
        assert back.terms == vocab.terms and back.digest() == vocab.digest()

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(st.sampled_from("abcde"), min_size=1, max_size=6), min_size=1, max_size=6))
    def test_tf_rows_sum_to_one(self, docs):
        vocab, _ = build_matrix(docs)
        m = transform(docs, vocab, Scheme.TF)
        np.testing.assert_allclose(np.asarray(m.matrix.sum(axis=1)).ravel(), 1.0, atol=1e-12)


class TestCbow:
    def test_zero_window(self):
        with pytest.raises(VectorizeError):
            train_cbow([["a", "b"]], window=0)

    def test_loss_moving_average_non_increasing(self):
        docs = apply_all(tweet_corpus(1000, seed=5), PipelineSpec.resolve("sct"))
        model = train_cbow(docs, dim=20, window=3, epochs=15, seed=1)
        ma = np.convolve(model.losses, np.ones(5) / 5, mode="valid")
        assert np.all(np.diff(ma) <= 1e-12)

    def test_context_prediction(self):
        rng = np.random.default_rng(0)
        filler = [f"w{k}" for k in range(30)]
        docs = [["a", "b"] * 6 for _ in range(500)]
        docs += [list(rng.choice(filler, size=8)) for _ in range(300)]
        model = train_cbow(docs, dim=16, window=2, epochs=5, seed=0)
        va = model.V_in[model.index["a"]]

        def cos(u, v):
            return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))

        b_score = cos(va, model.U[model.index["b"]])
        random_scores = [cos(va, model.U[model.index[w]]) for w in filler]
        assert b_score > max(random_scores)

    def test_seeded(self):
        docs = [["a", "b", "c"], ["b", "c", "d"]] * 10
        a = train_cbow(docs, dim=8, epochs=2, seed=3)
        b = train_cbow(docs, dim=8, epochs=2, seed=3)
        assert np.array_equal(a.V_in, b.V_in)

    def test_embed_doc(self):
        m = CbowModel(["x", "y"], np.array([[1.0, 2.0], [3.0, 4.0]]), np.zeros((2, 2)), 2, 0)
        assert np.array_equal(embed_doc(m, [], 3), np.zeros((3, 2)))
        out = embed_doc(m, ["x", "y"], 4)
        assert np.array_equal(out[:2], m.V_in) and not out[2:].any()

    def test_mean_of_opposites(self):
        v = np.array([0.3, -1.2, 2.0])
        m = CbowModel(["p", "q"], np.stack([v, -v]), np.zeros((2, 3)), 2, 0)
        assert np.array_equal(mean_vector(m, ["p", "q"]), np.zeros(3))

    def test_save_load(self, tmp_path):
        model = train_cbow([["a", "b", "c"]] * 5, dim=4, epochs=1)
        model.save(tmp_path / "c.edsa")
        back = CbowModel.load(tmp_path / "c.edsa")
        assert back.vocab == model.vocab
        np.testing.assert_allclose(back.V_in, model.V_in, rtol=1e-6, atol=1e-7)


class TestExternal:
    def test_parse(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("7\t0.1 0.2 0.3\n")
        emb = load_embeddings(p)
        assert emb.dim == 3 and emb[7].tolist() == [0.1, 0.2, 0.3]

    def test_ragged(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("1\t0.1 0.2\n2\t0.3\n")
        with pytest.raises(VectorizeError):
            load_embeddings(p)

    def test_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        vecs = {int(i): rng.normal(size=8) for i in rng.choice(10**12, size=20000, replace=False)}
        write_embeddings(vecs, tmp_path / "e.txt")
        back = load_embeddings(tmp_path / "e.txt")
        assert len(back) == 20000
        for k, v in vecs.items():
            assert np.array_equal(back[k], v)

    def test_missing_vector(self):
        with pytest.raises(VectorizeError):
            ExternalEmbeddings({1: np.ones(2)}).matrix([1, 2])
