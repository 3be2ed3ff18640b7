"""Acceptance criteria, one test each; results are summarised at the end of the run.

Criteria 1-4 and 5(c) need the Sentiment140 training CSV under
``$EDSA_DATA_DIR``. Without it they fail with a message naming the file.
"""
import json
import os
from pathlib import Path

import numba
import numpy as np
import pytest

import make_fixtures
import oracles
from edsa.classifiers import (
    LstmModel,
    Prediction,
    SoftmaxHead,
    init_params,
    lstm_forward,
    lstm_loss_and_grads,
    pad_batch,
)
from edsa.cli import main
from edsa.config import DATA_ENV, SOURCE_FILE
from edsa.corpus import Corpus, SentimentLabel, Tweet
from edsa.ensemble import run_edsa
from edsa.events import Event, Method, make_slices, mabed_candidate_weight, mabed_detect, olda_detect, peaky_detect
from edsa.events.olda import OldaState, _sweep_fast
from edsa.synthetic import planted_burst, two_vocabularies
from edsa.vectorize import Scheme, build_matrix

HOUR = 3600


# ---------------------------------------------------------------- real-data runs


def _source() -> Path | None:
    root = os.environ.get(DATA_ENV)
    if root and (Path(root) / SOURCE_FILE).exists():
        return Path(root) / SOURCE_FILE
    return None


MISSING = f"needs ${DATA_ENV}/{SOURCE_FILE} (not available here)"


@pytest.fixture(scope="session")
def real_run(tmp_path_factory):
    """Scratch directory for CLI runs on the real corpus; metrics are cached per (model, pipeline)."""
    if _source() is None:
        return None
    d = tmp_path_factory.mktemp("real")
    cache = {}

    def cli(*args):
        cwd = os.getcwd()
        os.chdir(d)
        try:
            return main(list(args))
        finally:
            os.chdir(cwd)

    def evaluate(model, pipeline="sct"):
        if (model, pipeline) not in cache:
            if not (d / "edsa-work" / "corpus-c1.jsonl").exists():
                assert cli("ingest", "--dataset", "c1") == 0
            assert cli("evaluate", "--dataset", "c1", "--model", model, "--pipeline", pipeline) == 0
            path = d / "edsa-work" / "reports" / f"metrics-c1-{model}-{pipeline}.json"
            cache[model, pipeline] = json.loads(path.read_text())
        return cache[model, pipeline]

    return {"dir": d, "cli": cli, "evaluate": evaluate}


def _require(real_run, criterion, label):
    if real_run is None:
        criterion(label, False, MISSING)
        pytest.fail(MISSING)


TABLE7_SCT = {"nb": (0.761, 0.03), "lr": (0.756, 0.03), "rc": (0.767, 0.03), "svm": (0.729, 0.04)}


def test_1_c1_sct_accuracy(real_run, criterion):
    label = "1 C1/SCT accuracy vs published values"
    _require(real_run, criterion, label)
    parts, ok = [], True
    for model, (want, tol) in TABLE7_SCT.items():
        got = real_run["evaluate"](model)["accuracy"]
        ok &= abs(got - want) <= tol
        parts.append(f"{model} {got:.3f} (want {want}±{tol})")
    assert criterion(label, ok, ", ".join(parts))


def test_2_sfe_direction(real_run, criterion):
    label = "2 NB SFE vs SCT: recall up, precision down"
    _require(real_run, criterion, label)
    sct, sfe = real_run["evaluate"]("nb", "sct"), real_run["evaluate"]("nb", "sfe")
    ok = sfe["recall"] > sct["recall"] and sfe["precision"] < sct["precision"]
    detail = (f"recall {sct['recall']:.3f}->{sfe['recall']:.3f}, "
              f"precision {sct['precision']:.3f}->{sfe['precision']:.3f}")
    assert criterion(label, ok, detail)


def _bptt_worst_error() -> float:
    rng = np.random.default_rng(11)
    p = init_params(2, 3, rng)
    p["b"] = rng.normal(size=12) * 0.3
    X, lengths = pad_batch([rng.normal(size=(4, 2)), rng.normal(size=(3, 2))], 2)
    y = np.array([1, 0])
    _, grads = lstm_loss_and_grads(p, X, lengths, y)
    h, worst = 1e-6, 0.0
    for k in ("W", "V", "b", "W_y", "b_y"):
        for idx in np.ndindex(p[k].shape):
            q = {key: v.copy() for key, v in p.items()}
            q[k][idx] += h
            up = lstm_loss_and_grads(q, X, lengths, y)[0]
            q[k][idx] -= 2 * h
            down = lstm_loss_and_grads(q, X, lengths, y)[0]
            fd = (up - down) / (2 * h)
            g = grads[k][idx]
            worst = max(worst, abs(g - fd) / max(1e-8, abs(g) + abs(fd)))
    return worst


def test_3_lstm(real_run, criterion):
    label = "3 LSTM accuracy >= 0.75 on C1 and BPTT check < 1e-4"
    worst = _bptt_worst_error()
    if real_run is None:
        criterion(label, False, f"BPTT max rel err {worst:.2e}; accuracy {MISSING}")
        pytest.fail(MISSING)
    acc = real_run["evaluate"]("lstm")["accuracy"]
    ok = acc >= 0.75 and worst < 1e-4
    assert criterion(label, ok, f"accuracy {acc:.3f}, BPTT max rel err {worst:.2e}")


def test_4_ensemble_dominance(real_run, criterion):
    label = "4 EDSA accuracy >= best single model - 0.01 on C1"
    _require(real_run, criterion, label)
    singles = {m: real_run["evaluate"](m)["accuracy"] for m in ("nb", "lr", "rc", "svm", "softmax", "lstm")}
    edsa = real_run["evaluate"]("edsa")["accuracy"]
    best = max(singles, key=singles.get)
    ok = edsa >= singles[best] - 0.01
    assert criterion(label, ok, f"edsa {edsa:.3f}, best {best} {singles[best]:.3f}")


# ---------------------------------------------------------------- event detection


def _mabed_trial(seed):
    rng = np.random.default_rng(1000 + seed)
    s, length = int(rng.integers(4, 24)), int(rng.integers(3, 7))
    window = (s * HOUR, (s + length) * HOUR)
    ev = mabed_detect(make_slices(planted_burst(seed, window, 32 * HOUR), 32), top_k=5)[0]
    return oracles.jaccard((ev.start, ev.end), window)


def _peaky_trial(seed):
    rng = np.random.default_rng(2000 + seed)
    sub = HOUR // 8
    lo = int(rng.integers(0, 32)) * HOUR + int(rng.integers(0, 8)) * sub
    window = (lo, lo + sub)
    ev = peaky_detect(make_slices(planted_burst(seed, window, 32 * HOUR), 32), sub_bins=8, top_k=5)[0]
    return oracles.jaccard((ev.start, ev.end), window)


def test_5a_planted_burst(criterion):
    mabed = [_mabed_trial(k) for k in range(20)]
    peaky = [_peaky_trial(k) for k in range(20)]
    ok = min(mabed) >= 0.8 and min(peaky) >= 0.8
    assert criterion("5a planted 10x burst, Jaccard >= 0.8 over 20 seeds", ok,
                     f"MABED min {min(mabed):.3f}, Peaky min {min(peaky):.3f}")


def test_5b_olda_purity(criterion):
    corpus, _ = two_vocabularies(0)
    sl = make_slices(corpus, 2)
    _, states = olda_detect(sl, K=2, iters=100, seed=1, return_states=True)
    first = [sl.term_index[t] for t in ("alpha", "bravo", "charlie")]
    total = majority = 0
    for st in states:
        for j in range(st.K):
            col = st.C_VK[:, j]
            a = col[first].sum()
            total += col.sum()
            majority += max(a, col.sum() - a)
    purity = majority / total
    assert criterion("5b OLDA two-vocabulary purity > 0.95", purity > 0.95, f"purity {purity:.4f}")


def test_5c_real_top50(real_run, criterion):
    label = "5c C3 detect-events --top 50: 50 events x 10 distinct keywords"
    _require(real_run, criterion, label)
    cli, d = real_run["cli"], real_run["dir"]
    assert cli("ingest", "--dataset", "c3") == 0
    parts, ok = [], True
    for method in ("mabed", "olda", "peaky"):
        assert cli("detect-events", "--dataset", "c3", "--method", method, "--top", "50") == 0
        events = json.loads((d / "edsa-work" / "reports" / f"events-c3-{method}.json").read_text())["events"]
        good = len(events) == 50 and all(len(set(e["keywords"])) == 10 == len(e["keywords"]) for e in events)
        ok &= good
        parts.append(f"{method} {len(events)} events")
    assert criterion(label, ok, ", ".join(parts))


# ---------------------------------------------------------------- oracles


def _weight_trials(rng):
    worst, n_done = 0.0, 0
    while n_done < 100:
        n = int(rng.integers(4, 12))
        x, y = rng.integers(0, 20, n).astype(float), rng.integers(0, 20, n).astype(float)
        a = int(rng.integers(0, n - 3))
        b = int(rng.integers(a + 2, n))
        if np.all(np.diff(x[a: b + 1]) == 0) or np.all(np.diff(y[a: b + 1]) == 0):
            continue
        worst = max(worst, abs(mabed_candidate_weight(x, y, a, b) - oracles.autocorr_weight(x, y, a, b)))
        n_done += 1
    return worst


@numba.njit(cache=True)
def _redraw_first(words, doc_of, z, C_VK, C_DK, n_K, alpha, beta, beta_sum, u, hits):
    # Token 0 is removed before each draw, so repeated redraws are independent samples of its conditional.
    for k in range(len(u)):
        _sweep_fast(words[:1], doc_of[:1], z[:1], C_VK, C_DK, n_K, alpha, beta, beta_sum, u[k: k + 1])
        hits[z[0]] += 1


def _gibbs_trials(rng, draws=100_000):
    """Largest gap between empirical token-0 draws and the recounted conditional."""
    worst = 0.0
    for _ in range(100):
        docs = [list(rng.integers(0, 4, rng.integers(1, 5))) for _ in range(3)]
        st = OldaState.init(docs, V=4, K=3, rng=rng, alpha=0.3, beta=0.2)
        want = np.array(oracles.gibbs_conditional(st.words.tolist(), st.doc_of.tolist(), st.z.tolist(),
                                                  0, 4, 3, 0.3, 0.2))
        hits = np.zeros(3)
        _redraw_first(st.words, st.doc_of, st.z.copy(), st.C_VK.copy(), st.C_DK.copy(), st.n_K.copy(),
                      st.alpha, st.beta, st.beta_sum, rng.random(draws), hits)
        worst = max(worst, float(np.abs(hits / draws - want).max()))
    return worst


def _forward_trials(rng):
    worst = 0.0
    for _ in range(100):
        p = init_params(3, 4, rng)
        p["b"] = rng.normal(size=16) * 0.5
        xs = rng.normal(size=(3, 3))
        h, _ = lstm_forward(LstmModel(p["W"], p["V"], p["b"], SoftmaxHead(p["W_y"], p["b_y"])), xs)
        want = oracles.lstm_hidden(p["W"].tolist(), p["V"].tolist(), p["b"].tolist(), xs.tolist())
        worst = max(worst, float(np.max(np.abs(h - want))))
    return worst


def _tfidf_trials(rng):
    worst = 0.0
    for _ in range(100):
        docs = [list(rng.choice(list("abcdefgh"), size=rng.integers(1, 7))) for _ in range(rng.integers(1, 8))]
        vocab, m = build_matrix(docs, Scheme.TFIDF)
        for r, doc in enumerate(docs):
            got = {vocab.terms[j]: w for j, w in m.row(r).items()}
            for t, w in oracles.tfidf_row(doc, docs).items():
                worst = max(worst, abs(got[t] - w))
    return worst


def test_6_formula_oracles(criterion):
    rng = np.random.default_rng(6)
    w, g, f, t = _weight_trials(rng), _gibbs_trials(rng), _forward_trials(rng), _tfidf_trials(rng)
    ok = w <= 1e-12 and g < 0.01 and f < 1e-10 and t <= 1e-12
    detail = f"MABED weight {w:.1e}, Gibbs MC {g:.4f}, LSTM forward {f:.1e}, TF-IDF {t:.1e}"
    assert criterion("6 formula oracles, 100 randomized trials each", ok, detail)


# ---------------------------------------------------------------- voting and determinism


class _TableModel:
    def __init__(self, table):
        self.table = table

    def predict_tweets(self, tweets):
        return [Prediction(self.table[t.id], 0.5) for t in tweets]


def _random_report_case(rng):
    n = int(rng.integers(1, 12))
    corpus = Corpus(Tweet(k + 1, 100 * k, SentimentLabel.POSITIVE, "u", f"t{k}") for k in range(n))
    tables = {f"m{k}": {t: SentimentLabel(int(rng.integers(0, 3))) for t in corpus.ids}
              for k in range(int(rng.integers(1, 7)))}
    methods = list(Method)
    events = {}
    for j in rng.permutation(len(methods))[: int(rng.integers(1, 4))]:
        evs = []
        for e in range(int(rng.integers(0, 4))):
            ids = sorted(rng.choice(corpus.ids, size=int(rng.integers(1, n + 1)), replace=False).tolist())
            evs.append(Event(methods[j], ((f"k{e}", 1.0),), 0, 10, float(10 - e), tuple(ids)))
        events[methods[j]] = evs
    return corpus, tables, events


def test_7_voting_oracle(criterion):
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(1000):
        corpus, tables, events = _random_report_case(rng)
        report = run_edsa(corpus, list(events), {m: _TableModel(t) for m, t in tables.items()}, events=events)
        keyed = [((m.value, k), list(ev.tweet_ids)) for m in sorted(events, key=lambda m: m.value)
                 for k, ev in enumerate(events[m])]
        tweets, evs = oracles.vote_table(keyed, tables)
        same = (report.individual == {(k[0], k[1], t): lab for (k, t), lab in tweets.items()}
                and report.event_labels == evs)
        mismatches += not same
    assert criterion("7 run_edsa equals brute-force vote table, 1000 reports", mismatches == 0,
                     f"{mismatches} mismatching reports")


def _primary_artifacts(root: Path) -> dict[str, bytes]:
    work = root / "work"
    return {str(p.relative_to(work)): p.read_bytes() for p in sorted(work.rglob("*"))
            if p.is_file() and "manifests" not in p.parts}


def test_8_determinism(tmp_path, criterion):
    runs = []
    for k, threads in enumerate((1, 1, 1, 8)):
        d = tmp_path / f"run{k}"
        d.mkdir()
        make_fixtures.run_pipeline(d, threads=threads)
        runs.append(_primary_artifacts(d))
    differing = sorted({name for r in runs[1:] for name in set(r) | set(runs[0]) if r.get(name) != runs[0].get(name)})
    ok = not differing and len(runs[0]) > 0
    detail = f"{len(runs[0])} artifacts identical over 3 runs and threads 1 vs 8" if ok else f"differs: {differing}"
    assert criterion("8 fixture ensemble byte-identical", ok, detail)
