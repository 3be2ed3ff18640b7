import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edsa.corpus import Tweet
from edsa.preprocess import (
    Pipeline,
    PipelineSpec,
    apply_pipeline,
    expand_contraction,
    fuse_negations,
    lemmatize,
    process_text,
    strip_punct,
    tokenize,
)


def run(name, text):
    return process_text(text, PipelineSpec.resolve(name))


class TestTokenize:
    def test_whitespace(self):
        assert tokenize("I love  this") == ["I", "love", "this"]

    def test_punctuation_kept(self):
        assert tokenize("don't stop") == ["don't", "stop"]

    def test_quot_entity(self):
        assert strip_punct("&quot;hi&quot;") == ["quot", "hi", "quot"]

    def test_apostrophe_dropped_in_place(self):
        assert strip_punct("don't") == ["dont"]
        assert strip_punct("don't", keep_apostrophes=True) == ["don't"]


class TestPipelines:
    def test_mt(self):
        assert run("mt", "Hello WORLD.") == ["hello", "world"]

    def test_ct(self):
        assert run("ct", "The cats ARE running!!") == ["cat", "run"]

    def test_pt_keeps_inflection(self):
        assert run("pt", "The cats ARE running!!") == ["cats", "running"]

    def test_sct_keeps_case_and_stopwords(self):
        assert run("sct", "The cats ARE running!!") == ["The", "cats", "ARE", "running"]

    def test_sfe_negation(self):
        assert run("sfe", "don't stop") == ["do", "not_stop"]

    def test_sfe_not_good(self):
        assert run("sfe", "this is not good") == ["this", "is", "not_good"]

    def test_sfe_lemma_can_be_disabled(self):
        spec = PipelineSpec.resolve("sfe", lemma=False)
        assert process_text("cats don't", spec) == ["cats", "do", "not"]

    def test_steps(self):
        assert PipelineSpec.resolve(Pipeline.CT).steps == ["lowercase", "tokenize", "strip-punct", "stopwords", "lemma"]

    def test_doc_keeps_id(self):
        doc = apply_pipeline(Tweet(42, 0, None, "u", "Hi there"), PipelineSpec.resolve("mt"))
        assert doc.tweet_id == 42 and doc.tokens == ("hi", "there")

    def test_punct_only_text_is_empty(self):
        assert run("ct", "!!! ...") == []


class TestHelpers:
    @pytest.mark.parametrize("tok,out", [("don't", ["do", "not"]), ("I'm", ["I", "am"]),
                                         ("can't", ["can", "not"]), ("word", ["word"])])
    def test_contractions(self, tok, out):
        assert expand_contraction(tok) == out

    def test_negator_at_end_left_alone(self):
        assert fuse_negations(["it", "is", "not"]) == ["it", "is", "not"]

    @pytest.mark.parametrize("w,lemma", [("cats", "cat"), ("running", "run"), ("studies", "study"),
                                        ("wanted", "want"), ("glass", "glass"), ("went", "go")])
    def test_lemmas(self, w, lemma):
        assert lemmatize(w) == lemma

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=12))
    def test_lemma_idempotent(self, w):
        assert lemmatize(lemmatize(w)) == lemmatize(w)

    @settings(max_examples=200, deadline=None)
    @given(st.text(min_size=0, max_size=60), st.sampled_from(list(Pipeline)))
    def test_tokens_have_no_whitespace(self, text, name):
        for tok in process_text(text, PipelineSpec.resolve(name)):
            assert tok and not any(ch.isspace() for ch in tok)
