"""Text pipelines turning raw tweets into token lists.

Five named pipelines are provided. The event-detection ones lowercase and
progressively clean the text:

=====  =========  ========  ============  ==========  =====
name   lowercase  tokenize  strip punct.  stopwords   lemma
=====  =========  ========  ============  ==========  =====
MT     yes        yes       yes           no          no
PT     yes        yes       yes           yes         no
CT     yes        yes       yes           yes         yes
=====  =========  ========  ============  ==========  =====

The sentiment ones keep case and stopwords. ``SCT`` only tokenizes and strips
punctuation; ``SFE`` additionally lemmatizes, expands contractions and fuses
negators with the following token (``not good`` -> ``not_good``).
"""
from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable

from .corpus import Tweet
from .lexicon import CONTRACTION_SUFFIXES, CONTRACTIONS, IRREGULAR, NEGATORS, STOPWORDS

APOSTROPHES = "'’ʼ"


class Pipeline(str, enum.Enum):
    MT = "mt"
    PT = "pt"
    CT = "ct"
    SCT = "sct"
    SFE = "sfe"


@dataclass(frozen=True)
class PipelineSpec:
    name: Pipeline
    lowercase: bool = False
    strip_punct: bool = True
    expand_contractions: bool = False
    stopwords: bool = False
    lemma: bool = False
    negation_fuse: bool = False

    @classmethod
    def resolve(cls, name: str | Pipeline, *, lemma: bool | None = None) -> "PipelineSpec":
        """Step list for a named pipeline. ``lemma`` overrides the default."""
        spec = _SPECS[Pipeline(str(getattr(name, "value", name)).lower())]
        if lemma is not None:
            spec = replace(spec, lemma=lemma)
        return spec

    @property
    def steps(self) -> list[str]:
        flags = [
            ("lowercase", self.lowercase),
            ("tokenize", True),
            ("strip-punct", self.strip_punct),
            ("expand-contractions", self.expand_contractions),
            ("stopwords", self.stopwords),
            ("lemma", self.lemma),
            ("negation-fuse", self.negation_fuse),
        ]
        return [step for step, on in flags if on]


_SPECS = {
    Pipeline.MT: PipelineSpec(Pipeline.MT, lowercase=True),
    Pipeline.PT: PipelineSpec(Pipeline.PT, lowercase=True, stopwords=True),
    Pipeline.CT: PipelineSpec(Pipeline.CT, lowercase=True, stopwords=True, lemma=True),
    Pipeline.SCT: PipelineSpec(Pipeline.SCT),
    Pipeline.SFE: PipelineSpec(
        Pipeline.SFE, expand_contractions=True, lemma=True, negation_fuse=True
    ),
}


@dataclass(frozen=True)
class TokenizedDoc:
    tweet_id: int
    tokens: tuple[str, ...]

    def __post_init__(self):
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r} in doc {self.tweet_id}")

    def to_json(self) -> dict:
        return {"id": self.tweet_id, "tokens": list(self.tokens)}

    @classmethod
    def from_json(cls, obj: dict) -> "TokenizedDoc":
        return cls(int(obj["id"]), tuple(obj["tokens"]))


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace; punctuation is left in place."""
    return text.split()


@lru_cache(maxsize=4096)
def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def strip_punct(token: str, keep_apostrophes: bool = False) -> list[str]:
    """Remove punctuation and symbol characters from one token.

    Punctuation splits the token (``&quot;hi&quot;`` -> quot, hi, quot) except
    for apostrophes, which are dropped in place so ``don't`` stays one word.
    With ``keep_apostrophes`` an apostrophe between two letters survives, for
    the contraction expander to see.
    """
    pieces: list[str] = []
    cur: list[str] = []
    n = len(token)
    for i, ch in enumerate(token):
        if ch in APOSTROPHES:
            inner = 0 < i < n - 1 and token[i - 1].isalnum() and token[i + 1].isalnum()
            if keep_apostrophes and inner:
                cur.append("'")
            continue
        if _is_punct(ch):
            if cur:
                pieces.append("".join(cur))
                cur = []
            continue
        cur.append(ch)
    if cur:
        pieces.append("".join(cur))
    return pieces


def expand_contraction(token: str) -> list[str]:
    """``don't`` -> [do, not]; ``I'm`` -> [I, am]. Case of the stem is kept."""
    low = token.lower()
    if low in CONTRACTIONS:
        first, rest = CONTRACTIONS[low]
        return [_restore_case(token, first) if token[:1].isupper() else first, rest]
    for suffix, expansion in CONTRACTION_SUFFIXES:
        if low.endswith(suffix) and len(low) > len(suffix):
            return [token[: -len(suffix)], *expansion]
    return [token]


_VOWELS = set("aeiouy")


def _has_vowel(stem: str) -> bool:
    return any(ch in _VOWELS for ch in stem)


def _undouble(stem: str) -> str:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "lsz" and stem[-1].isalpha():
        return stem[:-1]
    return stem


def _restore_case(src: str, word: str) -> str:
    if src.isupper() and len(src) > 1:
        return word.upper()
    if src[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def _strip_suffix(low: str) -> str:
    if low in IRREGULAR:
        return IRREGULAR[low]
    if not low.isalpha():
        return low
    if low.endswith("ies") and len(low) > 4:
        return low[:-3] + "y"
    if low.endswith("ing") and len(low) >= 5 and _has_vowel(low[:-3]):
        return _undouble(low[:-3])
    if low.endswith("eed"):
        return low
    if low.endswith("ied") and len(low) > 4:
        return low[:-3] + "y"
    if low.endswith("ed") and len(low) >= 4 and _has_vowel(low[:-2]):
        return _undouble(low[:-2])
    if low.endswith(("ses", "xes", "zes", "ches", "shes")) and len(low) >= 5:
        return low[:-2]
    if low.endswith("s") and not low.endswith(("ss", "us", "is")) and len(low) >= 3:
        return low[:-1]
    return low


def _lemma_once(word: str) -> str:
    low = word.lower()
    stem = _strip_suffix(low)
    return word if stem == low else _restore_case(word, stem)


@lru_cache(maxsize=65536)
def lemmatize(word: str) -> str:
    """Aggressive suffix stripper with an irregular-form table.

    Rules repeat until the word stops changing, so the result is a fixed
    point: ``lemmatize(lemmatize(w)) == lemmatize(w)``.
    """
    for _ in range(10):
        nxt = _lemma_once(word)
        if nxt == word or not nxt:
            return word
        word = nxt
    return word


def fuse_negations(tokens: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.lower() in NEGATORS and i + 1 < len(tokens):
            out.append(f"{tok}_{tokens[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def process_text(text: str, spec: PipelineSpec) -> list[str]:
    if spec.lowercase:
        text = text.lower()
    tokens = tokenize(text)
    if spec.strip_punct:
        tokens = [p for tok in tokens for p in strip_punct(tok, spec.expand_contractions)]
    if spec.expand_contractions:
        tokens = [w for tok in tokens for w in expand_contraction(tok)]
        tokens = [w for tok in tokens for w in strip_punct(tok)]
    if spec.stopwords:
        tokens = [t for t in tokens if t.lower() not in STOPWORDS]
    if spec.lemma:
        tokens = [lemmatize(t) for t in tokens]
        if spec.stopwords:
            # A lemma can land on a stopword ("hers" -> "her").
            tokens = [t for t in tokens if t.lower() not in STOPWORDS]
    if spec.negation_fuse:
        tokens = fuse_negations(tokens)
    return tokens


def apply_pipeline(doc: Tweet, spec: PipelineSpec) -> TokenizedDoc:
    return TokenizedDoc(doc.id, tuple(process_text(doc.raw_text, spec)))


def apply_all(docs: Iterable[Tweet], spec: PipelineSpec) -> list[TokenizedDoc]:
    return [apply_pipeline(d, spec) for d in docs]
