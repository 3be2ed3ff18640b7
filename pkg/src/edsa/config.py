"""Flat ``key = value`` run configuration (TOML syntax, no tables).

Every key has a default; a key not listed in ``KEYS`` is an error. Relative
input paths resolve against ``$EDSA_DATA_DIR`` when it is set.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DATA_ENV = "EDSA_DATA_DIR"
SOURCE_FILE = "training.1600000.processed.noemoticon.csv"

# key: (default, accepted types, description)
KEYS: dict[str, tuple[object, tuple[type, ...], str]] = {
    # paths
    "corpus": ("", (str,), f"source CSV; empty means ${DATA_ENV}/{SOURCE_FILE}"),
    "embeddings": ("", (str,), "external per-tweet vectors (id<TAB>floats); empty disables"),
    "work_dir": ("edsa-work", (str,), "parsed corpora, token dumps, matrices"),
    "model_dir": ("edsa-work/models", (str,), "trained model files"),
    "report_dir": ("edsa-work/reports", (str,), "events, metrics, ensemble and summary reports"),
    # run
    "seed": (42, (int,), "root seed; every module seed is derived from it"),
    "threads": (1, (int,), "worker cap"),
    "dataset": ("c1", (str,), "c1, c2, c3 or a CSV path"),
    "c1_size": (20000, (int,), "tweets in the C1 subset"),
    "c2_size": (500000, (int,), "tweets in the C2 subset"),
    "pipeline": ("sct", (str,), "sentiment preprocessing: sct or sfe (any of mt/pt/ct/sct/sfe accepted)"),
    "method": ("mabed", (str,), "event detector for detect-events"),
    "methods": ("mabed,olda,peaky", (str,), "event detectors used by ensemble"),
    "model": ("nb", (str,), "model for train/evaluate; evaluate also takes edsa"),
    "models": ("nb,lr,rc,svm,softmax,lstm", (str,), "models voting in the ensemble"),
    "top": (50, (int,), "events per method"),
    "k": (5, (int,), "cross-validation folds"),
    "min_df": (1, (int,), "vocabulary document-frequency floor"),
    # events
    "num_slices": (32, (int,), "time slices"),
    "dedup": (5, (int,), "shared keywords that merge two events; 0 disables"),
    "mabed_min_support": (3, (int,), "minimum tweets mentioning a main word"),
    "mabed_pool": (20, (int,), "co-occurring candidates scored per main word"),
    "olda_topics": (50, (int,), "topics K"),
    "olda_iters": (200, (int,), "Gibbs sweeps per slice"),
    "olda_mix": (0.5, (float, int), "weight of the previous slice in the topic-word prior"),
    "olda_alpha": (0.0, (float, int), "document-topic prior; 0 means 50/K"),
    "olda_beta": (0.01, (float, int), "base topic-word prior"),
    "olda_min_docs": (2, (int,), "member tweets for a topic to become an event"),
    "peaky_sub_bins": (8, (int,), "sub-bins per slice"),
    "peaky_z": (2.0, (float, int), "spike threshold in standard deviations"),
    # classifiers
    "nb_alpha": (1.0, (float, int), "Laplace smoothing"),
    "lr_lr": ("auto", (str, float, int), "step size; auto = 1/Lipschitz bound"),
    "lr_epochs": (100, (int,), "full-batch epochs"),
    "rc_lr": ("auto", (str, float, int), "step size; auto = 1/Lipschitz bound"),
    "rc_epochs": (100, (int,), "full-batch epochs"),
    "rc_lam": (1e-4, (float, int), "ridge penalty (intercept included)"),
    "svm_c": (0.1, (float, int), "hinge-loss weight C"),
    "svm_epochs": (20, (int,), "passes over the data"),
    "softmax_lr": (0.02, (float, int), "mini-batch step size"),
    "softmax_epochs": (50, (int,), "passes over the data"),
    "lstm_hidden": (128, (int,), "hidden size n"),
    "lstm_epochs": (10, (int,), "passes over the data"),
    "lstm_lr": (1e-3, (float, int), "Adam step size"),
    "lstm_max_len": (30, (int,), "tokens kept per tweet"),
    "lstm_batch": (64, (int,), "mini-batch size"),
    "lstm_clip": (5.0, (float, int), "gradient-norm clip"),
    "lstm_tune_embeddings": (True, (bool,), "update the CBOW input vectors during training"),
    "cbow_dim": (100, (int,), "embedding dimension"),
    "cbow_window": (5, (int,), "context half-width"),
    "cbow_epochs": (5, (int,), "passes over the corpus"),
    "cbow_negatives": (5, (int,), "negative samples per target"),
    "cbow_lr": (0.025, (float, int), "initial step size"),
}


class ConfigError(ValueError):
    pass


def _check(key: str, value):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    _, types, _ = KEYS[key]
    # bool is an int subclass; only accept it where bool is expected.
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"{key}: expected {types[0].__name__}, got a boolean")
    if not isinstance(value, types):
        raise ConfigError(f"{key}: expected {types[0].__name__}, got {type(value).__name__}")
    if types[0] is float and isinstance(value, int):
        value = float(value)
    return value


class Config:
    def __init__(self, values: dict | None = None):
        self._values = {k: d for k, (d, _, _) in KEYS.items()}
        for k, v in (values or {}).items():
            self._values[k] = _check(k, v)

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict | None = None) -> "Config":
        values = {}
        if path is not None:
            try:
                with open(path, "rb") as fh:
                    values = tomllib.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
            nested = [k for k, v in values.items() if isinstance(v, dict)]
            if nested:
                raise ConfigError(f"{path}: tables are not supported ({nested[0]!r}); use flat keys")
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(values)

    def __getitem__(self, key: str):
        if key not in self._values:
            raise ConfigError(f"unknown config key {key!r}")
        return self._values[key]

    def __getattr__(self, key: str):
        if key.startswith("_"):
            raise AttributeError(key)
        try:
            return self[key]
        except ConfigError as exc:
            raise AttributeError(key) from exc

    def as_dict(self) -> dict:
        return dict(self._values)

    def digest(self) -> str:
        """Hash of every resolved value except the worker cap, which never changes results."""
        payload = {k: v for k, v in self._values.items() if k != "threads"}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:16]

    def data_path(self, value: str) -> Path:
        p = Path(value)
        root = os.environ.get(DATA_ENV)
        return p if p.is_absolute() or not root else Path(root) / p

    def source_csv(self) -> Path:
        if self["corpus"]:
            return self.data_path(self["corpus"])
        root = os.environ.get(DATA_ENV)
        if not root:
            raise ConfigError(f"set {DATA_ENV} or the corpus key to locate {SOURCE_FILE}")
        return Path(root) / SOURCE_FILE


def describe() -> str:
    """Documented key list in config-file syntax."""
    lines = []
    for k, (d, _, doc) in KEYS.items():
        val = json.dumps(d) if not isinstance(d, bool) else str(d).lower()
        lines.append(f"# {doc}\n{k} = {val}")
    return "\n".join(lines) + "\n"
