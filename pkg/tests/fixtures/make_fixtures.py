"""Regenerate the 100-tweet fixture CSV and the golden ensemble report.

    python3 tests/fixtures/make_fixtures.py

The golden file comes from running the CLI stages in a scratch directory; the
test suite checks it independently against a brute-force vote table.
"""
import shutil
import tempfile
from pathlib import Path

from edsa.cli import main
from edsa.corpus import write_csv
from edsa.synthetic import tweet_corpus

HERE = Path(__file__).resolve().parent
STAGES = [["ingest"], ["train", "--model", "nb"], ["train", "--model", "lr"], ["train", "--model", "rc"],
          ["train", "--model", "svm"], ["train", "--model", "softmax"], ["ensemble"]]


def run_pipeline(workdir: Path, threads: int = 1) -> Path:
    """Run ingest, train (5 models) and ensemble in ``workdir``; return the ensemble JSON path."""
    import os

    shutil.copy(HERE / "tweets100.csv", workdir / "tweets100.csv")
    shutil.copy(HERE / "fixture.toml", workdir / "fixture.toml")
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        for stage in STAGES:
            code = main(stage + ["--config", "fixture.toml", "--threads", str(threads)])
            if code:
                raise RuntimeError(f"stage {stage} exited {code}")
    finally:
        os.chdir(cwd)
    return workdir / "work" / "reports" / "ensemble-tweets100.json"


if __name__ == "__main__":
    write_csv(tweet_corpus(100, seed=7), HERE / "tweets100.csv")
    with tempfile.TemporaryDirectory() as tmp:
        out = run_pipeline(Path(tmp))
        shutil.copy(out, HERE / "golden_ensemble.json")
    print("wrote", HERE / "tweets100.csv", HERE / "golden_ensemble.json")
