#!/usr/bin/env python3
"""Regenerate the frozen CLI explanation goldens under tests/golden/.

Runs the real CLI so the goldens pin the full pipeline: fixture CSV ->
deterministic training -> explanation -> text rendering. Review the output
before committing a change; these files are the contract.
"""

from __future__ import annotations

import pathlib
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data" / "fixture_small.csv"
GOLDEN = ROOT / "tests" / "golden"

METHODS = ("lime-simplified", "lime-detailed", "shap-simplified", "shap-detailed")


def run(*args: str) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "trafficxai", *args], capture_output=True, text=True, check=True
    )
    return proc.stdout


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        model = str(pathlib.Path(tmp) / "pretrained_model")
        run("train", "--data", str(DATA), "--out", model, "--trees", "100", "--seed", "42")
        for method in METHODS:
            text = run(
                "explain", "--model", model, "--data", str(DATA), "--row", "0", "--method", method
            )
            (GOLDEN / f"explain_row0_{method}.txt").write_text(text, encoding="utf-8")
        predict = run("predict", "--model", model, "--data", str(DATA), "--limit", "5")
        (GOLDEN / "predict_head.txt").write_text(predict, encoding="utf-8")
    print(f"wrote goldens to {GOLDEN}")


if __name__ == "__main__":
    main()
