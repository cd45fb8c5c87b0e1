#!/usr/bin/env python3
"""Regenerate the CSV fixtures under tests/data/."""

from __future__ import annotations

import pathlib

from trafficxai.dataset import write_csv
from trafficxai.synth import synth_dataset

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    small = synth_dataset(200, seed=7)
    (DATA_DIR / "fixture_small.csv").write_text(write_csv(small), encoding="utf-8")
    large = synth_dataset(5000, seed=11)
    (DATA_DIR / "fixture_large.csv").write_text(write_csv(large), encoding="utf-8")
    print(f"wrote fixtures to {DATA_DIR}")


if __name__ == "__main__":
    main()
