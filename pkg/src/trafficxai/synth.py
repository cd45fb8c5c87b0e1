"""Seeded synthetic detector data for fixtures and benchmarks.

Flow follows a smooth function of occupancy, speed, and time of day plus
Gaussian noise, so trained forests have real structure to explain. Values
are quantized to the CSV writer's precision, which makes fixture files
round-trip exactly.
"""

from __future__ import annotations

import numpy as np

from trafficxai.dataset import Dataset, TrafficRecord

CITIES = ("augsburg", "basel", "bern", "bordeaux", "bremen")
DAYS = ("2015-09-21", "2015-09-22", "2015-09-23")


def _q6(value: float) -> float:
    # quantize to the %.6g precision used by write_csv
    return float(f"{value:.6g}")


def synth_dataset(n_rows: int, seed: int = 0, noise: float = 5.0) -> Dataset:
    rng = np.random.default_rng(seed)
    interval = rng.integers(0, 86400 // 300, size=n_rows) * 300
    occ = rng.uniform(0.0, 0.6, size=n_rows)
    speed = rng.uniform(5.0, 110.0, size=n_rows)
    daily = 0.8 + 0.4 * np.sin(2.0 * np.pi * interval / 86400.0)
    flow = 100.0 * occ * np.sqrt(speed) * daily + rng.normal(0.0, noise, size=n_rows)
    flow = np.clip(flow, 0.0, None)

    records = []
    for i in range(n_rows):
        records.append(
            TrafficRecord(
                day=DAYS[i % len(DAYS)],
                interval=int(interval[i]),
                detid=f"d{i % max(1, n_rows // 4):04d}",
                flow=_q6(float(flow[i])),
                occ=_q6(float(occ[i])),
                speed=_q6(float(speed[i])),
                city=CITIES[i % len(CITIES)],
            )
        )
    return Dataset(records=tuple(records), source=f"synth(seed={seed})")
