"""UTD19-schema traffic data: parsing, validation, partitioning, features.

The on-disk format is RFC-4180-style CSV with a header row. Columns are
mapped by header name, so their order in the file does not matter; columns
beyond the seven known ones are ignored. Of the seven, only (interval, occ,
speed) feed the model; day/detid/city are carried through for display.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from typing import BinaryIO, Iterable, TextIO, Union

import numpy as np

FEATURE_NAMES = ("interval", "occ", "speed")
COLUMNS = ("day", "interval", "detid", "flow", "occ", "speed", "city")

Source = Union[str, bytes, TextIO, BinaryIO]


class DatasetError(ValueError):
    """Base class for data validation failures."""


class MissingColumn(DatasetError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column {name!r} missing from header")


class FieldTypeError(DatasetError):
    def __init__(self, row: int, column: str, raw: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: cannot read {raw!r}")


class FieldRangeError(DatasetError):
    def __init__(self, row: int, column: str, detail: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: {detail}")


class EmptyInput(DatasetError):
    def __init__(self):
        super().__init__("no data rows in input")


class InvalidFraction(DatasetError):
    def __init__(self, fraction: float):
        super().__init__(f"train_fraction must be in (0, 1), got {fraction}")


class EmptyMatrix(DatasetError):
    def __init__(self):
        super().__init__("feature matrix has no rows")


@dataclass(frozen=True)
class TrafficRecord:
    """One validated detector reading.

    interval is seconds since midnight; occ is the occupancy fraction in
    [0, 1]; flow is vehicles per hour; speed is km/h.
    """

    day: str
    interval: int
    detid: str
    flow: float
    occ: float
    speed: float
    city: str

    def features(self) -> tuple[float, float, float]:
        return (float(self.interval), self.occ, self.speed)


@dataclass(frozen=True)
class Dataset:
    """Ordered, individually valid records plus their provenance."""

    records: tuple[TrafficRecord, ...]
    source: str = ""

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature population statistics of a feature matrix."""

    mean: tuple[float, ...]
    std: tuple[float, ...]
    minimum: tuple[float, ...]
    maximum: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "mean": list(self.mean),
            "std": list(self.std),
            "minimum": list(self.minimum),
            "maximum": list(self.maximum),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureStats":
        return cls(
            mean=tuple(d["mean"]),
            std=tuple(d["std"]),
            minimum=tuple(d["minimum"]),
            maximum=tuple(d["maximum"]),
        )


def _as_text_stream(source: Source) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    first = getattr(source, "read", None)
    if first is None:
        raise TypeError(f"unsupported source type {type(source)!r}")
    if isinstance(source, io.TextIOBase):
        return source
    # binary file object
    return io.TextIOWrapper(source, encoding="utf-8")


def _parse_float(raw: str, row: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise FieldTypeError(row, column, raw) from None
    if not math.isfinite(value):
        raise FieldRangeError(row, column, f"value {raw!r} is not finite")
    return value


def _parse_interval(raw: str, row: int) -> int:
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        value = float(raw)
    except ValueError:
        raise FieldTypeError(row, "interval", raw) from None
    if not (math.isfinite(value) and value.is_integer()):
        raise FieldTypeError(row, "interval", raw)
    return int(value)


def parse_csv(source: Source, *, max_rows: int | None = None, source_name: str = "") -> Dataset:
    """Parse UTD19-schema CSV into a Dataset.

    Raises MissingColumn, FieldTypeError, FieldRangeError, or EmptyInput.
    Error row numbers count the header as line 1, so the first data row
    is row 2. max_rows, when given, stops reading after that many data rows.
    """
    stream = _as_text_stream(source)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput() from None

    positions: dict[str, int] = {}
    for idx, name in enumerate(header):
        positions.setdefault(name.strip(), idx)
    for name in COLUMNS:
        if name not in positions:
            raise MissingColumn(name)

    records: list[TrafficRecord] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if max_rows is not None and len(records) >= max_rows:
            break

        def cell(column: str) -> str:
            pos = positions[column]
            if pos >= len(row) or row[pos] == "":
                raise FieldTypeError(line_no, column, "")
            return row[pos]

        day = cell("day")
        detid = cell("detid")
        city = cell("city")
        if not detid.strip():
            raise FieldRangeError(line_no, "detid", "must be a non-empty string")
        if not city.strip():
            raise FieldRangeError(line_no, "city", "must be a non-empty string")

        interval = _parse_interval(cell("interval"), line_no)
        if interval < 0:
            raise FieldRangeError(line_no, "interval", f"{interval} is negative")
        flow = _parse_float(cell("flow"), line_no, "flow")
        if not flow >= 0:
            raise FieldRangeError(line_no, "flow", f"{flow} is negative")
        occ = _parse_float(cell("occ"), line_no, "occ")
        if not 0.0 <= occ <= 1.0:
            raise FieldRangeError(line_no, "occ", f"{occ} outside [0, 1]")
        speed = _parse_float(cell("speed"), line_no, "speed")
        if not speed >= 0:
            raise FieldRangeError(line_no, "speed", f"{speed} is negative")

        records.append(
            TrafficRecord(
                day=day, interval=interval, detid=detid, flow=flow, occ=occ, speed=speed, city=city
            )
        )

    if not records:
        raise EmptyInput()
    return Dataset(records=tuple(records), source=source_name)


def _format_real(value: float) -> str:
    return format(value, ".6g")


def write_csv(dataset: Dataset, sink: TextIO | BinaryIO | None = None) -> str:
    """Serialize a Dataset back to CSV, byte-deterministically.

    Fixed column order (day, interval, detid, flow, occ, speed, city),
    reals at 6 significant digits, "\\n" line endings. Returns the text;
    also writes it to sink when one is given.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in dataset.records:
        writer.writerow(
            [
                r.day,
                str(r.interval),
                r.detid,
                _format_real(r.flow),
                _format_real(r.occ),
                _format_real(r.speed),
                r.city,
            ]
        )
    text = out.getvalue()
    if sink is not None:
        if isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(text.encode("utf-8"))
    return text


def split(dataset: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic seeded shuffle-then-split.

    The shuffle is Fisher-Yates over row indices driven by the stdlib
    Mersenne Twister: j = random.Random(seed).randrange(i + 1) for
    i = n-1 .. 1. train receives the first floor(n * train_fraction)
    shuffled rows, the remainder goes to the inference set; both keep
    shuffled order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidFraction(train_fraction)
    if len(dataset) == 0:
        raise EmptyInput()

    n = len(dataset)
    indices = list(range(n))
    rng = random.Random(seed)
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        indices[i], indices[j] = indices[j], indices[i]

    n_train = math.floor(n * train_fraction)
    train_records = tuple(dataset.records[i] for i in indices[:n_train])
    infer_records = tuple(dataset.records[i] for i in indices[n_train:])
    return (
        Dataset(records=train_records, source=dataset.source),
        Dataset(records=infer_records, source=dataset.source),
    )


def feature_matrix(dataset: Dataset) -> np.ndarray:
    """(n, 3) float64 matrix of (interval, occ, speed), row-aligned with the dataset."""
    return np.array([r.features() for r in dataset.records], dtype=np.float64).reshape(
        len(dataset), len(FEATURE_NAMES)
    )


def targets(dataset: Dataset) -> np.ndarray:
    """(n,) float64 vector of flow values, row-aligned with the dataset."""
    return np.array([r.flow for r in dataset.records], dtype=np.float64)


def feature_stats(matrix: np.ndarray) -> FeatureStats:
    """Population mean/std/min/max per feature column."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0:
        raise EmptyMatrix()
    mean = m.mean(axis=0)
    std = np.sqrt(((m - mean) ** 2).mean(axis=0))
    return FeatureStats(
        mean=tuple(float(v) for v in mean),
        std=tuple(float(v) for v in std),
        minimum=tuple(float(v) for v in m.min(axis=0)),
        maximum=tuple(float(v) for v in m.max(axis=0)),
    )


def records_from_arrays(
    days: Iterable[str],
    intervals: Iterable[int],
    detids: Iterable[str],
    flows: Iterable[float],
    occs: Iterable[float],
    speeds: Iterable[float],
    cities: Iterable[str],
) -> Dataset:
    """Column-wise Dataset constructor, mostly for fixtures."""
    records = tuple(
        TrafficRecord(day=d, interval=i, detid=det, flow=f, occ=o, speed=s, city=c)
        for d, i, det, f, o, s, c in zip(days, intervals, detids, flows, occs, speeds, cities)
    )
    return Dataset(records=records)
