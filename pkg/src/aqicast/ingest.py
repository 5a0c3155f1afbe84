"""Parsing, imputation and synthetic generation of per-city pollutant series.

The on-disk format is the India air-quality CSV export: a header row with
``City`` and ``Date`` key columns plus pollutant columns, one reading per row.
Rows are grouped by city into immutable :class:`SeriesFrame` objects with a
row-major float matrix where missing cells are NaN until imputed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DuplicateKeyError, SchemaError, UnimputableColumnError
from .schema import FEATURE_COLUMNS, KEY_COLUMNS, MISSING_SENTINELS, SCHEMA_COLUMNS

_DATE_FORMATS = ("%Y-%m-%d %H:%M:%S", "%Y-%m-%d")

IMPUTE_MODES = ("forward_fill", "drop_row", "column_mean")


@dataclass(frozen=True)
class Reading:
    """One sensor reading: a city, a timestamp and named pollutant values."""

    city: str
    timestamp: datetime
    values: Mapping[str, float | None]

    def __post_init__(self):
        unknown = set(self.values) - set(FEATURE_COLUMNS)
        if unknown:
            raise SchemaError(f"unknown feature names: {sorted(unknown)}")
        for name, value in self.values.items():
            if value is None:
                continue
            if not math.isfinite(value) or value < 0:
                raise SchemaError(f"value for {name} must be finite and >= 0, got {value}")


class SeriesFrame:
    """Aligned pollutant time series for one city.

    Timestamps are strictly increasing; ``data`` has one row per timestamp and
    one column per feature name, with NaN marking missing cells. Instances are
    immutable (the matrix is write-protected) and safe to share across threads.
    """

    __slots__ = ("city", "timestamps", "columns", "data")

    def __init__(self, city: str, timestamps: Sequence[datetime],
                 columns: Sequence[str], data: np.ndarray):
        timestamps = tuple(timestamps)
        columns = tuple(columns)
        data = np.asarray(data, dtype=float)
        if data.shape != (len(timestamps), len(columns)):
            raise SchemaError(
                f"data shape {data.shape} != ({len(timestamps)}, {len(columns)})")
        for prev, cur in zip(timestamps, timestamps[1:]):
            if cur <= prev:
                raise DuplicateKeyError(
                    f"timestamps not strictly increasing at ({city!r}, {cur})")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "city", city)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("SeriesFrame is immutable")

    @property
    def n_rows(self) -> int:
        return len(self.timestamps)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def has_missing(self) -> bool:
        return bool(np.isnan(self.data).any())

    def with_data(self, data: np.ndarray) -> "SeriesFrame":
        return SeriesFrame(self.city, self.timestamps, self.columns, data)

    def take_rows(self, index: Sequence[int]) -> "SeriesFrame":
        index = list(index)
        return SeriesFrame(self.city, [self.timestamps[i] for i in index],
                           self.columns, self.data[index])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesFrame):
            return NotImplemented
        return (self.city == other.city
                and self.timestamps == other.timestamps
                and self.columns == other.columns
                and np.array_equal(self.data, other.data, equal_nan=True))

    def __repr__(self) -> str:
        return (f"SeriesFrame(city={self.city!r}, rows={self.n_rows}, "
                f"columns={len(self.columns)})")


@dataclass(frozen=True)
class ImputePolicy:
    """How to remove missing cells: forward_fill, drop_row or column_mean."""

    mode: str = "forward_fill"
    max_gap: int = 24

    def __post_init__(self):
        if self.mode not in IMPUTE_MODES:
            raise ValueError(f"mode must be one of {IMPUTE_MODES}, got {self.mode!r}")
        if self.max_gap < 0:
            raise ValueError(f"max_gap must be >= 0, got {self.max_gap}")


@dataclass
class ParseReport:
    """Frames parsed from a CSV plus counters for everything quietly repaired."""

    frames: list[SeriesFrame]
    extra_columns: int = 0
    unparseable_cells: int = 0
    clamped_negatives: int = 0
    rejected_rows: int = 0
    parsed_rows: int = 0


def _parse_timestamp(text: str) -> datetime | None:
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    return None


def _parse_cell(text: str, report: ParseReport) -> float:
    if text.strip().lower() in MISSING_SENTINELS:
        return math.nan
    try:
        value = float(text)
    except ValueError:
        report.unparseable_cells += 1
        return math.nan
    if not math.isfinite(value):
        report.unparseable_cells += 1
        return math.nan
    if value < 0:
        report.clamped_negatives += 1
        return 0.0
    return value


def _decode(source) -> io.StringIO:
    if isinstance(source, bytes):
        try:
            return io.StringIO(source.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise SchemaError(f"input is not valid UTF-8: {exc}") from exc
    if isinstance(source, str):
        return io.StringIO(source)
    data = source.read()
    if isinstance(data, bytes):
        return _decode(data)
    return io.StringIO(data)


def parse_csv_report(source, schema: Sequence[str] = SCHEMA_COLUMNS) -> ParseReport:
    """Parse a CSV byte stream into per-city frames, counting repairs.

    Rows with unparseable dates are rejected (counted, not fatal); unparseable
    or sentinel numeric cells become missing; negative values are clamped to 0.
    Columns outside ``schema`` are ignored. Raises :class:`SchemaError` if the
    header lacks City/Date and :class:`DuplicateKeyError` on a repeated
    (city, timestamp) pair.
    """
    feature_names = [c for c in schema if c not in KEY_COLUMNS]
    report = ParseReport(frames=[])
    text = _decode(source)
    try:
        reader = csv.reader(text)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty input: no header row") from None
        header = [h.strip() for h in header]
        for key in KEY_COLUMNS:
            if key not in header:
                raise SchemaError(f"header is missing required column {key!r}")
        city_idx = header.index("City")
        date_idx = header.index("Date")
        col_idx = {name: header.index(name) for name in feature_names if name in header}
        report.extra_columns = len(
            [h for h in header if h not in schema])

        per_city: dict[str, dict[datetime, list[float]]] = {}
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                row = row + [""] * (len(header) - len(row))
            city = row[city_idx].strip()
            ts = _parse_timestamp(row[date_idx])
            if not city or ts is None:
                report.rejected_rows += 1
                continue
            values = []
            for name in feature_names:
                idx = col_idx.get(name)
                values.append(math.nan if idx is None else _parse_cell(row[idx], report))
            rows = per_city.setdefault(city, {})
            if ts in rows:
                raise DuplicateKeyError(f"duplicate (city, timestamp) pair: ({city!r}, {ts})")
            rows[ts] = values
            report.parsed_rows += 1
    except csv.Error as exc:
        raise SchemaError(f"malformed CSV: {exc}") from exc

    for city in sorted(per_city):
        rows = per_city[city]
        stamps = sorted(rows)
        data = np.array([rows[ts] for ts in stamps], dtype=float).reshape(
            len(stamps), len(feature_names))
        report.frames.append(SeriesFrame(city, stamps, feature_names, data))
    return report


def parse_csv(source, schema: Sequence[str] = SCHEMA_COLUMNS) -> list[SeriesFrame]:
    """Parse a CSV byte stream into one SeriesFrame per city."""
    return parse_csv_report(source, schema).frames


def _forward_fill(frame: SeriesFrame, max_gap: int) -> SeriesFrame:
    data = frame.data.copy()
    n, m = data.shape
    drop = np.zeros(n, dtype=bool)
    for j in range(m):
        col = data[:, j]
        missing = np.isnan(col)
        if missing.all():
            raise UnimputableColumnError(
                f"column {frame.columns[j]!r} has no observed values")
        i = 0
        while i < n:
            if not missing[i]:
                i += 1
                continue
            run_start = i
            while i < n and missing[i]:
                i += 1
            run_len = i - run_start
            if run_start == 0 or run_len > max_gap:
                drop[run_start:i] = True
            else:
                data[run_start:i, j] = data[run_start - 1, j]
    if drop.any():
        # every gap was either filled above or sits in a dropped row, so the
        # survivors are complete even when drops interleave across columns
        keep = np.flatnonzero(~drop)
        frame = frame.take_rows(keep)
        data = data[keep]
    return frame.with_data(data)


def impute(frame: SeriesFrame, policy: ImputePolicy) -> SeriesFrame:
    """Return a copy of ``frame`` with every missing cell resolved."""
    if not frame.has_missing():
        return frame
    if policy.mode == "drop_row":
        keep = np.flatnonzero(~np.isnan(frame.data).any(axis=1))
        return frame.take_rows(keep)
    if policy.mode == "column_mean":
        data = frame.data.copy()
        for j, name in enumerate(frame.columns):
            col = data[:, j]
            present = ~np.isnan(col)
            if not present.any():
                raise UnimputableColumnError(f"column {name!r} has no observed values")
            col[~present] = col[present].mean()
        return frame.with_data(data)
    return _forward_fill(frame, policy.max_gap)


@dataclass(frozen=True)
class SinusoidSpec:
    """Per-pollutant generator parameters: offset + amplitude*sin + noise."""

    offset: float
    amplitude: float
    period: float
    sigma: float

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError(f"period must be > 0, got {self.period}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


# Distinct periods keep the generated pollutants mutually near-uncorrelated.
DEFAULT_SYNTHETIC_PARAMS: dict[str, SinusoidSpec] = {
    "PM2.5": SinusoidSpec(60.0, 25.0, 24.0, 8.0),
    "PM10": SinusoidSpec(110.0, 40.0, 168.0, 12.0),
    "NO": SinusoidSpec(15.0, 6.0, 12.0, 2.0),
    "NO2": SinusoidSpec(30.0, 12.0, 36.0, 4.0),
    "NOx": SinusoidSpec(35.0, 15.0, 48.0, 5.0),
    "NH3": SinusoidSpec(25.0, 8.0, 60.0, 3.0),
    "CO": SinusoidSpec(1.2, 0.5, 30.0, 0.15),
    "SO2": SinusoidSpec(12.0, 5.0, 84.0, 1.5),
    "O3": SinusoidSpec(40.0, 18.0, 17.0, 6.0),
    "Benzene": SinusoidSpec(3.0, 1.2, 20.0, 0.4),
    "Toluene": SinusoidSpec(8.0, 3.0, 40.0, 1.0),
    "Xylene": SinusoidSpec(4.0, 1.5, 56.0, 0.5),
}

_SYNTH_START = datetime(2015, 1, 1)


def generate_synthetic(seed: int, n_rows: int,
                       params: Mapping[str, SinusoidSpec] | None = None,
                       city: str = "Synthetic") -> SeriesFrame:
    """Generate a deterministic hourly frame of clipped noisy sinusoids.

    Each column is ``max(0, offset + amplitude*sin(2*pi*t/period) + noise)``
    with Gaussian noise of the configured sigma. The same seed always yields
    a bit-identical frame.
    """
    if n_rows < 1:
        raise ValueError(f"n_rows must be >= 1, got {n_rows}")
    spec = dict(DEFAULT_SYNTHETIC_PARAMS)
    if params:
        unknown = set(params) - set(FEATURE_COLUMNS)
        if unknown:
            raise ValueError(f"unknown pollutant names in params: {sorted(unknown)}")
        spec.update(params)
    rng = np.random.default_rng(seed)
    t = np.arange(n_rows, dtype=float)
    columns = []
    for name in FEATURE_COLUMNS:
        s = spec[name]
        noise = rng.standard_normal(n_rows) * s.sigma
        wave = s.offset + s.amplitude * np.sin(2.0 * np.pi * t / s.period)
        columns.append(np.maximum(0.0, wave + noise))
    stamps = [_SYNTH_START + timedelta(hours=k) for k in range(n_rows)]
    return SeriesFrame(city, stamps, FEATURE_COLUMNS, np.column_stack(columns))


def write_frame_csv(frames: Iterable[SeriesFrame], stream) -> None:
    """Write frames as one schema CSV (City, Date, pollutant columns)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCHEMA_COLUMNS)
    for frame in frames:
        order = [frame.columns.index(c) for c in FEATURE_COLUMNS]
        for ts, row in zip(frame.timestamps, frame.data):
            cells = ["" if math.isnan(row[j]) else repr(float(row[j])) for j in order]
            writer.writerow([frame.city, ts.strftime("%Y-%m-%d %H:%M:%S")] + cells)


def read_frame_csv(stream) -> list[SeriesFrame]:
    """Read frames written by :func:`write_frame_csv` without value repairs.

    Unlike :func:`parse_csv` this is strict: cells must be empty or plain
    floats (negatives allowed, since denoised series may undershoot zero).
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: no header row") from None
    if list(header) != list(SCHEMA_COLUMNS):
        raise SchemaError(f"unexpected frame CSV header: {header}")
    per_city: dict[str, dict[datetime, list[float]]] = {}
    for row in reader:
        if not row:
            continue
        city = row[0]
        ts = _parse_timestamp(row[1])
        if ts is None:
            raise SchemaError(f"bad timestamp in frame CSV: {row[1]!r}")
        values = [math.nan if cell == "" else float(cell) for cell in row[2:]]
        rows = per_city.setdefault(city, {})
        if ts in rows:
            raise DuplicateKeyError(f"duplicate (city, timestamp) pair: ({city!r}, {ts})")
        rows[ts] = values
    frames = []
    for city in sorted(per_city):
        rows = per_city[city]
        stamps = sorted(rows)
        data = np.array([rows[ts] for ts in stamps], dtype=float).reshape(
            len(stamps), len(FEATURE_COLUMNS))
        frames.append(SeriesFrame(city, stamps, FEATURE_COLUMNS, data))
    return frames
