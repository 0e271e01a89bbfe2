"""Daily precipitation ingestion and preprocessing.

The fixed pipeline is: temporal thinning (keep every third record) to
weaken serial dependence, then winter-month extraction, then the
dry-day threshold that zeroes values below 0.1 mm.  Thinning offset,
month set, cutoff and the missing-value sentinel are all configurable;
the defaults encode the standard recipe.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime

import numpy as np

from .model import Sample

WINTER_MONTHS = frozenset({11, 12, 1, 2})
DEFAULT_CUTOFF_MM = 0.1
DEFAULT_MISSING = -999.0


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class Station:
    name: str = ""
    latitude: float = 0.0
    longitude: float = 0.0


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Date-ordered daily precipitation records for one station."""

    station: Station
    dates: tuple[date, ...]
    precip: np.ndarray

    def __post_init__(self) -> None:
        precip = np.asarray(self.precip, dtype=float)
        object.__setattr__(self, "precip", precip)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != precip.size:
            raise DataError("dates and precip must have equal length")
        if np.any(precip < 0):
            raise DataError("precipitation must be nonnegative")

    @property
    def n(self) -> int:
        return self.precip.size


@dataclass
class LoadReport:
    rows: int = 0
    dropped_missing: int = 0


def _parse_date(text: str) -> date:
    text = text.strip()
    try:
        return date.fromisoformat(text)
    except ValueError:
        pass
    return datetime.strptime(text, "%Y%m%d").date()


def load_daily_csv(
    path,
    date_col: str = "date",
    precip_col: str = "precip",
    missing: float = DEFAULT_MISSING,
    station: Station | None = None,
) -> tuple[DailySeries, LoadReport]:
    """Parse a delimited daily series with a header row.

    Rows whose precipitation equals the missing-value sentinel are
    dropped and counted in the report.  Dates must be strictly
    increasing; the first offending line is named in the error.
    """
    report = LoadReport()
    dates: list[date] = []
    precip: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for col in (date_col, precip_col):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: missing required column {col!r}")
        for line_no, row in enumerate(reader, start=2):
            try:
                day = _parse_date(row[date_col])
            except (ValueError, TypeError) as err:
                raise DataError(f"{path}: line {line_no}: bad date {row[date_col]!r}") from err
            try:
                value = float(row[precip_col])
            except (ValueError, TypeError) as err:
                raise DataError(
                    f"{path}: line {line_no}: bad precipitation {row[precip_col]!r}"
                ) from err
            report.rows += 1
            if value == missing or math.isnan(value):
                report.dropped_missing += 1
                continue
            if value < 0:
                raise DataError(f"{path}: line {line_no}: negative precipitation {value!r}")
            if dates and day <= dates[-1]:
                raise DataError(
                    f"{path}: line {line_no}: date {day.isoformat()} is not after "
                    f"{dates[-1].isoformat()}"
                )
            dates.append(day)
            precip.append(value)
    if not dates:
        raise DataError(f"{path}: no usable records")
    series = DailySeries(
        station=station or Station(), dates=tuple(dates), precip=np.asarray(precip)
    )
    return series, report


def thin_records(series: DailySeries, step: int = 3, offset: int = 0) -> DailySeries:
    """Keep records at indices offset, offset+step, ... of the input order."""
    if series.n == 0:
        raise DataError("series is empty")
    if step < 1 or not 0 <= offset < step:
        raise ValueError("need step >= 1 and 0 <= offset < step")
    idx = np.arange(offset, series.n, step)
    return DailySeries(
        station=series.station,
        dates=tuple(series.dates[i] for i in idx),
        precip=series.precip[idx],
    )


def filter_months(series: DailySeries, months=WINTER_MONTHS) -> DailySeries:
    """Retain records whose calendar month is in ``months``."""
    months = frozenset(int(m) for m in months)
    if not months:
        raise ValueError("months must be nonempty")
    if not months <= set(range(1, 13)):
        raise ValueError("months must be in 1..12")
    keep = [i for i, d in enumerate(series.dates) if d.month in months]
    return DailySeries(
        station=series.station,
        dates=tuple(series.dates[i] for i in keep),
        precip=series.precip[np.asarray(keep, dtype=int)] if keep else np.empty(0),
    )


def zero_threshold(series: DailySeries, cutoff: float = DEFAULT_CUTOFF_MM) -> Sample:
    """Replace values strictly below ``cutoff`` with exact zero (dry days)."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    values = np.where(series.precip < cutoff, 0.0, series.precip)
    return Sample.from_values(values)


def preprocess(
    series: DailySeries,
    step: int = 3,
    offset: int = 0,
    months=WINTER_MONTHS,
    cutoff: float = DEFAULT_CUTOFF_MM,
) -> Sample:
    """The fixed pipeline: thin, then filter months, then threshold."""
    return zero_threshold(filter_months(thin_records(series, step, offset), months), cutoff)


def write_sample_file(sample: Sample, path) -> None:
    """One value per line, full precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for value in sample.values:
            fh.write(f"{float(value)!r}\n")


def read_sample_file(path) -> Sample:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as err:
                raise DataError(f"{path}: line {line_no}: bad value {line!r}") from err
    if not values:
        raise DataError(f"{path}: no values")
    return Sample.from_values(values)
