"""Real-workload ingestion and series utilities.

Session logs are CSV rows `start,duration`. Ingestion divides start times by
a scale factor (durations unchanged), which compresses inter-arrival times
and raises the concurrency level, then rebuilds I(t) as the number of active
sessions. Event CSVs (`t,kind,...`) are also accepted and detected by header.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ParameterError, TraceFormatError
from .params import Regime, SystemState
from .simulate import EventTrace, KIND_ARRIVAL, read_trace_csv


@dataclass(frozen=True)
class SessionRecord:
    """One viewing session."""

    start: float
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise DataError(f"session duration must be > 0, got {self.duration}")


@dataclass
class WorkloadSeries:
    """Uniformly sampled workload: I at t0 + k*dt, with optional channels.

    r_hat (reconstructed past viewers, real-valued) and regime_hat (1/2) are
    attached by the estimation pipeline or by sampling a synthetic trace;
    real traces carry neither.
    """

    t0: float
    dt: float
    i: np.ndarray
    r_hat: np.ndarray | None = None
    regime_hat: np.ndarray | None = None

    def __post_init__(self):
        self.i = np.asarray(self.i)
        if len(self.i) and self.i.min() < 0:
            raise DataError("workload counts must be non-negative")
        for name in ("r_hat", "regime_hat"):
            channel = getattr(self, name)
            if channel is not None:
                channel = np.asarray(channel)
                if channel.shape != self.i.shape:
                    raise DataError(f"{name} length {len(channel)} != i length {len(self.i)}")
                setattr(self, name, channel)
        if not self.dt > 0:
            raise ParameterError("dt must be positive")

    def __len__(self) -> int:
        return len(self.i)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.i))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * len(self.i)


def read_sessions_csv(path: str | Path) -> list[SessionRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path} is empty", line=1)
        names = [h.strip().lower() for h in header]
        if names[:2] != ["start", "duration"]:
            raise TraceFormatError(
                f"expected header start,duration in {path}, got {','.join(names)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                start, duration = float(row[0]), float(row[1])
            except (ValueError, IndexError) as exc:
                raise TraceFormatError(f"bad session row {row!r}: {exc}", line=lineno) from None
            if duration <= 0:
                raise TraceFormatError(f"non-positive duration {duration}", line=lineno)
            records.append(SessionRecord(start, duration))
    return records


def write_sessions_csv(records: list[SessionRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start", "duration"])
        writer.writerows((repr(rec.start), repr(rec.duration)) for rec in records)


def ingest_sessions(records: list[SessionRecord], scale: float = 1.0) -> EventTrace:
    """Turn session records into an arrival/watch-end event trace.

    Start times are divided by `scale` (durations unchanged); each session
    contributes an arrival at its scaled start and a watch-end at scaled
    start + duration. I(t) is the number of concurrently active sessions.
    """
    if not records:
        raise DataError("no session records")
    if not scale > 0:
        raise ParameterError("scale must be positive")
    starts = np.array([rec.start for rec in records], dtype=np.float64) / scale
    ends = starts + np.array([rec.duration for rec in records], dtype=np.float64)
    times = np.concatenate((starts, ends))
    kinds = np.concatenate((np.zeros(len(starts), np.uint8),
                            np.ones(len(ends), np.uint8)))
    # Stable sort; at exact ties arrivals sort before watch-ends.
    order = np.lexsort((kinds, times))
    times = times[order]
    kinds = kinds[order]
    i_vals = np.cumsum(np.where(kinds == KIND_ARRIVAL, 1, -1))
    if i_vals.min() < 0:
        raise DataError("sessions imply negative concurrency; overlapping corruption?")
    zeros = np.zeros(len(times), np.int32)
    return EventTrace(
        params=None, seed=None, initial=SystemState(0, 0, Regime.BUZZ_FREE),
        t0=min(0.0, float(times[0])), t_end=float(times[-1]), t=times, kind=kinds,
        i=i_vals.astype(np.int32), r=zeros,
        regime=np.ones(len(times), np.uint8))


def split(series: WorkloadSeries, cut: float) -> tuple[WorkloadSeries, WorkloadSeries]:
    """Partition a series at `cut`; concatenating the parts reproduces it."""
    if not (series.t0 < cut < series.t_end):
        raise DataError(f"cut {cut} outside ({series.t0}, {series.t_end})")
    k = int(np.ceil((cut - series.t0) / series.dt - 1e-12))
    def piece(sl, t0):
        return WorkloadSeries(
            t0=t0, dt=series.dt, i=series.i[sl],
            r_hat=None if series.r_hat is None else series.r_hat[sl],
            regime_hat=None if series.regime_hat is None else series.regime_hat[sl])
    return piece(slice(0, k), series.t0), piece(slice(k, None), series.t0 + k * series.dt)


def autocorrelation(series: WorkloadSeries, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation at lags 0..max_lag (value 1 at lag 0)."""
    x = series.i.astype(np.float64)
    n = len(x)
    if n <= max_lag:
        raise DataError(f"series length {n} must exceed max_lag {max_lag}")
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        raise DataError("constant series has undefined autocorrelation")
    acf = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        acf[lag] = np.dot(x[: n - lag], x[lag:]) / denom
    return acf


def histogram(series: WorkloadSeries) -> np.ndarray:
    """Occupancy frequencies of I; entry k is the fraction of samples at I=k."""
    if len(series) == 0:
        raise DataError("empty series")
    counts = np.bincount(series.i.astype(np.int64))
    return counts / counts.sum()


def write_series_csv(series: WorkloadSeries, path: str | Path) -> None:
    """CSV with header t,i[,r_hat][,regime_hat]."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["t", "i"]
        columns = [map(repr, series.t.tolist()), series.i.tolist()]
        if series.r_hat is not None:
            header.append("r_hat")
            columns.append(map(repr, series.r_hat.tolist()))
        if series.regime_hat is not None:
            header.append("regime_hat")
            columns.append(np.asarray(series.regime_hat, np.int64).tolist())
        writer.writerow(header)
        writer.writerows(zip(*columns))


def read_series_csv(path: str | Path) -> WorkloadSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path} is empty", line=1)
        names = [h.strip().lower() for h in header]
        if names[0] != "t" or "i" not in names:
            raise TraceFormatError(f"expected header t,i[,r_hat][,regime_hat], got {names}",
                                   line=1)
        cols = {name: [] for name in names}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise TraceFormatError(f"row has {len(row)} fields, header has {len(names)}",
                                       line=lineno)
            try:
                for name, value in zip(names, row):
                    cols[name].append(float(value))
            except ValueError as exc:
                raise TraceFormatError(f"bad series row {row!r}: {exc}", line=lineno) from None
    t = np.asarray(cols["t"])
    if len(t) < 1:
        raise TraceFormatError("series has no samples")
    dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
    if len(t) > 2 and not np.allclose(np.diff(t), dt, rtol=1e-6, atol=1e-9 * max(dt, 1.0)):
        raise TraceFormatError("series grid is not uniform")
    i = np.asarray(cols["i"])
    if np.any(i < 0) or np.any(np.abs(i - np.round(i)) > 1e-9):
        raise TraceFormatError("column i must hold non-negative counts")
    return WorkloadSeries(
        t0=float(t[0]), dt=dt, i=np.round(i).astype(np.int64),
        r_hat=np.asarray(cols["r_hat"]) if "r_hat" in cols else None,
        regime_hat=np.asarray(cols["regime_hat"], dtype=np.uint8) if "regime_hat" in cols
        else None)


def load_workload(path: str | Path):
    """Autodetect a CSV by header: sessions, event trace, or sampled series."""
    with open(path, newline="") as fh:
        header = fh.readline().strip().lower().split(",")
    names = [h.strip() for h in header]
    if names[:2] == ["start", "duration"]:
        return read_sessions_csv(path)
    if names[:2] == ["t", "kind"]:
        return read_trace_csv(path)
    if names and names[0] == "t":
        return read_series_csv(path)
    raise TraceFormatError(f"unrecognized CSV header {','.join(names)} in {path}", line=1)
