"""Censored samples, the uniform-scale transform, and estimators built on it.

A right-censored sample is a list of pairs (time, event): `event` is true
when the survival time itself was observed and false when only a lower
bound (the censoring time) was seen.  Testing a fully specified null
distribution F0 reduces to testing uniformity of the transformed values
u = F0(time) together with the untouched event indicators, so everything
downstream of :func:`transform` works on the unit interval.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import DatasetFormatError, InvalidModelError
from .kernels import MAX_U, KernelSpec


@dataclass(frozen=True)
class CensoredObservation:
    """One observed pair: follow-up time and whether the event was seen."""

    time: float
    event: bool

    def __post_init__(self):
        if not (math.isfinite(self.time) and self.time >= 0):
            raise ValueError(f"time must be finite and nonnegative, got {self.time!r}")


class Dataset:
    """Ordered right-censored sample held as parallel arrays."""

    def __init__(self, times: Sequence[float], events: Sequence[bool]):
        times = np.asarray(times, dtype=float)
        events = np.asarray(events, dtype=bool)
        if times.ndim != 1 or times.shape != events.shape:
            raise ValueError("times and events must be 1-D arrays of equal length")
        if not (np.isfinite(times).all() and (times >= 0).all()):
            raise ValueError("times must be finite and nonnegative")
        self.times = times
        self.events = events

    @classmethod
    def from_observations(cls, observations: Sequence[CensoredObservation]) -> "Dataset":
        return cls([o.time for o in observations], [o.event for o in observations])

    def __len__(self) -> int:
        return self.times.shape[0]

    def __iter__(self) -> Iterator[CensoredObservation]:
        for t, e in zip(self.times, self.events):
            yield CensoredObservation(float(t), bool(e))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(
            self.events, other.events
        )


@dataclass(frozen=True)
class NullModel:
    """Hypothesized survival-time distribution, given by its CDF."""

    cdf: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "NullModel":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return cls(cdf=lambda t: -np.expm1(-rate * np.asarray(t, dtype=float)),
                   description=f"exponential(rate={rate:g})")


class TransformedDataset:
    """Pairs (u, delta) with u = F0(time) clamped into [0, 1 - 1e-12]."""

    def __init__(self, u: Sequence[float], delta: Sequence[int]):
        u = np.asarray(u, dtype=float)
        delta = np.asarray(delta)
        if u.ndim != 1 or u.shape != delta.shape:
            raise ValueError("u and delta must be 1-D arrays of equal length")
        if np.any((u < 0) | (u > MAX_U)):
            raise ValueError("transformed values must lie in [0, 1 - 1e-12]")
        if not np.isin(delta, (0, 1)).all():
            raise ValueError("delta entries must be 0 or 1")
        self.u = u
        self.delta = delta.astype(np.int8)

    def __len__(self) -> int:
        return self.u.shape[0]


def transform(data: Dataset, model: NullModel) -> TransformedDataset:
    """Map observed times through the null CDF, keeping indicators and order.

    Raises :class:`InvalidModelError` if the CDF leaves [0, 1] or is
    decreasing along the sorted observed times.
    """
    u = np.asarray(model.cdf(data.times), dtype=float)
    if u.shape != data.times.shape:
        raise InvalidModelError("cdf must evaluate elementwise on the time array")
    if not np.isfinite(u).all() or np.any((u < 0) | (u > 1)):
        raise InvalidModelError("cdf values fall outside [0, 1]")
    order = np.argsort(data.times, kind="stable")
    if np.any(np.diff(u[order]) < 0):
        raise InvalidModelError("cdf is not monotone on the observed times")
    return TransformedDataset(np.minimum(u, MAX_U), data.events.astype(np.int8))


def transform_cumhaz(u):
    """Null cumulative hazard on the transformed scale: -log(1 - u)."""
    u = np.asarray(u, dtype=float)
    if np.any(u >= 1.0):
        raise ValueError("cumulative hazard diverges at u = 1")
    out = -np.log1p(-u)
    return float(out) if out.ndim == 0 else out


def ftilde_eval(data: TransformedDataset, x):
    """Censoring-adjusted distribution estimate at `x`; broadcasts over `x`.

    Each uncensored point contributes a step of height 1/n at its
    position; each censored point ramps its 1/n mass linearly over
    (u, 1).  The result is nondecreasing, right-continuous, and equals
    exactly 1 at x = 1.
    """
    x = np.asarray(x, dtype=float)
    u = data.u[..., np.newaxis] if x.ndim else data.u
    d = data.delta[..., np.newaxis] if x.ndim else data.delta
    ramp = (x - u) / (1.0 - u)
    contrib = (u <= x) * (d + (1 - d) * ramp)
    out = contrib.mean(axis=0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class StepCDF:
    """Right-continuous step function given by jump times and post-jump values."""

    times: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.times, x, side="right")
        padded = np.concatenate(([0.0], self.values))
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def left_limit(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.times, x, side="left")
        padded = np.concatenate(([0.0], self.values))
        out = padded[idx]
        return float(out) if out.ndim == 0 else out


def _product_limit_weights(times: np.ndarray, events: np.ndarray):
    """Sorted times with their product-limit jump masses.

    Ties are broken with events first, matching the convention that an
    event observed at a censoring time is still at risk of censoring.
    """
    n = times.shape[0]
    order = np.lexsort((~events, times))
    t_sorted = times[order]
    e_sorted = events[order].astype(float)
    # weight_i = (event_i / n) * prod_{j<i} (1 + (1 - event_j) / (n - j)), 1-based j
    j = np.arange(1, n + 1, dtype=float)
    factors = np.ones(n)
    if n > 1:
        factors[1:] = 1.0 + (1.0 - e_sorted[:-1]) / (n - j[:-1])
    weights = e_sorted / n * np.cumprod(factors)
    return t_sorted, weights


def kaplan_meier(data: Dataset) -> StepCDF:
    """Product-limit estimate of the failure distribution, as a step CDF.

    With no censoring this is exactly the empirical CDF; a fully
    censored sample yields the zero function.
    """
    t_sorted, weights = _product_limit_weights(data.times, data.events)
    jump_times, start = np.unique(t_sorted, return_index=True)
    sums = np.add.reduceat(weights, start) if len(weights) else weights
    return StepCDF(times=jump_times, values=np.cumsum(sums))


def risk_function(data: TransformedDataset, t: float) -> int:
    """Number of subjects still under observation at `t`: #{u_i >= t}."""
    return int(np.count_nonzero(data.u >= t))


def median_heuristic(data: TransformedDataset) -> KernelSpec:
    """Kernel length-scale set to the median pairwise distance of the sample.

    Censored and uncensored positions enter alike.  A zero median (mass
    ties) falls back to length-scale 1.
    """
    n = len(data)
    if n < 2:
        raise ValueError("median heuristic needs at least 2 points")
    iu, ju = np.triu_indices(n, k=1)
    med = float(np.median(np.abs(data.u[iu] - data.u[ju])))
    return KernelSpec(lengthscale=med if med > 0 else 1.0)


def read_dataset_csv(path) -> Dataset:
    """Read a `time,event` CSV; format errors name the offending row."""
    times: list[float] = []
    events: list[bool] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [col.strip() for col in header] != ["time", "event"]:
            raise DatasetFormatError(1, "expected header 'time,event'")
        for row_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise DatasetFormatError(row_no, f"expected 2 fields, got {len(row)}")
            try:
                t = float(row[0])
            except ValueError:
                raise DatasetFormatError(row_no, f"invalid time {row[0]!r}") from None
            if not (math.isfinite(t) and t >= 0):
                raise DatasetFormatError(row_no, f"time must be finite and nonnegative, got {row[0]!r}")
            ev = row[1].strip()
            if ev not in ("0", "1"):
                raise DatasetFormatError(row_no, f"event must be 0 or 1, got {row[1]!r}")
            times.append(t)
            events.append(ev == "1")
    return Dataset(times, events)


def write_dataset_csv(path, data: Dataset) -> None:
    """Write a dataset in the `time,event` CSV format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "event"])
        for t, e in zip(data.times, data.events):
            writer.writerow([repr(float(t)), int(e)])
