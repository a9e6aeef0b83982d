"""Uniformly sampled nondimensional time signals.

Everything downstream (spectra, drag models, the oscillator and the flow
solver output) passes signals around as :class:`TimeSeries`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSeries, NotPeriodic, SpanTooShort, TooFewSamples

UNIFORM_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Samples ``values[i]`` taken at ``t0 + i*dt``.

    The value array is copied and made read-only on construction.
    """

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidSeries(f"dt must be positive and finite, got {self.dt!r}")
        if not math.isfinite(self.t0):
            raise InvalidSeries("t0 must be finite")
        if values.size < 2:
            raise InvalidSeries("a time series needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            raise InvalidSeries("time series contains NaN or Inf samples")
        values.flags.writeable = False
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_samples(cls, t, values) -> "TimeSeries":
        """Build from explicit sample times, which must be uniform."""
        t = np.asarray(t, dtype=float)
        if t.size < 2:
            raise InvalidSeries("a time series needs at least 2 samples")
        steps = np.diff(t)
        dt = (t[-1] - t[0]) / (t.size - 1)
        if dt <= 0 or np.max(np.abs(steps - dt)) > UNIFORM_RTOL * max(abs(dt), 1.0) * 10:
            raise InvalidSeries("sample times are not uniformly spaced")
        return cls(float(t[0]), float(dt), values)

    def __len__(self):
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def duration(self) -> float:
        """Time between the first and the last sample."""
        return self.dt * (self.values.size - 1)

    @property
    def t_end(self) -> float:
        return self.t0 + self.duration

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.t0, self.dt, values)

    def tail(self, count: int) -> "TimeSeries":
        """The last ``count`` samples."""
        count = int(count)
        if count < 2 or count > len(self):
            raise ValueError(f"cannot take {count} samples from a series of {len(self)}")
        start = len(self) - count
        return TimeSeries(self.t0 + start * self.dt, self.dt, self.values[start:])

    def same_grid(self, other: "TimeSeries") -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.dt, other.dt, rel_tol=UNIFORM_RTOL)
            and abs(self.t0 - other.t0) <= 1e-6 * self.dt
        )


def trapezoid_weights(n: int) -> np.ndarray:
    """Normalized trapezoid weights for a closed window of ``n`` samples.

    Over a window spanning an exact number of periods the endpoints share a
    phase, so these weights reduce to the rectangle rule over ``n - 1``
    distinct phases and integrate harmonics exactly.
    """
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w / (n - 1)


def time_average(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.dot(trapezoid_weights(values.size), values))


def trim_to_integer_periods(ts: TimeSeries, omega: float) -> TimeSeries:
    """Longest suffix of ``ts`` covering a whole number of periods 2*pi/omega.

    The retained duration matches the period multiple to within dt/2; the
    oldest samples (initial transient) are the ones dropped.
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise ValueError(f"omega must be positive, got {omega!r}")
    period = 2.0 * math.pi / omega
    n_periods = math.floor((ts.duration + 0.5 * ts.dt) / period + 1e-12)
    if n_periods < 1:
        raise SpanTooShort(
            f"series spans {ts.duration:.6g} time units, less than one period ({period:.6g})"
        )
    intervals = min(int(round(n_periods * period / ts.dt)), len(ts) - 1)
    return ts.tail(intervals + 1)


def central_difference(ts: TimeSeries) -> TimeSeries:
    """Time derivative, second order everywhere (one-sided at the ends)."""
    if len(ts) < 3:
        raise TooFewSamples("central differences need at least 3 samples")
    return ts.with_values(np.gradient(ts.values, ts.dt, edge_order=2))


def moment_means(ts: TimeSeries) -> tuple[float, float]:
    """Time averages of the signal and of its square."""
    v = ts.values
    return time_average(v), time_average(v * v)


def period_fold(ts: TimeSeries, omega: float, samples_per_period: int = 256):
    """Resample ``ts`` onto a phase grid, one row per whole period.

    Returns ``(phase, folded)`` where ``phase`` holds the sample times within
    a period (relative to the first retained sample) and ``folded`` has shape
    ``(n_periods, samples_per_period)``. The series is trimmed first.
    """
    window = trim_to_integer_periods(ts, omega)
    period = 2.0 * math.pi / omega
    n_periods = int(round(window.duration / period))
    phase = np.arange(samples_per_period) * (period / samples_per_period)
    starts = window.t0 + period * np.arange(n_periods)
    t_query = starts[:, None] + phase[None, :]
    folded = np.interp(t_query.ravel(), window.times, window.values).reshape(t_query.shape)
    return phase, folded


def periodicity_deviation(ts: TimeSeries, omega: float, samples_per_period: int = 256) -> float:
    """RMS period-to-period deviation relative to the RMS of the demeaned signal."""
    _, folded = period_fold(ts, omega, samples_per_period)
    if folded.shape[0] < 2:
        raise NotPeriodic("need at least two whole periods to judge periodicity")
    spread = np.sqrt(np.mean((folded - folded.mean(axis=0)) ** 2))
    scale = np.sqrt(np.mean((folded - folded.mean()) ** 2))
    if scale == 0.0:
        return 0.0
    return float(spread / scale)
