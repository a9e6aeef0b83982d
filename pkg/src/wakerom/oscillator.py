"""Van der Pol lift oscillator.

    cl'' + omega_s**2 * cl - mu * cl' + alpha * cl**2 * cl' = 0

Linear negative damping ``mu`` feeds small oscillations, cubic damping
``alpha`` drains large ones; the two balance on a limit cycle of amplitude
close to ``2 * sqrt(mu / alpha)`` when ``mu / omega_s`` is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NotSettled, ZeroInitialState
from .signals import TimeSeries
from .spectral import estimate_fundamental

STEADY_VARIATION = 0.01


@dataclass(frozen=True)
class VdpConfig:
    omega_s: float = 1.0
    mu: float = 0.05
    alpha: float = 0.05
    cl0: float = 0.1
    cl_dot0: float = 0.0
    dt: float = 0.01
    duration: float = 500.0

    def __post_init__(self):
        for name in ("omega_s", "mu", "alpha", "dt", "duration"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfig(f"{name} must be positive, got {value!r}")
        if self.dt > 0.05 * 2 * math.pi / self.omega_s:
            raise InvalidConfig("dt must not exceed 5% of the linear period 2*pi/omega_s")

    @property
    def predicted_amplitude(self) -> float:
        return 2.0 * math.sqrt(self.mu / self.alpha)


def _rhs(cfg: VdpConfig, x, v):
    return v, -cfg.omega_s**2 * x + (cfg.mu - cfg.alpha * x * x) * v


def vdp_trajectory(cfg: VdpConfig) -> tuple[TimeSeries, TimeSeries]:
    """Lift and lift rate integrated with fixed-step classical RK4."""
    if cfg.cl0 == 0.0 and cfg.cl_dot0 == 0.0:
        raise ZeroInitialState("the origin is an equilibrium; start from a nonzero state")
    steps = int(round(cfg.duration / cfg.dt))
    h = cfg.dt
    x = np.empty(steps + 1)
    v = np.empty(steps + 1)
    x[0], v[0] = cfg.cl0, cfg.cl_dot0
    xi, vi = float(cfg.cl0), float(cfg.cl_dot0)
    for n in range(steps):
        k1x, k1v = _rhs(cfg, xi, vi)
        k2x, k2v = _rhs(cfg, xi + 0.5 * h * k1x, vi + 0.5 * h * k1v)
        k3x, k3v = _rhs(cfg, xi + 0.5 * h * k2x, vi + 0.5 * h * k2v)
        k4x, k4v = _rhs(cfg, xi + h * k3x, vi + h * k3v)
        xi += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        vi += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x[n + 1], v[n + 1] = xi, vi
    return TimeSeries(0.0, h, x), TimeSeries(0.0, h, v)


def vdp_simulate(cfg: VdpConfig) -> TimeSeries:
    return vdp_trajectory(cfg)[0]


def _refined_peaks(y):
    """Extreme values of ``y`` at interior local maxima, parabola-refined."""
    a, b, c = y[:-2], y[1:-1], y[2:]
    idx = np.nonzero((b > a) & (b >= c))[0]
    a, b, c = a[idx], b[idx], c[idx]
    denom = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(denom != 0, 0.5 * (a - c) / denom, 0.0)
    return b - 0.25 * (a - c) * shift


def steady_amplitude(ts: TimeSeries, settle_fraction: float = 0.5) -> tuple[float, float]:
    """Limit-cycle amplitude and cyclic frequency from the settled tail of ``ts``.

    The amplitude is half the distance between the mean maximum and the mean
    minimum, which equals the mean absolute peak for a zero-mean orbit. The
    tail after ``settle_fraction`` of the record must contain at least five
    periods, and its maxima (and minima) must vary by less than 1% of the
    amplitude, otherwise :class:`NotSettled` is raised.
    """
    if not 0 < settle_fraction < 1:
        raise ValueError("settle_fraction must lie in (0, 1)")
    start = int(math.ceil(settle_fraction * (len(ts) - 1)))
    window = ts.tail(len(ts) - start)
    # maxima and minima are taken separately so an offset does not bias them
    highs = _refined_peaks(window.values)
    lows = -_refined_peaks(-window.values)
    if min(highs.size, lows.size) < 5:
        raise NotSettled(f"only {min(highs.size, lows.size)} cycles after settling; need five full periods")
    amplitude = 0.5 * float(highs.mean() - lows.mean())
    spread = max(np.ptp(highs), np.ptp(lows))
    variation = float(spread) / amplitude if amplitude > 0 else math.inf
    if variation >= STEADY_VARIATION:
        raise NotSettled(f"peak values vary by {variation:.2%} across the settled window")
    omega = estimate_fundamental(window)
    return amplitude, float(omega / (2 * math.pi))
