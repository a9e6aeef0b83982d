"""Power spectra, fundamental-frequency detection and harmonic extraction.

Phases of harmonic components are reported relative to the lift
fundamental: an order-k component with raw phase ``phi`` gets the relative
phase ``phi - k * phi_1L`` (mod 360 deg). Scaling by ``k`` is what makes the
relative phase independent of where the time origin sits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MismatchedSampling,
    MissingFundamental,
    NoDominantPeak,
    SpanTooShort,
    TooFewSamples,
)
from .signals import TimeSeries, time_average, trapezoid_weights, trim_to_integer_periods

DEFAULT_MAX_ORDER = 4
DOMINANCE_RATIO = 10.0
FUNDAMENTAL_FLOOR = 1e-8
# amplitudes below this fraction of the signal RMS are reported as exactly zero
ZERO_AMPLITUDE_RTOL = 1e-12


def wrap_degrees(angle: float) -> float:
    """Map an angle onto [0, 360)."""
    wrapped = float(np.mod(angle, 360.0))
    if wrapped >= 360.0:
        wrapped = 0.0
    return wrapped


@dataclass(frozen=True)
class HarmonicComponent:
    """Amplitude and phase of the component at ``order`` times the fundamental."""

    order: int
    amplitude: float
    phase_deg: float = 0.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"harmonic order must be a positive integer, got {self.order!r}")
        if not (self.amplitude >= 0 and math.isfinite(self.amplitude)):
            raise ValueError(f"amplitude must be finite and non-negative, got {self.amplitude!r}")
        phase = 0.0 if self.amplitude == 0 else wrap_degrees(self.phase_deg)
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "phase_deg", phase)

    @property
    def phase_rad(self) -> float:
        return math.radians(self.phase_deg)

    def to_dict(self) -> dict:
        return {"order": self.order, "amplitude": self.amplitude, "phase_deg": self.phase_deg}

    @classmethod
    def from_dict(cls, d: dict) -> "HarmonicComponent":
        return cls(int(d["order"]), float(d["amplitude"]), float(d.get("phase_deg", 0.0)))


def _check_components(components, name):
    orders = [c.order for c in components]
    if orders != sorted(set(orders)):
        raise ValueError(f"{name} component orders must be unique and ascending: {orders}")


@dataclass(frozen=True)
class WakeSpectrum:
    """Fundamental angular frequency plus lift and drag harmonic content."""

    omega: float
    lift_components: tuple[HarmonicComponent, ...]
    drag_mean: float = 0.0
    drag_components: tuple[HarmonicComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        lift = tuple(self.lift_components)
        drag = tuple(self.drag_components)
        _check_components(lift, "lift")
        _check_components(drag, "drag")
        first = next((c for c in lift if c.order == 1), None)
        if first is None or first.amplitude <= 0:
            raise MissingFundamental("lift spectrum has no order-1 component")
        if first.phase_deg != 0.0:
            raise ValueError("lift fundamental must carry phase 0 (phases are relative to it)")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "drag_mean", float(self.drag_mean))
        object.__setattr__(self, "lift_components", lift)
        object.__setattr__(self, "drag_components", drag)

    def lift(self, order: int) -> HarmonicComponent:
        return _lookup(self.lift_components, order)

    def drag(self, order: int) -> HarmonicComponent:
        return _lookup(self.drag_components, order)

    @property
    def a1L(self) -> float:
        return self.lift(1).amplitude

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "frequency": self.omega / (2 * math.pi),
            "lift": [c.to_dict() for c in self.lift_components],
            "drag_mean": self.drag_mean,
            "drag": [c.to_dict() for c in self.drag_components],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WakeSpectrum":
        return cls(
            omega=float(d["omega"]),
            lift_components=tuple(HarmonicComponent.from_dict(c) for c in d["lift"]),
            drag_mean=float(d.get("drag_mean", 0.0)),
            drag_components=tuple(HarmonicComponent.from_dict(c) for c in d.get("drag", ())),
        )

    @classmethod
    def pure_lift(cls, omega: float, a1L: float) -> "WakeSpectrum":
        return cls(omega, (HarmonicComponent(1, a1L, 0.0),))


def _lookup(components, order):
    for c in components:
        if c.order == order:
            return c
    return HarmonicComponent(order, 0.0, 0.0)


def periodogram(ts: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    """One-sided power spectrum of the demeaned signal.

    Frequencies are ``k / (N dt)`` for ``k = 0..N//2``. Powers are scaled so
    they sum to the mean square of the demeaned samples.
    """
    n = len(ts)
    if n < 8:
        raise TooFewSamples("periodogram needs at least 8 samples")
    x = ts.values - ts.values.mean()
    spec = np.fft.rfft(x)
    power = np.abs(spec) ** 2 / n**2
    if n % 2 == 0:
        power[1:-1] *= 2.0
    else:
        power[1:] *= 2.0
    freqs = np.fft.rfftfreq(n, ts.dt)
    return freqs, power


def _golden_max(fun, lo, hi, rtol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = fun(c), fun(d)
    while (hi - lo) > rtol * abs(0.5 * (hi + lo)):
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = fun(d)
    return 0.5 * (lo + hi)


def estimate_fundamental(ts: TimeSeries) -> float:
    """Angular frequency of the dominant oscillation in ``ts``.

    Peak bin of the periodogram, refined by a three-point parabola through the
    neighbouring bins and then by golden-section maximization of the
    single-frequency projection magnitude within one bin either side.
    """
    freqs, power = periodogram(ts)
    body = power[1:]
    k = int(np.argmax(body)) + 1
    peak = power[k]
    if peak <= 0.0 or peak < DOMINANCE_RATIO * float(np.median(body)):
        raise NoDominantPeak(
            f"peak power {peak:.3g} is not {DOMINANCE_RATIO:g}x the median spectral power"
        )
    df = freqs[1]
    offset = 0.0
    if 1 < k < power.size - 1:
        a, b, c = power[k - 1], power[k], power[k + 1]
        denom = a - 2.0 * b + c
        if denom != 0.0:
            offset = float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))
    f_guess = (k + offset) * df

    x = ts.values - ts.values.mean()
    tau = ts.dt * np.arange(len(ts))

    def magnitude(f):
        return abs(np.dot(x, np.exp(-2j * math.pi * f * tau)))

    lo = max(f_guess - df, 0.25 * df)
    hi = f_guess + df
    f_best = _golden_max(magnitude, lo, hi, 1e-6)
    return refine_fundamental(ts, 2.0 * math.pi * f_best)


def refine_fundamental(ts: TimeSeries, omega: float, orders: int = DEFAULT_MAX_ORDER) -> float:
    """Polish ``omega`` by least-squares fitting a harmonic series.

    The single-bin magnitude peak is biased by the mirror-image frequency and
    by the record not spanning whole periods (relative error around 1e-4 for
    twenty periods). Here the energy captured by a least-squares fit of a
    constant plus harmonics ``1..orders`` is maximized over half a bin either
    side; for a signal made of those harmonics the optimum is exact.
    """
    n = len(ts)
    tau = ts.dt * (np.arange(n) - 0.5 * (n - 1))
    x = ts.values
    k = np.arange(1, orders + 1)

    def captured(w):
        arg = np.outer(tau, w * k)
        basis = np.hstack([np.ones((n, 1)), np.cos(arg), np.sin(arg)])
        coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
        return -float(np.sum((x - basis @ coef) ** 2))

    half_bin = math.pi / (n * ts.dt)
    lo = max(omega - half_bin, 0.5 * omega)
    return _golden_max(captured, lo, omega + half_bin, 1e-11)


def _project(values, omega_k, dt):
    n = values.size
    w = trapezoid_weights(n)
    x = values - np.dot(w, values)
    phase = omega_k * dt * np.arange(n)
    cos, sin = np.cos(phase), np.sin(phase)
    gram = np.array(
        [[np.dot(w, cos * cos), np.dot(w, cos * sin)], [np.dot(w, cos * sin), np.dot(w, sin * sin)]]
    )
    rhs = np.array([np.dot(w, cos * x), np.dot(w, sin * x)])
    c, s = np.linalg.solve(gram, rhs)
    return c, s


def extract_component(ts: TimeSeries, omega: float, k: int) -> tuple[float, float]:
    """Amplitude and raw phase (degrees) of the order-``k`` harmonic.

    The fit is ``a * cos(k * omega * (t - ts.t0) + phi)``, a weighted least
    squares projection of the demeaned signal. ``ts`` should already span a
    whole number of fundamental periods.
    """
    if k < 1:
        raise ValueError("harmonic order must be >= 1")
    period = 2.0 * math.pi / omega
    if ts.duration < period - 0.5 * ts.dt:
        raise SpanTooShort("extraction window is shorter than one fundamental period")
    c, s = _project(ts.values, k * omega, ts.dt)
    amplitude = math.hypot(c, s)
    phase = wrap_degrees(math.degrees(math.atan2(-s, c)))
    return amplitude, phase


def _relative_components(window, omega, max_order, phi1):
    scale = math.sqrt(time_average((window.values - time_average(window.values)) ** 2))
    out = []
    for k in range(1, max_order + 1):
        amplitude, raw = extract_component(window, omega, k)
        if amplitude <= ZERO_AMPLITUDE_RTOL * scale:
            out.append(HarmonicComponent(k, 0.0, 0.0))
        else:
            out.append(HarmonicComponent(k, amplitude, raw - k * phi1))
    return tuple(out)


def decompose(
    lift: TimeSeries,
    drag: TimeSeries,
    omega: float | None = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> WakeSpectrum:
    """Harmonic content of a lift/drag pair, phases relative to the lift fundamental."""
    if not lift.same_grid(drag):
        raise MismatchedSampling("lift and drag must share t0, dt and length")
    if max_order < 2:
        raise ValueError("max_order must be at least 2 (drag models use orders 1 and 2)")
    if omega is None:
        omega = estimate_fundamental(lift)
    lift_w = trim_to_integer_periods(lift, omega)
    drag_w = trim_to_integer_periods(drag, omega)

    a1, phi1 = extract_component(lift_w, omega, 1)
    if a1 < FUNDAMENTAL_FLOOR:
        raise MissingFundamental(f"lift fundamental amplitude {a1:.3g} is below {FUNDAMENTAL_FLOOR:g}")
    lift_parts = _relative_components(lift_w, omega, max_order, phi1)
    lift_parts = (HarmonicComponent(1, a1, 0.0),) + lift_parts[1:]
    drag_parts = _relative_components(drag_w, omega, max_order, phi1)
    return WakeSpectrum(
        omega=omega,
        lift_components=lift_parts,
        drag_mean=time_average(drag_w.values),
        drag_components=drag_parts,
    )
