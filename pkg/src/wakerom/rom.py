"""Reduced-order drag models driven by the lift coefficient.

Three drag models are available, each a closed-form function of the
instantaneous lift ``cl`` and its rate ``cl_dot``:

* two-term: mean drag plus a single ``cl * cl_dot`` coupling,
* three-term: quadratic couplings ``cl**2`` and ``cl * cl_dot`` whose
  weights reproduce the phase of the 2*Omega drag component,
* five-term: adds linear couplings in ``cl`` and ``cl_dot`` that reproduce
  the drag component at the fundamental frequency Omega.

All model parameters follow from a :class:`WakeSpectrum` (see :func:`fit`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import MismatchedSampling, MissingFundamental, NotPeriodic, SingularFit
from .signals import TimeSeries, central_difference, period_fold, periodicity_deviation
from .spectral import FUNDAMENTAL_FLOOR, WakeSpectrum, decompose, extract_component

LIFT_MODEL_ORDER = 3
UNIT_NORM_TOL = 1e-9
PERIODICITY_TOL = 0.05


class LinearScale(enum.Enum):
    """Amplitude that scales the two linear terms of the five-term model.

    ``FUNDAMENTAL_DRAG`` uses a1D, which makes the modeled drag carry its
    fundamental component at the identified size. ``SECOND_DRAG`` uses a2D
    for both linear terms, i.e. the five-term formula taken literally.
    """

    FUNDAMENTAL_DRAG = "a1d"
    SECOND_DRAG = "a2d"


class DragModel(enum.Enum):
    TWO = "two"
    THREE = "three"
    FIVE = "five"


@dataclass(frozen=True)
class RomParameters:
    omega: float
    cd_mean: float
    cl_sq_mean: float
    a1L: float
    a1D: float
    a2D: float
    lambda1: float
    lambda2: float
    q1: float
    q2: float
    linear_scale: LinearScale = LinearScale.FUNDAMENTAL_DRAG

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.a1L > 0:
            raise MissingFundamental("a1L must be positive")
        if self.a1D < 0 or self.a2D < 0 or self.cl_sq_mean < 0:
            raise ValueError("a1D, a2D and cl_sq_mean must be non-negative")
        for name, (c, s) in {"lambda": (self.lambda1, self.lambda2), "q": (self.q1, self.q2)}.items():
            if abs(c * c + s * s - 1.0) > UNIT_NORM_TOL:
                raise ValueError(f"({name}1, {name}2) must lie on the unit circle")
        if not isinstance(self.linear_scale, LinearScale):
            object.__setattr__(self, "linear_scale", LinearScale(self.linear_scale))

    @classmethod
    def from_phases(
        cls,
        omega,
        cd_mean,
        a1L,
        a1D,
        a2D,
        psi1_deg,
        psi2_deg,
        cl_sq_mean=None,
        linear_scale=LinearScale.FUNDAMENTAL_DRAG,
    ) -> "RomParameters":
        """Parameters from amplitudes and drag phases relative to the lift fundamental.

        ``cl_sq_mean`` defaults to that of a pure harmonic lift, a1L**2 / 2.
        """
        p1, p2 = math.radians(psi1_deg), math.radians(psi2_deg)
        return cls(
            omega=omega,
            cd_mean=cd_mean,
            cl_sq_mean=a1L**2 / 2 if cl_sq_mean is None else cl_sq_mean,
            a1L=a1L,
            a1D=a1D,
            a2D=a2D,
            lambda1=math.cos(p1),
            lambda2=math.sin(p1),
            q1=math.cos(p2),
            q2=math.sin(p2),
            linear_scale=linear_scale,
        )

    @property
    def psi1_deg(self) -> float:
        return math.degrees(math.atan2(self.lambda2, self.lambda1)) % 360.0

    @property
    def psi2_deg(self) -> float:
        return math.degrees(math.atan2(self.q2, self.q1)) % 360.0

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "cd_mean": self.cd_mean,
            "cl_sq_mean": self.cl_sq_mean,
            "a1L": self.a1L,
            "a1D": self.a1D,
            "a2D": self.a2D,
            "psi_a1D_deg": self.psi1_deg,
            "psi_a2D_deg": self.psi2_deg,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "q1": self.q1,
            "q2": self.q2,
            "linear_scale": self.linear_scale.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RomParameters":
        """Inverse of :meth:`to_dict`; the stored phases take precedence over
        the cosine/sine pairs so hand-edited files stay consistent."""
        scale = LinearScale(d.get("linear_scale", "a1d"))
        if "psi_a1D_deg" in d and "psi_a2D_deg" in d:
            return cls.from_phases(
                d["omega"], d["cd_mean"], d["a1L"], d["a1D"], d["a2D"],
                d["psi_a1D_deg"], d["psi_a2D_deg"], d.get("cl_sq_mean"), scale,
            )
        return cls(
            omega=d["omega"], cd_mean=d["cd_mean"], cl_sq_mean=d["cl_sq_mean"],
            a1L=d["a1L"], a1D=d["a1D"], a2D=d["a2D"],
            lambda1=d["lambda1"], lambda2=d["lambda2"], q1=d["q1"], q2=d["q2"],
            linear_scale=scale,
        )


@dataclass(frozen=True)
class FitReport:
    rmse: float
    normalized_rmse: float
    max_abs_error: float

    def to_dict(self) -> dict:
        return {"rmse": self.rmse, "normalized_rmse": self.normalized_rmse, "max_abs_error": self.max_abs_error}


@dataclass(frozen=True)
class LoopClassification:
    loops_per_period: int
    ratio_a1D_a2D: float
    projection_points: np.ndarray
    periodicity_deviation: float = 0.0

    def to_dict(self) -> dict:
        ratio = self.ratio_a1D_a2D
        return {
            "loops_per_period": self.loops_per_period,
            "ratio_a1D_a2D": ratio if math.isfinite(ratio) else None,
            "periodicity_deviation": self.periodicity_deviation,
            "n_points": int(len(self.projection_points)),
        }


def lift_cl_sq_mean(spectrum: WakeSpectrum, max_order: int = LIFT_MODEL_ORDER) -> float:
    """Mean square of the truncated harmonic lift model."""
    return sum(c.amplitude**2 / 2 for c in spectrum.lift_components if c.order <= max_order)


class FitMethod(enum.Enum):
    """How :func:`fit` turns a spectrum into model weights.

    ``CLOSED_FORM`` reads the weights straight off the drag components:
    (lambda1, lambda2) and (q1, q2) are the cosine and sine of their phases
    and a1D, a2D their amplitudes. That inverts the five-term model exactly
    only for a pure-harmonic lift; lift harmonics feed the drag fundamental
    and second harmonic through the quadratic and linear terms.

    ``HARMONIC_BALANCE`` (default) solves for the four weights that make the
    model, driven by the harmonic lift model of the spectrum, reproduce the
    measured order-1 and order-2 drag components. It coincides with
    ``CLOSED_FORM`` for a pure-harmonic lift.
    """

    CLOSED_FORM = "closed"
    HARMONIC_BALANCE = "balance"


BALANCE_SAMPLES = 64
BALANCE_MAX_COND = 1e10
BALANCE_ZERO_RTOL = 1e-9


def _unit(x: float, y: float, fallback_rad: float) -> tuple[float, float, float]:
    """(norm, cos, sin) of the vector (x, y); falls back to a given angle at zero."""
    norm = math.hypot(x, y)
    if norm == 0.0:
        return 0.0, math.cos(fallback_rad), math.sin(fallback_rad)
    return norm, x / norm, y / norm


def _balance_weights(spectrum: WakeSpectrum, cl_sq_mean: float) -> np.ndarray:
    """Weights (A, B, C, E) of cl, cl_dot, cl**2 - m and cl*cl_dot matching drag orders 1 and 2."""
    period = 2 * math.pi / spectrum.omega
    t = period * np.arange(BALANCE_SAMPLES) / BALANCE_SAMPLES
    cl, cl_dot = lift_model_eval(spectrum, t)
    basis = np.stack([cl, cl_dot, cl * cl - cl_sq_mean, cl * cl_dot])
    coef = 2.0 * np.fft.fft(basis, axis=1)[:, 1:3] / BALANCE_SAMPLES
    matrix = np.vstack([coef.real.T, coef.imag.T])
    target = []
    for part in (np.real, np.imag):
        for k in (1, 2):
            c = spectrum.drag(k)
            target.append(part(c.amplitude * np.exp(1j * c.phase_rad)))
    if np.linalg.cond(matrix) > BALANCE_MAX_COND:
        raise SingularFit("lift harmonics leave the drag weights undetermined")
    return np.linalg.solve(matrix, np.array(target))


def fit(
    spectrum: WakeSpectrum,
    cl_sq_mean: float | None = None,
    linear_scale: LinearScale = LinearScale.FUNDAMENTAL_DRAG,
    method: FitMethod | str = FitMethod.HARMONIC_BALANCE,
) -> RomParameters:
    """Model parameters from a decomposed lift/drag pair.

    The linear-term weights (lambda1, lambda2) are the cosine and sine of the
    drag fundamental's phase relative to the lift fundamental, and (q1, q2)
    those of the second drag harmonic; see :class:`FitMethod` for how lift
    harmonics are accounted for. Pass ``cl_sq_mean`` measured from a raw lift
    record when the models will be driven by that record; otherwise it is
    taken from the harmonic lift model.
    """
    first = spectrum.lift(1)
    if first.amplitude < FUNDAMENTAL_FLOOR:
        raise MissingFundamental(
            f"lift fundamental amplitude {first.amplitude:.3g} is below {FUNDAMENTAL_FLOOR:g}"
        )
    a1L, omega = first.amplitude, spectrum.omega
    m = lift_cl_sq_mean(spectrum) if cl_sq_mean is None else float(cl_sq_mean)
    d1, d2 = spectrum.drag(1), spectrum.drag(2)
    if FitMethod(method) is FitMethod.CLOSED_FORM:
        a1D, l1, l2 = d1.amplitude, math.cos(d1.phase_rad), math.sin(d1.phase_rad)
        a2D, q1, q2 = d2.amplitude, math.cos(d2.phase_rad), math.sin(d2.phase_rad)
    else:
        A, B, C, E = (float(w) for w in _balance_weights(spectrum, m))
        linear = (A * a1L, B * omega * a1L)
        quadratic = (C * a1L**2 / 2, E * omega * a1L**2 / 2)
        # round-off leaves a tiny pair pointing anywhere; an absent term keeps the measured phase
        floor = BALANCE_ZERO_RTOL * max(math.hypot(*linear), math.hypot(*quadratic), d1.amplitude, d2.amplitude)
        if math.hypot(*linear) <= floor:
            linear = (0.0, 0.0)
        if math.hypot(*quadratic) <= floor:
            quadratic = (0.0, 0.0)
        a1D, l1, l2 = _unit(*linear, d1.phase_rad)
        a2D, q1, q2 = _unit(*quadratic, d2.phase_rad)
    return RomParameters(
        omega=omega,
        cd_mean=spectrum.drag_mean,
        cl_sq_mean=m,
        a1L=a1L,
        a1D=a1D,
        a2D=a2D,
        lambda1=l1,
        lambda2=l2,
        q1=q1,
        q2=q2,
        linear_scale=LinearScale(linear_scale),
    )


def lift_model_eval(spectrum: WakeSpectrum, t, max_order: int = LIFT_MODEL_ORDER):
    """Harmonic lift model (orders 1..3 by default) and its exact time derivative.

    ``t`` may be a scalar or an array; it is measured from the time origin at
    which the lift fundamental has zero phase.
    """
    t = np.asarray(t, dtype=float)
    omega = spectrum.omega
    cl = np.zeros_like(t)
    cl_dot = np.zeros_like(t)
    for c in spectrum.lift_components:
        if c.order > max_order or c.amplitude == 0.0:
            continue
        arg = c.order * omega * t + c.phase_rad
        cl = cl + c.amplitude * np.cos(arg)
        cl_dot = cl_dot - c.order * omega * c.amplitude * np.sin(arg)
    if cl.ndim == 0:
        return float(cl), float(cl_dot)
    return cl, cl_dot


def _quadratic_terms(p: RomParameters, cl, cl_dot):
    k = 2.0 * p.a2D / p.a1L**2
    return k * p.q1 * (cl * cl - p.cl_sq_mean) + k * p.q2 / p.omega * cl * cl_dot


def drag_two_term(p: RomParameters, cl, cl_dot):
    return p.cd_mean - 2.0 * p.a2D / (p.omega * p.a1L**2) * cl * cl_dot


def drag_three_term(p: RomParameters, cl, cl_dot):
    return p.cd_mean + _quadratic_terms(p, cl, cl_dot)


def drag_five_term(p: RomParameters, cl, cl_dot):
    s = p.a1D if p.linear_scale is LinearScale.FUNDAMENTAL_DRAG else p.a2D
    linear = p.lambda1 * s / p.a1L * cl + p.lambda2 * s / (p.omega * p.a1L) * cl_dot
    return p.cd_mean + linear + _quadratic_terms(p, cl, cl_dot)


DRAG_MODELS = {
    DragModel.TWO: drag_two_term,
    DragModel.THREE: drag_three_term,
    DragModel.FIVE: drag_five_term,
}


def drag_model(model: DragModel | str):
    return DRAG_MODELS[DragModel(model)]


def synthesize(
    p: RomParameters,
    lift_spectrum: WakeSpectrum | None,
    dt: float,
    duration: float,
    model: DragModel | str = DragModel.FIVE,
) -> tuple[TimeSeries, TimeSeries]:
    """Reference lift and drag signals on a uniform grid starting at t = 0.

    Lift comes from the harmonic lift model of ``lift_spectrum`` (a pure
    harmonic of amplitude ``p.a1L`` when omitted), drag from the chosen drag
    model fed with the exact lift derivative.
    """
    if lift_spectrum is None:
        lift_spectrum = WakeSpectrum.pure_lift(p.omega, p.a1L)
    if not math.isclose(lift_spectrum.omega, p.omega, rel_tol=1e-12):
        raise ValueError("lift spectrum and parameters disagree on omega")
    if not math.isclose(lift_spectrum.a1L, p.a1L, rel_tol=1e-12):
        raise ValueError("lift spectrum and parameters disagree on a1L")
    period = 2 * math.pi / p.omega
    if duration < 4 * period * (1 - 1e-9):
        raise ValueError("synthesis needs at least 4 periods")
    n = int(round(duration / dt)) + 1
    t = dt * np.arange(n)
    cl, cl_dot = lift_model_eval(lift_spectrum, t)
    cd = drag_model(model)(p, cl, cl_dot)
    return TimeSeries(0.0, dt, cl), TimeSeries(0.0, dt, cd)


def reconstruct_drag(
    p: RomParameters,
    lift: TimeSeries,
    model: DragModel | str = DragModel.FIVE,
    lift_spectrum: WakeSpectrum | None = None,
    lift_rate: TimeSeries | None = None,
) -> TimeSeries:
    """Modeled drag on the grid of ``lift``.

    With ``lift_spectrum`` the lift and its rate come from the harmonic lift
    model, phase-aligned to the measured record; otherwise the measured lift
    is used directly with ``lift_rate`` (central differences if omitted).
    """
    if lift_spectrum is not None:
        _, phi1 = extract_component(lift, lift_spectrum.omega, 1)
        tau = lift.times - lift.t0 + math.radians(phi1) / lift_spectrum.omega
        cl, cl_dot = lift_model_eval(lift_spectrum, tau)
    else:
        cl = lift.values
        cl_dot = (lift_rate if lift_rate is not None else central_difference(lift)).values
    return lift.with_values(drag_model(model)(p, cl, cl_dot))


def fit_error(reconstructed: TimeSeries, reference: TimeSeries) -> FitReport:
    if not reconstructed.same_grid(reference):
        raise MismatchedSampling("reconstructed and reference series are on different grids")
    err = reconstructed.values - reference.values
    rmse = float(np.sqrt(np.mean(err**2)))
    ref = reference.values - reference.values.mean()
    ref_rms = float(np.sqrt(np.mean(ref**2)))
    if ref_rms > 0:
        normalized = rmse / ref_rms
    else:
        normalized = 0.0 if rmse == 0 else math.inf
    return FitReport(rmse=rmse, normalized_rmse=normalized, max_abs_error=float(np.max(np.abs(err))))


def count_cyclic_maxima(wave) -> int:
    wave = np.asarray(wave, dtype=float)
    prev, nxt = np.roll(wave, 1), np.roll(wave, -1)
    return int(np.count_nonzero((wave > prev) & (wave > nxt)))


def count_self_crossings(points) -> int:
    """Proper self-intersections of the closed polyline through ``points``."""
    p = np.asarray(points, dtype=float)
    d = np.roll(p, -1, axis=0) - p
    n = len(p)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))  # first and last segments share a vertex
    i, j = i[keep], j[keep]
    r, s = d[i], d[j]
    qp = p[j] - p[i]
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    # near-parallel pairs come from a curve retracing itself, not a crossing
    ok = np.abs(denom) > 1e-9 * np.hypot(*r.T) * np.hypot(*s.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / denom
        u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / denom
    hit = ok & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)
    return int(np.count_nonzero(hit))


def _branch_crossings(lift_wave, drag_wave, rtol=1e-6):
    """Crossings between the falling-lift and rising-lift halves of the cycle.

    Returns ``None`` when lift is not monotone on each half, and ``-1`` when
    both halves coincide (the curve retraces itself).
    """
    n = lift_wave.size
    i_max, i_min = int(np.argmax(lift_wave)), int(np.argmin(lift_wave))
    falling = np.arange(i_max, i_max + ((i_min - i_max) % n) + 1) % n
    rising = np.arange(i_min, i_min + ((i_max - i_min) % n) + 1) % n
    fl, fd = lift_wave[falling][::-1], drag_wave[falling][::-1]
    rl, rd = lift_wave[rising], drag_wave[rising]
    if np.any(np.diff(fl) <= 0) or np.any(np.diff(rl) <= 0):
        return None
    lo, hi = lift_wave[i_min], lift_wave[i_max]
    c = np.linspace(lo, hi, 2 * n + 1)[1:-1]
    gap = np.interp(c, fl, fd) - np.interp(c, rl, rd)
    tol = rtol * max(float(np.ptp(drag_wave)), np.finfo(float).tiny)
    signs = np.sign(gap[np.abs(gap) > tol])
    if signs.size == 0:
        return -1
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def limit_cycle_projection(
    lift: TimeSeries,
    drag: TimeSeries,
    omega: float,
    samples_per_period: int = 512,
) -> LoopClassification:
    """Classify the lift-drag limit cycle by counting its loops.

    One period of the period-averaged (C_L, C_D) curve is traced and its
    self-crossings counted; ``k`` crossings make ``k + 1`` loops, so the
    figure-eight of a two-to-one wake gives 2 and a collapsed lower loop
    gives 1. Crossings are found as sign changes of the drag gap between the
    falling-lift and rising-lift halves of the cycle (polyline intersection
    if lift is not monotone on each half). A curve that retraces itself,
    e.g. cos(2*Omega*t) drag against cos(Omega*t) lift, has no proper
    crossings; its loops are then read from the drag maxima per period.
    """
    if not lift.same_grid(drag):
        raise MismatchedSampling("lift and drag must share t0, dt and length")
    deviation = periodicity_deviation(drag, omega, samples_per_period)
    if deviation > PERIODICITY_TOL:
        raise NotPeriodic(
            f"drag period-to-period RMS deviation is {deviation:.1%} of its RMS (limit {PERIODICITY_TOL:.0%})"
        )
    _, drag_fold = period_fold(drag, omega, samples_per_period)
    _, lift_fold = period_fold(lift, omega, samples_per_period)
    drag_wave = drag_fold.mean(axis=0)
    lift_wave = lift_fold.mean(axis=0)
    points = np.column_stack([lift_wave, drag_wave])

    crossings = _branch_crossings(lift_wave, drag_wave)
    if crossings is None:
        crossings = count_self_crossings(points)
    if crossings < 0:
        loops = max(count_cyclic_maxima(drag_wave), 1)
    else:
        loops = crossings + 1

    spec = decompose(lift, drag, omega=omega, max_order=2)
    a1D, a2D = spec.drag(1).amplitude, spec.drag(2).amplitude
    ratio = a1D / a2D if a2D > 0 else (0.0 if a1D == 0 else math.inf)
    return LoopClassification(loops, ratio, points, deviation)


def with_scale(p: RomParameters, scale: LinearScale | str) -> RomParameters:
    return replace(p, linear_scale=LinearScale(scale))
