"""Vorticity-streamfunction time stepping around a fixed cylinder.

Transport, in the stretched coordinates of :class:`PolarGrid`::

    dw/dt = (-(psi_theta * w_xi - psi_xi * w_theta) + (w_xixi + w_thetatheta) / Re) / r**2

Second-order central differences in space, Adams-Bashforth 2 in time
(forward Euler on the first step), then a direct Poisson solve for the
streamfunction and a wall-vorticity update from the no-slip condition.

The wall streamfunction is a single constant. Each step it is chosen so the
net vorticity flux out of the wall vanishes, which is exactly the condition
for the surface pressure to come back to its starting value after one turn
around the cylinder. Holding it at zero instead lets spurious circulation
build up and visibly weakens the computed lift.

The outer half of the domain carries a sponge term ``-sigma(r) * w`` (see
:attr:`PolarGrid.sponge`) so shed vortices decay before they reach the
free-stream boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import Diverged, NoDominantPeak, NotPeriodic
from ..signals import TimeSeries, periodicity_deviation
from ..spectral import estimate_fundamental
from .forces import integrate_forces, surface_coefficients
from .grid import WALL_RADIUS, FlowConfig, PolarGrid
from .poisson import PoissonSolver

BLOWUP = 1e6
PERIODICITY_TOL = 0.05
MIN_RECORD = 16
SHEDDING_FLOOR = 1e-3  # lift RMS below this is a steady wake

_solvers: dict = {}


def _poisson(grid: PolarGrid) -> PoissonSolver:
    key = id(grid)
    if key not in _solvers:
        _solvers[key] = PoissonSolver(grid)
    return _solvers[key]


@dataclass(frozen=True, eq=False)
class FlowState:
    """Fields at one instant, indexed ``[radial, azimuthal]``.

    ``transport_prev`` is the previous transport tendency (Adams-Bashforth
    history) and ``streamfunction_prev`` the previous streamfunction; both
    are ``None`` for a freshly initialized state.
    """

    time: float
    vorticity: np.ndarray
    streamfunction: np.ndarray
    step: int = 0
    transport_prev: np.ndarray | None = None
    streamfunction_prev: np.ndarray | None = None
    last_dt: float = 0.0

    @property
    def wall_streamfunction(self) -> float:
        return float(self.streamfunction[0, 0])


def seed_vorticity(grid: PolarGrid, amplitude: float) -> np.ndarray:
    """Small off-axis vortex blob in the near wake.

    The base flow's vorticity is odd in y; this blob is not, so it breaks
    the mirror symmetry deterministically and lets shedding develop.
    """
    blob = np.exp(-((grid.x - 1.0) ** 2 + (grid.y - 0.25) ** 2) / 0.25)
    w = amplitude * blob
    w[0] = 0.0
    w[-1] = 0.0
    return w


def init(config: FlowConfig) -> FlowState:
    """Impulsively started flow: potential-flow streamfunction, no boundary layer yet."""
    grid = config.grid
    w = seed_vorticity(grid, config.seed_perturbation)
    psi = _poisson(grid).solve(w)
    return FlowState(time=0.0, vorticity=w, streamfunction=psi)


def transport(w: np.ndarray, psi: np.ndarray, grid: PolarGrid, reynolds: float) -> np.ndarray:
    """dw/dt at interior nodes, including the far-field absorbing layer."""
    inner = w[1:-1]
    w_e, w_w = np.roll(inner, -1, axis=1), np.roll(inner, 1, axis=1)
    p_inner = psi[1:-1]
    w_xi = (w[2:] - w[:-2]) / (2 * grid.h)
    w_th = (w_e - w_w) / (2 * grid.dtheta)
    p_xi = (psi[2:] - psi[:-2]) / (2 * grid.h)
    p_th = (np.roll(p_inner, -1, axis=1) - np.roll(p_inner, 1, axis=1)) / (2 * grid.dtheta)
    lap = (w[2:] - 2 * inner + w[:-2]) / grid.h**2 + (w_e - 2 * inner + w_w) / grid.dtheta**2
    return (lap / reynolds - (p_th * w_xi - p_xi * w_th)) / grid.r2[1:-1] - grid.sponge[1:-1] * inner


def _wall_vorticity_terms(grid: PolarGrid, formula: str):
    """Wall vorticity as ``w0 = a * (sum_k c_k psi_k) + b * psi_wall`` pieces.

    Returns (coefficients on rows 1.., coefficient on the wall value).
    """
    scale = 1.0 / (grid.h**2 * WALL_RADIUS**2)
    if formula == "thom":
        return np.array([-2.0]) * scale, 2.0 * scale
    return np.array([-8.0, 1.0]) * (0.5 * scale), 3.5 * scale


def wall_vorticity(psi: np.ndarray, grid: PolarGrid, formula: str) -> np.ndarray:
    rows, wall = _wall_vorticity_terms(grid, formula)
    w0 = wall * psi[0]
    for k, c in enumerate(rows, start=1):
        w0 = w0 + c * psi[k]
    return w0


def _wall_constant(psi_base: np.ndarray, w: np.ndarray, grid: PolarGrid, formula: str) -> float:
    """Wall streamfunction giving zero net wall vorticity flux.

    The flux is the one-sided derivative ``-3 w0 + 4 w1 - w2`` summed around
    the wall; ``w0`` is linear in the wall constant through the wall formula
    and through the harmonic circulation mode added to ``psi_base``.
    """
    target = (4.0 * w[1].sum() - w[2].sum()) / 3.0
    mode = grid.circulation_mode[:, 0]
    rows, wall = _wall_vorticity_terms(grid, formula)
    base = wall * psi_base[0].sum() + sum(c * psi_base[k].sum() for k, c in enumerate(rows, 1))
    per_unit = grid.ntheta * (wall * mode[0] + sum(c * mode[k] for k, c in enumerate(rows, 1)))
    return (target - base) / per_unit


def advance(state: FlowState, config: FlowConfig) -> FlowState:
    """One time step of vorticity transport, streamfunction solve and wall update."""
    grid = config.grid
    dt = config.dt
    w, psi = state.vorticity, state.streamfunction
    tendency = transport(w, psi, grid, config.reynolds)

    w_new = np.empty_like(w)
    if state.transport_prev is None:
        w_new[1:-1] = w[1:-1] + dt * tendency
    else:
        w_new[1:-1] = w[1:-1] + dt * (1.5 * tendency - 0.5 * state.transport_prev)
    w_new[-1] = 0.0
    w_new[0] = 0.0

    psi_new = _poisson(grid).solve(w_new)
    c = _wall_constant(psi_new, w_new, grid, config.wall_formula)
    psi_new += c * grid.circulation_mode
    w_new[0] = wall_vorticity(psi_new, grid, config.wall_formula)

    peak = float(np.max(np.abs(w_new)))
    if not peak <= BLOWUP:
        raise Diverged(
            f"vorticity reached {peak:.3g} at step {state.step + 1} (t = {state.time + dt:.4g})",
            step=state.step + 1,
            time=state.time + dt,
            field_max=peak,
        )
    return FlowState(
        time=state.time + dt,
        vorticity=w_new,
        streamfunction=psi_new,
        step=state.step + 1,
        transport_prev=tendency,
        streamfunction_prev=psi,
        last_dt=dt,
    )


class FlowRun(NamedTuple):
    lift: TimeSeries
    drag: TimeSeries
    f_s: float
    final_state: FlowState


def simulate_forces(config: FlowConfig, state: FlowState | None = None, progress=None):
    """Step to ``config.t_end``; returns (times, lift, drag, final state).

    Forces are sampled every step once ``time >= record_from``.
    """
    state = init(config) if state is None else state
    n_steps = int(round((config.t_end - state.time) / config.dt))
    times, lift, drag = [], [], []
    for _ in range(n_steps):
        state = advance(state, config)
        if state.time >= config.record_from - 1e-9:
            cl, cd = integrate_forces(surface_coefficients(state, config))
            times.append(state.time)
            lift.append(cl)
            drag.append(cd)
        if progress is not None:
            progress(state)
    return np.array(times), np.array(lift), np.array(drag), state


def run(config: FlowConfig, progress=None) -> FlowRun:
    """Simulate, record forces and report the shedding (Strouhal) frequency.

    Raises :class:`NotPeriodic` when the recorded window is too short or the
    forces have not settled onto a periodic cycle, and
    :class:`NoDominantPeak` when the lift shows no shedding at all, either
    because its fluctuation stays below ``SHEDDING_FLOOR`` or because its
    spectrum has no dominant peak.
    """
    times, cl, cd, final = simulate_forces(config, progress=progress)
    if times.size < MIN_RECORD:
        raise NotPeriodic(
            f"only {times.size} force samples recorded between t = {config.record_from:g} "
            f"and t = {config.t_end:g}"
        )
    lift = TimeSeries(float(times[0]), config.dt, cl)
    drag = TimeSeries(float(times[0]), config.dt, cd)
    fluctuation = float(np.std(cl))
    if fluctuation < SHEDDING_FLOOR:
        raise NoDominantPeak(f"lift RMS {fluctuation:.3g} is below {SHEDDING_FLOOR:g}: the wake does not shed")
    omega = estimate_fundamental(lift)
    period = 2 * math.pi / omega
    if lift.duration < 2 * period:
        raise NotPeriodic("record window holds fewer than two shedding periods")
    for name, series in (("lift", lift), ("drag", drag)):
        deviation = periodicity_deviation(series, omega)
        if deviation > PERIODICITY_TOL:
            raise NotPeriodic(f"{name} deviates {deviation:.1%} period to period (limit {PERIODICITY_TOL:.0%})")
    return FlowRun(lift, drag, omega / (2 * math.pi), final)


