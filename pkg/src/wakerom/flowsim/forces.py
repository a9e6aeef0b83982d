"""Surface pressure and friction, and their integration into lift and drag."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSurface
from .grid import FlowConfig


@dataclass(frozen=True, eq=False)
class SurfaceDistribution:
    """Pressure and friction coefficients at the wall nodes.

    Both are normalized by the dynamic pressure. ``pressure_residual`` is
    the mismatch in C_P after one trip around the cylinder, before it was
    spread out to close the distribution.
    """

    theta: np.ndarray
    cp: np.ndarray
    cf: np.ndarray
    pressure_residual: float = 0.0


def _wall_normal_derivative(field, h):
    return (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * h)


def stagnation_pressure(state, config: FlowConfig) -> float:
    """C_P at the front stagnation point.

    Integrates the radial momentum balance for the total head
    ``P = p + |u|**2 / 2`` along the upstream axis, from the far field
    (gauge pressure zero) to the wall where the velocity vanishes.
    """
    g = config.grid
    i = g.upstream
    psi, w = state.streamfunction, state.vorticity
    r = g.r
    u_r = (psi[:, i + 1] - psi[:, i - 1]) / (2 * g.dtheta) / r
    u_t = -np.gradient(psi[:, i], g.h, edge_order=2) / r
    dw_dth = (w[:, i + 1] - w[:, i - 1]) / (2 * g.dtheta)
    dP_dr = u_t * w[:, i] - dw_dth / (config.reynolds * r)
    prev = state.streamfunction_prev
    if prev is not None and state.last_dt:
        u_r_prev = (prev[:, i + 1] - prev[:, i - 1]) / (2 * g.dtheta) / r
        dP_dr = dP_dr - (u_r - u_r_prev) / state.last_dt
    integrand = dP_dr * r  # d/dxi = r d/dr
    head_far = 0.5 * (u_r[-1] ** 2 + u_t[-1] ** 2)
    head_wall = head_far - float(np.sum(0.5 * (integrand[1:] + integrand[:-1])) * g.h)
    return 2.0 * head_wall


def surface_coefficients(state, config: FlowConfig) -> SurfaceDistribution:
    """C_P and C_f around the cylinder for one flow state.

    Friction comes straight from the wall vorticity, ``C_f = 2 w / Re``. The
    pressure follows from the tangential momentum balance at a no-slip wall,
    ``dC_P/dtheta = (2 / Re) * r * dw/dr``, integrated around the surface
    from the front stagnation point and anchored there by
    :func:`stagnation_pressure`.
    """
    g = config.grid
    w = state.vorticity
    re = config.reynolds
    cf = 2.0 * w[0] / re
    dcp = 2.0 * _wall_normal_derivative(w, g.h) / re  # r dw/dr = dw/dxi

    n = g.ntheta
    start = g.upstream
    order = (start + np.arange(n + 1)) % n
    slope = dcp[order]
    running = np.concatenate([[0.0], np.cumsum(0.5 * (slope[1:] + slope[:-1]) * g.dtheta)])
    residual = float(running[-1])
    running -= residual * np.arange(n + 1) / n

    cp = np.empty(n)
    cp[order[:-1]] = running[:-1]
    cp += stagnation_pressure(state, config)
    return SurfaceDistribution(theta=g.theta.copy(), cp=cp, cf=cf.copy(), pressure_residual=residual)


def integrate_forces(surf: SurfaceDistribution, diameter: float = 1.0) -> tuple[float, float]:
    """Lift and drag coefficients of a closed circular surface.

    The circle is replaced by straight segments between adjacent nodes
    (counter-clockwise, increasing theta). Each segment carries the average
    of its two end values, multiplied by its projections dx and dy:

        C_L = sum(C_P dx + C_f dy),  C_D = sum(-C_P dy + C_f dx)

    Coefficients are per unit diameter; ``diameter`` scales the contour.
    """
    theta = np.asarray(surf.theta, dtype=float)
    cp = np.asarray(surf.cp, dtype=float)
    cf = np.asarray(surf.cf, dtype=float)
    if theta.size < 8 or cp.shape != theta.shape or cf.shape != theta.shape:
        raise DegenerateSurface("need at least 8 surface nodes with matching C_P and C_f")
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * math.pi]]))
    if np.any(gaps <= 0):
        raise DegenerateSurface("surface angles must increase strictly around one turn")
    radius = 0.5 * diameter
    x, y = radius * np.cos(theta), radius * np.sin(theta)
    dx, dy = np.roll(x, -1) - x, np.roll(y, -1) - y
    cp_mid = 0.5 * (cp + np.roll(cp, -1))
    cf_mid = 0.5 * (cf + np.roll(cf, -1))
    cl = float(np.sum(cp_mid * dx + cf_mid * dy)) / diameter
    cd = float(np.sum(-cp_mid * dy + cf_mid * dx)) / diameter
    return cl, cd

