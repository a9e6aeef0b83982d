"""Run configuration and the body-fitted polar grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import InvalidConfig

WALL_RADIUS = 0.5  # unit diameter
SPONGE_START = 0.5  # fraction of the outer radius
SPONGE_RATE = 1.0


@dataclass(frozen=True)
class FlowConfig:
    """Fixed-cylinder run settings; lengths in diameters, times in D/U.

    ``outer_radius`` is the far-field radius measured from the cylinder
    center. ``wall_formula`` picks the wall-vorticity closure, "thom" (two
    point) or "jensen" (three point).
    """

    reynolds: float = 300.0
    nr: int = 128
    ntheta: int = 256
    outer_radius: float = 40.0
    dt: float = 0.005
    t_end: float = 300.0
    record_from: float = 200.0
    seed_perturbation: float = 1e-3
    wall_formula: str = "thom"

    def __post_init__(self):
        if not (self.reynolds > 0 and math.isfinite(self.reynolds)):
            raise InvalidConfig("reynolds must be positive")
        if self.nr < 32 or self.ntheta < 32:
            raise InvalidConfig("nr and ntheta must both be at least 32")
        if self.ntheta % 2:
            raise InvalidConfig("ntheta must be even (the upstream axis must be a grid line)")
        if self.outer_radius < 20:
            raise InvalidConfig("outer_radius must be at least 20 diameters")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidConfig("dt must be positive")
        if not self.t_end > 0 or self.record_from < 0:
            raise InvalidConfig("t_end must be positive and record_from non-negative")
        if self.wall_formula not in ("thom", "jensen"):
            raise InvalidConfig(f"unknown wall_formula {self.wall_formula!r}")

    @property
    def grid(self) -> "PolarGrid":
        return PolarGrid.build(self.nr, self.ntheta, self.outer_radius)


class PolarGrid:
    """O-grid with exponential radial stretching.

    With ``r = R_wall * exp(xi)`` the Laplacian becomes
    ``(d2/dxi2 + d2/dtheta2) / r**2``, so uniform spacing in ``xi`` gives
    cells of near-unit aspect ratio everywhere. Node ``[j, i]`` sits at
    ``xi_j = j*h`` (``j = 0`` on the wall, ``j = nr`` in the far field) and
    ``theta_i = i*dtheta``; the flow comes from ``theta = pi``.
    """

    _cache: dict = {}

    def __init__(self, nr: int, ntheta: int, outer_radius: float):
        self.nr = nr
        self.ntheta = ntheta
        self.outer_radius = float(outer_radius)
        self.h = math.log(self.outer_radius / WALL_RADIUS) / nr
        self.dtheta = 2 * math.pi / ntheta
        self.xi = self.h * np.arange(nr + 1)
        self.r = WALL_RADIUS * np.exp(self.xi)
        self.theta = self.dtheta * np.arange(ntheta)

    @classmethod
    def build(cls, nr: int, ntheta: int, outer_radius: float) -> "PolarGrid":
        key = (nr, ntheta, float(outer_radius))
        if key not in cls._cache:
            cls._cache[key] = cls(nr, ntheta, outer_radius)
        return cls._cache[key]

    @property
    def upstream(self) -> int:
        """Azimuthal index of the front stagnation line (theta = pi)."""
        return self.ntheta // 2

    @cached_property
    def r2(self) -> np.ndarray:
        return (self.r**2)[:, None]

    @cached_property
    def x(self) -> np.ndarray:
        return self.r[:, None] * np.cos(self.theta)[None, :]

    @cached_property
    def y(self) -> np.ndarray:
        return self.r[:, None] * np.sin(self.theta)[None, :]

    @cached_property
    def far_field_streamfunction(self) -> np.ndarray:
        """Uniform unit stream in +x: psi = y on the outer circle."""
        return self.outer_radius * np.sin(self.theta)

    @cached_property
    def sponge(self) -> np.ndarray:
        """Vorticity damping rate of the absorbing layer, per unit time.

        Zero inside half the outer radius, rising quadratically to
        ``SPONGE_RATE`` at the boundary. Wake vortices fade out here instead
        of hitting the free-stream boundary, where cells are too coarse to
        carry them and the fixed streamfunction reflects them.
        """
        start = SPONGE_START * self.outer_radius
        ramp = np.clip((self.r - start) / (self.outer_radius - start), 0.0, 1.0)
        return (SPONGE_RATE * ramp**2)[:, None]

    @cached_property
    def circulation_mode(self) -> np.ndarray:
        """Discrete-harmonic field equal to 1 on the wall and 0 far away."""
        return (1.0 - self.xi / self.xi[-1])[:, None] * np.ones((1, self.ntheta))
