"""Fixed-cylinder flow solver producing lift and drag training signals."""

from .forces import SurfaceDistribution, integrate_forces, stagnation_pressure, surface_coefficients
from .grid import FlowConfig, PolarGrid
from .poisson import PoissonSolver, laplacian, poisson_residual
from .solver import FlowRun, FlowState, advance, init, run, simulate_forces

__all__ = [
    "FlowConfig",
    "FlowRun",
    "FlowState",
    "PoissonSolver",
    "PolarGrid",
    "SurfaceDistribution",
    "advance",
    "init",
    "integrate_forces",
    "laplacian",
    "poisson_residual",
    "run",
    "simulate_forces",
    "stagnation_pressure",
    "surface_coefficients",
]
