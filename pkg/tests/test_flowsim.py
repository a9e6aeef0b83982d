import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from wakerom.errors import DegenerateSurface, Diverged, InvalidConfig, NoDominantPeak
from wakerom.flowsim import (
    FlowConfig,
    PoissonSolver,
    SurfaceDistribution,
    advance,
    init,
    integrate_forces,
    poisson_residual,
    run,
    simulate_forces,
    surface_coefficients,
)
from wakerom.rom import limit_cycle_projection
from wakerom.spectral import decompose

SMALL = dict(nr=64, ntheta=128, outer_radius=20.0)


def surface(n, cp, cf=None):
    theta = 2 * math.pi * np.arange(n) / n
    cf_values = np.zeros(n) if cf is None else cf(theta)
    return SurfaceDistribution(theta=theta, cp=cp(theta), cf=cf_values)


def quadrature(cp, cf):
    """Continuous force integrals over the unit-diameter circle."""
    dx = lambda th: -0.5 * math.sin(th)  # noqa: E731
    dy = lambda th: 0.5 * math.cos(th)  # noqa: E731
    lift = integrate.quad(lambda th: cp(th) * dx(th) + cf(th) * dy(th), 0, 2 * math.pi, limit=200)[0]
    drag = integrate.quad(lambda th: -cp(th) * dy(th) + cf(th) * dx(th), 0, 2 * math.pi, limit=200)[0]
    return lift, drag


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(reynolds=0.0),
            dict(nr=16),
            dict(ntheta=129),
            dict(outer_radius=10.0),
            dict(dt=0.0),
            dict(wall_formula="upwind"),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(InvalidConfig):
            FlowConfig(**kw)


class TestIntegrateForces:
    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(8, 2000), c=st.floats(-1e3, 1e3))
    def test_constant_pressure_has_no_net_force(self, n, c):
        lift, drag = integrate_forces(surface(n, lambda th: np.full_like(th, c)))
        assert abs(lift) < 1e-12 * max(1.0, abs(c)) and abs(drag) < 1e-12 * max(1.0, abs(c))

    def test_cosine_pressure_against_quadrature(self):
        lift, drag = integrate_forces(surface(1024, np.cos))
        ref_lift, ref_drag = quadrature(math.cos, lambda th: 0.0)
        assert drag == pytest.approx(ref_drag, rel=1e-4)
        assert ref_drag == pytest.approx(-math.pi / 2, rel=1e-12)
        assert abs(lift) < 1e-12 and abs(ref_lift) < 1e-12

    def test_sine_pressure_against_quadrature(self):
        lift, drag = integrate_forces(surface(1024, np.sin))
        ref_lift, _ = quadrature(math.sin, lambda th: 0.0)
        assert lift == pytest.approx(ref_lift, rel=1e-4)
        assert lift != 0.0 and abs(drag) < 1e-12

    def test_friction_against_quadrature(self):
        cf = lambda th: -np.sin(th) + 0.3 * np.cos(2 * th)  # noqa: E731
        lift, drag = integrate_forces(surface(1024, lambda th: 0.0 * th, cf))
        ref_lift, ref_drag = quadrature(lambda th: 0.0, lambda th: -math.sin(th) + 0.3 * math.cos(2 * th))
        assert lift == pytest.approx(ref_lift, abs=1e-5)
        assert drag == pytest.approx(ref_drag, rel=1e-4)

    def test_second_order_in_node_count(self):
        exact = quadrature(math.cos, lambda th: 0.0)[1]
        errors = [abs(integrate_forces(surface(n, np.cos))[1] - exact) for n in (64, 128, 256)]
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(np.abs(orders - 2.0) < 0.05)

    def test_degenerate(self):
        with pytest.raises(DegenerateSurface):
            integrate_forces(surface(6, np.cos))
        theta = np.linspace(0, 2 * math.pi, 16)  # repeats the first node
        with pytest.raises(DegenerateSurface):
            integrate_forces(SurfaceDistribution(theta, np.zeros(16), np.zeros(16)))


class TestPoisson:
    def test_residual_on_default_grid(self):
        grid = FlowConfig().grid
        rng = np.random.default_rng(3)
        w = rng.standard_normal((grid.nr + 1, grid.ntheta))
        psi = PoissonSolver(grid).solve(w, wall_value=0.37)
        assert poisson_residual(psi, w, grid) <= 1e-8
        assert np.all(psi[0] == 0.37)
        np.testing.assert_array_equal(psi[-1], grid.far_field_streamfunction)

    def test_potential_flow_matches_analytic(self):
        # uniform stream past a circle: psi = (r - a^2 / r) sin(theta), shifted by the far-field Dirichlet data
        grid = FlowConfig(nr=128, ntheta=128).grid
        psi = PoissonSolver(grid).solve(np.zeros((grid.nr + 1, grid.ntheta)))
        r, a, big = grid.r[:, None], 0.5, grid.outer_radius
        exact = (r - a * a / r) * np.sin(grid.theta) * big / (big - a * a / big)
        assert np.max(np.abs(psi - exact)) < 5e-3


class TestInit:
    def test_boundaries(self):
        cfg = FlowConfig(**SMALL)
        state = init(cfg)
        assert np.ptp(state.streamfunction[0]) == 0.0
        np.testing.assert_allclose(state.streamfunction[-1], cfg.grid.far_field_streamfunction, atol=1e-12)
        assert state.time == 0.0 and state.step == 0
        assert np.max(np.abs(state.vorticity)) <= cfg.seed_perturbation

    def test_unseeded_interior_is_irrotational(self):
        state = init(FlowConfig(seed_perturbation=0.0, **SMALL))
        assert np.all(state.vorticity == 0.0)


class TestAdvance:
    def test_first_step_creates_vorticity_only_at_the_wall(self):
        cfg = FlowConfig(seed_perturbation=0.0, **SMALL)
        state = advance(init(cfg), cfg)
        assert np.all(state.vorticity[1:] == 0.0)
        assert np.max(np.abs(state.vorticity[0])) > 1.0
        assert np.ptp(state.streamfunction[0]) == 0.0

    def test_symmetric_start_keeps_zero_lift(self):
        cfg = FlowConfig(seed_perturbation=0.0, dt=0.005, t_end=10.0, record_from=0.0, **SMALL)
        _, lift, drag, _ = simulate_forces(cfg)
        assert np.max(np.abs(lift)) < 1e-6
        assert np.all(drag > 0)

    def test_early_surface_is_mirror_symmetric(self):
        cfg = FlowConfig(seed_perturbation=0.0, t_end=1.0, **SMALL)
        *_, state = simulate_forces(cfg)
        surf = surface_coefficients(state, cfg)
        mirror = (-np.arange(cfg.ntheta)) % cfg.ntheta
        np.testing.assert_allclose(surf.cp, surf.cp[mirror], atol=1e-10)
        np.testing.assert_allclose(surf.cf, -surf.cf[mirror], atol=1e-10)
        assert abs(integrate_forces(surf)[0]) < 1e-10

    def test_pressure_closure_and_stagnation(self):
        cfg = FlowConfig(t_end=2.0, **SMALL)
        *_, state = simulate_forces(cfg)
        surf = surface_coefficients(state, cfg)
        assert np.all(np.isfinite(surf.cp)) and np.all(np.isfinite(surf.cf))
        # the front stagnation point carries close to the full dynamic pressure
        assert surf.cp[cfg.grid.upstream] == pytest.approx(1.0, abs=0.15)
        assert surf.cp[cfg.grid.upstream] == pytest.approx(np.max(surf.cp), abs=0.05)

    def test_step_bound_violation_diverges(self):
        cfg = FlowConfig(dt=0.5, t_end=50.0, **SMALL)
        with pytest.raises(Diverged) as info:
            run(cfg)
        assert info.value.step >= 1 and info.value.field_max > 1e6


class TestRun:
    def test_short_record_is_rejected(self):
        from wakerom.errors import NotPeriodic

        with pytest.raises(NotPeriodic):
            run(FlowConfig(t_end=0.05, record_from=0.0, **SMALL))

    def test_low_reynolds_wake_does_not_shed(self):
        cfg = FlowConfig(reynolds=20.0, dt=0.002, t_end=40.0, record_from=20.0, **SMALL)
        with pytest.raises(NoDominantPeak):
            run(cfg)


@pytest.mark.slow
class TestLimitCycle:
    def test_re300_two_to_one_structure(self, flow_re300):
        spec = decompose(flow_re300.lift, flow_re300.drag, 2 * math.pi * flow_re300.f_s)
        assert spec.drag(1).amplitude / spec.drag(2).amplitude < 0.1
        projection = limit_cycle_projection(flow_re300.lift, flow_re300.drag, spec.omega)
        assert projection.loops_per_period == 2

    def test_re500_pressure_drag_dominates(self, flow_re500):
        cfg = FlowConfig(reynolds=500.0)
        surf = surface_coefficients(flow_re500.final_state, cfg)
        zeros = np.zeros_like(surf.cp)
        pressure = integrate_forces(SurfaceDistribution(surf.theta, surf.cp, zeros))[1]
        friction = integrate_forces(SurfaceDistribution(surf.theta, zeros, surf.cf))[1]
        assert pressure > 4 * friction > 0

    def test_grid_convergence_at_re300(self):
        # mean drag over an early window, refining both spacings together
        means = []
        for nr in (96, 128, 192):
            cfg = FlowConfig(reynolds=300.0, nr=nr, ntheta=2 * nr, dt=0.0025, t_end=20.0, record_from=15.0)
            means.append(float(np.mean(simulate_forces(cfg)[2])))
        steps = np.diff(means)
        assert np.all(steps < 0) and abs(steps[1]) < abs(steps[0])
        assert abs(means[-1] - means[-2]) / means[-1] < 0.02
