import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from wakerom.errors import InvalidConfig, NotSettled, ZeroInitialState
from wakerom.oscillator import VdpConfig, steady_amplitude, vdp_simulate, vdp_trajectory
from wakerom.signals import TimeSeries

from conftest import tone


def reference(cfg: VdpConfig, t_eval):
    """High-accuracy adaptive integration of the same equation."""

    def rhs(_, y):
        x, v = y
        return [v, -cfg.omega_s**2 * x + (cfg.mu - cfg.alpha * x * x) * v]

    sol = solve_ivp(rhs, (0.0, t_eval[-1]), [cfg.cl0, cfg.cl_dot0], method="DOP853", rtol=1e-12, atol=1e-13,
                    t_eval=t_eval)
    return sol.y


class TestConfig:
    @pytest.mark.parametrize("field", ["omega_s", "mu", "alpha", "dt", "duration"])
    def test_positive_fields(self, field):
        with pytest.raises(InvalidConfig):
            VdpConfig(**{field: 0.0})

    def test_step_bound(self):
        VdpConfig(omega_s=1.0, dt=0.05 * 2 * math.pi)
        with pytest.raises(InvalidConfig):
            VdpConfig(omega_s=1.0, dt=0.32)

    def test_origin_rejected(self):
        with pytest.raises(ZeroInitialState):
            vdp_simulate(VdpConfig(cl0=0.0, cl_dot0=0.0))


class TestIntegration:
    def test_matches_reference(self):
        cfg = VdpConfig(omega_s=1.3, mu=0.2, alpha=0.4, cl0=0.5, dt=0.01, duration=40.0)
        cl, rate = vdp_trajectory(cfg)
        ref = reference(cfg, cl.times)
        assert np.max(np.abs(cl.values - ref[0])) < 1e-7
        assert np.max(np.abs(rate.values - ref[1])) < 1e-7

    def test_fourth_order_convergence(self):
        errors = []
        for dt in (0.2, 0.1, 0.05):
            cfg = VdpConfig(omega_s=1.0, mu=0.3, alpha=0.3, cl0=1.0, dt=dt, duration=20.0)
            cl = vdp_simulate(cfg)
            errors.append(abs(cl.values[-1] - reference(cfg, np.array([20.0]))[0, -1]))
        ratios = np.array(errors[:-1]) / np.array(errors[1:])
        assert np.all((ratios > 12) & (ratios < 20)), ratios

    def test_mu_equals_alpha_reaches_limit_cycle(self):
        cfg = VdpConfig(omega_s=1.0, mu=0.01, alpha=0.01, cl0=0.1, dt=0.05, duration=3000.0)
        amplitude, _ = steady_amplitude(vdp_simulate(cfg))
        assert amplitude == pytest.approx(2.0, rel=0.02)
        # the averaged oracle against the reference integrator on the same tail
        t = np.linspace(2500.0, 3000.0, 20001)
        ref_amp = np.max(np.abs(reference(cfg, t)[0]))
        assert amplitude == pytest.approx(ref_amp, rel=1e-4)


class TestSteadyAmplitude:
    def test_pure_cosine(self):
        ts = tone(1.7, 3.0, 20.0, dt=0.01, duration=60.0)
        amplitude, freq = steady_amplitude(ts)
        assert amplitude == pytest.approx(1.7, rel=1e-4)
        assert freq == pytest.approx(3.0 / (2 * math.pi), rel=1e-4)

    def test_reference_limit_cycle(self):
        cfg = VdpConfig(omega_s=2.0, mu=0.05, alpha=0.05, cl0=0.1, dt=0.01, duration=500.0)
        amplitude, freq = steady_amplitude(vdp_simulate(cfg))
        assert amplitude == pytest.approx(2.0, rel=0.02)
        assert freq == pytest.approx(2.0 / (2 * math.pi), rel=0.01)

    def test_transient_is_not_settled(self):
        cfg = VdpConfig(omega_s=1.0, mu=0.05, alpha=0.05, cl0=0.1, dt=0.01, duration=60.0)
        with pytest.raises(NotSettled):
            steady_amplitude(vdp_simulate(cfg))

    def test_too_few_periods(self):
        with pytest.raises(NotSettled):
            steady_amplitude(tone(1.0, 1.0, dt=0.01, duration=12.0))


class TestProperties:
    @settings(max_examples=12, deadline=None)
    @given(ratio=st.floats(0.01, 0.1), alpha=st.floats(0.02, 2.0), omega_s=st.floats(0.5, 3.0))
    def test_amplitude_law(self, ratio, alpha, omega_s):
        mu = ratio * omega_s
        settle = 12.0 / mu  # about five growth e-foldings
        cfg = VdpConfig(omega_s=omega_s, mu=mu, alpha=alpha, cl0=0.1 * 2 * math.sqrt(mu / alpha),
                        dt=0.02 / omega_s, duration=2 * settle)
        amplitude, _ = steady_amplitude(vdp_simulate(cfg))
        assert amplitude == pytest.approx(2 * math.sqrt(mu / alpha), rel=0.02)

    def test_attraction_from_inside_and_outside(self):
        predicted = VdpConfig(omega_s=2.0, mu=0.05, alpha=0.05).predicted_amplitude
        amps = []
        for start in (0.1 * predicted, 3.0 * predicted):
            cfg = VdpConfig(omega_s=2.0, mu=0.05, alpha=0.05, cl0=start, dt=0.01, duration=600.0)
            amps.append(steady_amplitude(vdp_simulate(cfg))[0])
        assert amps[0] == pytest.approx(amps[1], rel=0.01)

    def test_energy_balance_over_a_period(self):
        cfg = VdpConfig(omega_s=1.0, mu=0.1, alpha=0.1, cl0=0.5, dt=0.005, duration=400.0)
        cl, rate = vdp_trajectory(cfg)
        period = 2 * math.pi / cfg.omega_s
        n = int(round(3 * period / cfg.dt))
        x, v = cl.values[-n:], rate.values[-n:]
        # one exact period of the settled orbit: between successive upward zero crossings
        ups = np.nonzero((x[:-1] < 0) & (x[1:] >= 0))[0]
        seg = slice(ups[0], ups[1] + 1)
        gain = np.trapezoid(cfg.mu * v[seg] ** 2, dx=cfg.dt)
        loss = np.trapezoid(cfg.alpha * x[seg] ** 2 * v[seg] ** 2, dx=cfg.dt)
        assert abs(gain - loss) < 0.01 * gain

    def test_series_type(self):
        cl = vdp_simulate(VdpConfig(duration=1.0))
        assert isinstance(cl, TimeSeries) and len(cl) == 101 and cl.values[0] == 0.1
