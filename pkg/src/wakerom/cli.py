"""Command-line front end.

Every command writes its results plus a ``manifest.json`` into
``--output-dir``. Exit codes: 0 ok, 2 bad input, 3 analysis failure,
4 flow-solver divergence; the error class name goes to stderr.
"""

from __future__ import annotations

import functools
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import Diverged, InputError, InvalidConfig, WakeRomError
from .flowsim import FlowConfig, run as run_flow
from .io import RunManifest, read_forces, read_json, write_csv, write_forces, write_json
from .oscillator import VdpConfig, steady_amplitude, vdp_trajectory
from .rom import (
    DragModel,
    FitMethod,
    LinearScale,
    RomParameters,
    fit,
    fit_error,
    limit_cycle_projection,
    reconstruct_drag,
    synthesize,
)
from .signals import moment_means, trim_to_integer_periods
from .spectral import DEFAULT_MAX_ORDER, HarmonicComponent, WakeSpectrum, decompose, periodogram

MODEL_CHOICES = [m.value for m in DragModel]
SCALE_CHOICES = [s.value for s in LinearScale]
FIT_CHOICES = [m.value for m in FitMethod]


def _fail(exc: Exception, code: int):
    click.echo(f"{type(exc).__name__}: {exc}", err=True)
    sys.exit(code)


def reports_errors(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except WakeRomError as exc:
            _fail(exc, exc.exit_code)
        except ValueError as exc:
            _fail(exc, InputError.exit_code)

    return wrapper


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(out: Path, command: str, inputs, options: dict, outputs):
    names = [p.name for p in outputs]
    RunManifest(command, [str(i) for i in inputs], options, names).write(out)
    for name in names + ["manifest.json"]:
        click.echo(str(out / name))


input_option = click.option(
    "--input", "input_path", type=click.Path(dir_okay=False), required=True, help="Force CSV (t,cl,cd)."
)
output_option = click.option(
    "--output-dir", type=click.Path(file_okay=False), default="out", show_default=True, help="Where results go."
)
omega_option = click.option("--omega", type=float, default=None, help="Fundamental angular frequency (default: estimated).")


@click.group()
@click.version_option(__version__, prog_name="wakerom")
def main():
    """Harmonic identification and reduced-order drag models for cylinder wakes."""


@main.command()
@input_option
@output_option
@click.option("--model", type=click.Choice(MODEL_CHOICES), default="five", show_default=True,
              help="Variant reported on stdout; all three are always written.")
@click.option("--linear-scale", type=click.Choice(SCALE_CHOICES), default="a1d", show_default=True,
              help="Scale of the five-term model's linear terms.")
@click.option("--max-order", type=click.IntRange(2, 20), default=DEFAULT_MAX_ORDER, show_default=True)
@omega_option
@click.option("--lift-source", type=click.Choice(["model", "raw"]), default="model", show_default=True,
              help="Drive the drag models with the harmonic lift model or the measured lift.")
@click.option("--fit", "fit_method", type=click.Choice(FIT_CHOICES), default="balance", show_default=True,
              help="Weights from harmonic balance against the lift model, or read off the drag phases.")
@reports_errors
def identify(input_path, output_dir, model, linear_scale, max_order, omega, lift_source, fit_method):
    """Identify model parameters from a force record and score the reconstructions."""
    lift, drag = read_forces(input_path)
    spectrum = decompose(lift, drag, omega=omega, max_order=max_order)
    lift_w = trim_to_integer_periods(lift, spectrum.omega)
    drag_w = trim_to_integer_periods(drag, spectrum.omega)

    raw = lift_source == "raw"
    params = fit(
        spectrum,
        cl_sq_mean=moment_means(lift_w)[1] if raw else None,
        linear_scale=LinearScale(linear_scale),
        method=FitMethod(fit_method),
    )
    recon, reports = {}, {}
    for variant in DragModel:
        cd = reconstruct_drag(params, lift_w, variant, lift_spectrum=None if raw else spectrum)
        recon[variant.value] = cd.values
        reports[variant.value] = fit_error(cd, drag_w).to_dict()

    out = _out_dir(output_dir)
    body = params.to_dict()
    body["frequency"] = spectrum.omega / (2 * math.pi)
    body["lift_components"] = [c.to_dict() for c in spectrum.lift_components]
    body["drag_components"] = [c.to_dict() for c in spectrum.drag_components]
    written = [
        write_json(out / "parameters.json", body),
        write_csv(
            out / "reconstruction.csv",
            ["t", "cl", "cd", "cd_two", "cd_three", "cd_five"],
            [lift_w.times, lift_w.values, drag_w.values, recon["two"], recon["three"], recon["five"]],
        ),
        write_json(out / "fit_report.json", reports),
    ]
    click.echo(f"{model}-term normalized RMSE: {reports[model]['normalized_rmse']:.6g}", err=True)
    options = dict(model=model, linear_scale=linear_scale, max_order=max_order, omega=omega,
                   lift_source=lift_source, fit=fit_method)
    _finish(out, "identify", [input_path], options, written)


@main.command()
@output_option
@click.option("--re", "reynolds", type=float, default=300.0, show_default=True, help="Reynolds number.")
@click.option("--nr", type=int, default=128, show_default=True, help="Radial cells.")
@click.option("--ntheta", type=int, default=256, show_default=True, help="Azimuthal cells.")
@click.option("--outer-radius", type=float, default=40.0, show_default=True, help="Far-field radius in diameters.")
@click.option("--dt", type=float, default=0.005, show_default=True)
@click.option("--t-end", type=float, default=300.0, show_default=True)
@click.option("--record-from", type=float, default=200.0, show_default=True)
@click.option("--seed-perturbation", type=float, default=1e-3, show_default=True)
@click.option("--wall-formula", type=click.Choice(["thom", "jensen"]), default="thom", show_default=True)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file of FlowConfig fields; explicit flags are ignored when given.")
@click.option("--quiet", is_flag=True, help="No progress output.")
@reports_errors
def simulate(output_dir, reynolds, nr, ntheta, outer_radius, dt, t_end, record_from, seed_perturbation,
             wall_formula, config_path, quiet):
    """Simulate flow past a fixed cylinder and record lift and drag."""
    if config_path:
        try:
            cfg = FlowConfig(**read_json(config_path))
        except TypeError as exc:
            raise InvalidConfig(f"{config_path}: {exc}") from None
    else:
        cfg = FlowConfig(reynolds=reynolds, nr=nr, ntheta=ntheta, outer_radius=outer_radius, dt=dt,
                         t_end=t_end, record_from=record_from, seed_perturbation=seed_perturbation,
                         wall_formula=wall_formula)
    out = _out_dir(output_dir)
    options = dict(vars(cfg))
    inputs = [config_path] if config_path else []

    progress = None
    if not quiet:
        every = max(1, int(round(10.0 / cfg.dt)))

        def progress(state):
            if state.step % every == 0:
                click.echo(f"t = {state.time:8.2f}", err=True)

    try:
        result = run_flow(cfg, progress=progress)
    except Diverged as exc:
        info = {"status": "diverged", "step": exc.step, "time": exc.time, "field_max": exc.field_max}
        _finish(out, "simulate", inputs, options, [write_json(out / "summary.json", info)])
        raise

    spectrum = decompose(result.lift, result.drag, omega=2 * math.pi * result.f_s)
    loops = limit_cycle_projection(result.lift, result.drag, spectrum.omega)
    summary = {
        "status": "ok",
        "f_s": result.f_s,
        "cd_mean": spectrum.drag_mean,
        "cl_amplitude": 0.5 * float(np.ptp(result.lift.values)),
        "a1L": spectrum.a1L,
        "a1D": spectrum.drag(1).amplitude,
        "a2D": spectrum.drag(2).amplitude,
        "loops_per_period": loops.loops_per_period,
        "ratio_a1D_a2D": loops.ratio_a1D_a2D,
    }
    written = [
        write_forces(out / "forces.csv", result.lift, result.drag),
        write_json(out / "summary.json", summary),
    ]
    _finish(out, "simulate", inputs, options, written)


@main.command()
@input_option
@output_option
@click.option("--max-order", type=click.IntRange(2, 20), default=DEFAULT_MAX_ORDER, show_default=True)
@omega_option
@reports_errors
def spectra(input_path, output_dir, max_order, omega):
    """Power spectra of lift (and drag) plus their harmonic components."""
    lift, drag = read_forces(input_path, require_drag=False)
    out = _out_dir(output_dir)
    freqs, p_lift = periodogram(lift)
    columns, header = [freqs, p_lift], ["frequency", "power_cl"]
    if drag is not None:
        columns.append(periodogram(drag)[1])
        header.append("power_cd")
    written = [write_csv(out / "spectrum.csv", header, columns)]
    if drag is not None:
        written.append(write_json(out / "harmonics.json", decompose(lift, drag, omega, max_order).to_dict()))
    _finish(out, "spectra", [input_path], dict(max_order=max_order, omega=omega), written)


def _lift_spectrum(body: dict, params: RomParameters) -> WakeSpectrum:
    comps = body.get("lift_components")
    if not comps:
        return WakeSpectrum.pure_lift(params.omega, params.a1L)
    return WakeSpectrum(params.omega, [HarmonicComponent.from_dict(c) for c in comps], params.cd_mean, [])


@main.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False), required=True,
              help="Parameters JSON (as written by identify).")
@output_option
@click.option("--model", type=click.Choice(MODEL_CHOICES), default="five", show_default=True)
@click.option("--linear-scale", type=click.Choice(SCALE_CHOICES), default=None,
              help="Override the scale stored in the parameters file.")
@click.option("--dt", type=float, default=0.01, show_default=True)
@click.option("--periods", type=float, default=20.0, show_default=True, help="Record length in fundamental periods.")
@reports_errors
def synth(input_path, output_dir, model, linear_scale, dt, periods):
    """Synthesize lift and drag signals from identified parameters."""
    body = read_json(input_path)
    try:
        params = RomParameters.from_dict(body)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{input_path}: incomplete parameters ({exc})") from None
    if linear_scale:
        params = RomParameters.from_dict({**params.to_dict(), "linear_scale": linear_scale})
    duration = periods * 2 * math.pi / params.omega
    lift, drag = synthesize(params, _lift_spectrum(body, params), dt, duration, model)
    out = _out_dir(output_dir)
    written = [write_forces(out / "forces.csv", lift, drag)]
    options = dict(model=model, linear_scale=params.linear_scale.value, dt=dt, periods=periods)
    _finish(out, "synth", [input_path], options, written)


@main.command("limit-cycle")
@input_option
@output_option
@omega_option
@click.option("--samples", type=click.IntRange(64, 1 << 16), default=512, show_default=True,
              help="Points per period in the projection.")
@reports_errors
def limit_cycle(input_path, output_dir, omega, samples):
    """Project the lift-drag limit cycle and count its loops."""
    lift, drag = read_forces(input_path)
    if omega is None:
        omega = decompose(lift, drag, max_order=2).omega
    lift_w = trim_to_integer_periods(lift, omega)
    drag_w = trim_to_integer_periods(drag, omega)
    result = limit_cycle_projection(lift_w, drag_w, omega, samples)
    out = _out_dir(output_dir)
    body = {"omega": omega, **result.to_dict()}
    written = [
        write_csv(out / "projection.csv", ["cl", "cd"], [result.projection_points[:, 0], result.projection_points[:, 1]]),
        write_json(out / "classification.json", body),
    ]
    _finish(out, "limit-cycle", [input_path], dict(omega=omega, samples=samples), written)


@main.command()
@output_option
@click.option("--omega-s", type=float, default=1.0, show_default=True, help="Linear angular frequency.")
@click.option("--mu", type=float, default=0.05, show_default=True, help="Linear negative damping.")
@click.option("--alpha", type=float, default=0.05, show_default=True, help="Cubic damping.")
@click.option("--cl0", type=float, default=0.1, show_default=True)
@click.option("--cl-dot0", type=float, default=0.0, show_default=True)
@click.option("--dt", type=float, default=0.01, show_default=True)
@click.option("--duration", type=float, default=500.0, show_default=True)
@click.option("--settle-fraction", type=float, default=0.5, show_default=True)
@reports_errors
def vdp(output_dir, omega_s, mu, alpha, cl0, cl_dot0, dt, duration, settle_fraction):
    """Integrate the van der Pol lift oscillator and measure its limit cycle."""
    cfg = VdpConfig(omega_s=omega_s, mu=mu, alpha=alpha, cl0=cl0, cl_dot0=cl_dot0, dt=dt, duration=duration)
    cl, rate = vdp_trajectory(cfg)
    amplitude, frequency = steady_amplitude(cl, settle_fraction)
    out = _out_dir(output_dir)
    summary = {
        "amplitude": amplitude,
        "frequency": frequency,
        "predicted_amplitude": cfg.predicted_amplitude,
        "linear_frequency": omega_s / (2 * math.pi),
    }
    written = [
        write_csv(out / "vdp.csv", ["t", "cl", "cl_dot"], [cl.times, cl.values, rate.values]),
        write_json(out / "summary.json", summary),
    ]
    options = dict(vars(cfg), settle_fraction=settle_fraction)
    _finish(out, "vdp", [], options, written)


if __name__ == "__main__":
    main()
