"""Command-line surface: one subcommand per analysis family.

Every command takes `--config <json>` plus targeted overrides and drops
CSV / JSON / SVG artifacts into the output directory.  Exit codes:
0 success, 2 config or parse error, 3 infeasible analysis, 4 I/O error.
"""

from __future__ import annotations

import functools
import os
import sys

import click
import numpy as np

from . import __version__, metrics, reports
from .optimize import grid_sweep as run_grid_sweep, optimize as run_optimize
from .actuation import make_pam, make_two_tone
from .errors import (ConfigError, DegenerateResponseError, InfeasibleSearchError,
                     InvalidArgumentError, WindowUnreachableError)
from .link import notch_gain_fn, simulate_link, spectral_gains, summed_gain_fn
from .measured import ingest_spectrum_csv, summed_curve
from .metrics import eye_centers_from_waveform, eye_raster, ladder_report
from .resonator import loaded_q
from .runconfig import RunConfig, load_config


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, InvalidArgumentError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (WindowUnreachableError, InfeasibleSearchError, DegenerateResponseError) as exc:
            click.echo(f"infeasible: {exc}", err=True)
            sys.exit(3)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(4)
    return wrapper


def _load(config_path, out, seed, detune1, detune2, window) -> RunConfig:
    rc = load_config(config_path)
    raw = rc.resolved
    if seed is not None:
        raw = {**raw, "seed": int(seed)}
    if detune1 is not None:
        raw = {**raw, "ring1": {**raw["ring1"], "heater_detuning_pm": detune1}}
    if detune2 is not None:
        raw = {**raw, "ring2": {**raw["ring2"], "heater_detuning_pm": detune2}}
    if window is not None:
        try:
            lo, hi = (float(x) for x in window.split(":"))
        except ValueError:
            raise ConfigError(f"--window must be 'lo:hi', got {window!r}") from None
        raw = {**raw, "window": [lo, hi]}
    if out is not None:
        raw = {**raw, "output_dir": out}
    from .runconfig import from_dict
    return from_dict(raw)


def _common(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="JSON run config")(fn)
    fn = click.option("--out", default=None, help="output directory override")(fn)
    fn = click.option("--seed", default=None, type=int, help="PRNG seed override")(fn)
    fn = click.option("--detune1-pm", "detune1", default=None, type=float,
                      help="ring 1 heater detuning override [pm]")(fn)
    fn = click.option("--detune2-pm", "detune2", default=None, type=float,
                      help="ring 2 heater detuning override [pm]")(fn)
    fn = click.option("--window", default=None,
                      help="normalized-gain window 'lo:hi' override")(fn)
    return fn


def _outpath(rc: RunConfig, name: str) -> str:
    return os.path.join(rc.output_dir, name)


@click.group()
@click.version_option(__version__, prog_name="mrmlink")
def main() -> None:
    """Dual micro-ring modulator link simulator and metrology toolkit."""


@main.command()
@_common
@click.option("--points", default=2001, type=int, help="wavelength samples")
@_exit_codes
def spectrum(config_path, out, seed, detune1, detune2, window, points):
    """Power-gain spectra of both rings and their sum at V_P = v_min."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    cfg = rc.link
    lam0 = cfg.laser1.wavelength_nm
    half = 0.75 * cfg.ring1.fsr_nm
    lam = np.linspace(lam0 - half, lam0 + half, points)
    thru, drop = spectral_gains(cfg, lam, cfg.op1.v_min)
    reports.write_csv(_outpath(rc, "spectrum.csv"),
                      {"wavelength_nm": lam, "thru_gain": thru,
                       "drop_gain": drop, "summed_gain": thru + drop})
    reports.plot_spectrum(_outpath(rc, "spectrum.svg"), lam,
                          {"thru (ring 1)": thru, "drop (ring 2)": drop,
                           "summed": thru + drop}, rc.plot)
    reports.write_json(_outpath(rc, "spectrum.json"),
                       {"fsr_pm_ring1": cfg.ring1.fsr_nm * 1e3,
                        "fsr_pm_ring2": cfg.ring2.fsr_nm * 1e3,
                        "loaded_q_ring1": loaded_q(cfg.ring1),
                        "loaded_q_ring2": loaded_q(cfg.ring2)},
                       rc.resolved, rc.seed)
    click.echo(f"wrote spectrum.{{csv,svg,json}} to {rc.output_dir}")


def _transfer_curves(rc: RunConfig):
    cfg = rc.link
    dual = metrics.static_transfer(summed_gain_fn(cfg), cfg.op1.v_min, cfg.op1.v_max,
                                   rc.transfer_points)
    notch = metrics.static_transfer(notch_gain_fn(cfg), cfg.op1.v_min, cfg.op1.v_max,
                                    rc.transfer_points)
    return dual, notch


@main.command()
@_common
@_exit_codes
def transfer(config_path, out, seed, detune1, detune2, window):
    """Static E/O transfer curves of the notch-only and dual links."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    dual, notch = _transfer_curves(rc)
    reports.write_csv(_outpath(rc, "transfer.csv"),
                      {"v_norm": dual.v_norm, "gain_norm": dual.gain_norm})
    reports.write_csv(_outpath(rc, "transfer_notch.csv"),
                      {"v_norm": notch.v_norm, "gain_norm": notch.gain_norm})
    reports.plot_transfer(_outpath(rc, "transfer.svg"),
                          {"dual": (dual.v_norm, dual.gain_norm),
                           "notch only": (notch.v_norm, notch.gain_norm)}, rc.plot)
    reports.write_json(_outpath(rc, "transfer.json"), {"n_points": rc.transfer_points},
                       rc.resolved, rc.seed)
    click.echo(f"wrote transfer.{{csv,svg,json}} to {rc.output_dir}")


@main.command("inl")
@_common
@_exit_codes
def inl_cmd(config_path, out, seed, detune1, detune2, window):
    """Windowed INL of the dual link versus the notch-only reference."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    dual, notch = _transfer_curves(rc)
    w_dual = metrics.fs_window(dual, *rc.window)
    w_notch = metrics.fs_window(notch, *rc.window)
    r_dual = metrics.inl(w_dual)
    r_notch = metrics.inl(w_notch)
    improvement = metrics.delta_db(r_notch.inl_pp, r_dual.inl_pp)
    reports.write_csv(_outpath(rc, "inl_dual.csv"),
                      {"v_norm": w_dual.v_norm, "inl_fs": r_dual.inl})
    reports.write_csv(_outpath(rc, "inl_notch.csv"),
                      {"v_norm": w_notch.v_norm, "inl_fs": r_notch.inl})
    reports.plot_inl(_outpath(rc, "inl.svg"),
                     {"dual": (w_dual.v_norm, r_dual.inl),
                      "notch only": (w_notch.v_norm, r_notch.inl)}, rc.plot)
    reports.write_json(_outpath(rc, "inl.json"), {
        "window": list(rc.window),
        "extinction_ratio_db": metrics.extinction_ratio_db(*rc.window),
        "inl_pp_dual_fs": r_dual.inl_pp,
        "inl_pp_notch_fs": r_notch.inl_pp,
        "delta_inl_db": improvement,
        "delta_inl_bits": metrics.db_to_bits(improvement),
        "delta_v_fs_dual": w_dual.delta_v_fs,
        "delta_v_fs_notch": w_notch.delta_v_fs,
        "window_ambiguous_dual": w_dual.ambiguous,
        "window_ambiguous_notch": w_notch.ambiguous,
    }, rc.resolved, rc.seed)
    click.echo(f"wrote inl artifacts to {rc.output_dir} "
               f"(delta INL {improvement:.2f} dB)")


def _windowed_two_tone(rc: RunConfig, gain_fn):
    curve = metrics.static_transfer(gain_fn, rc.link.op1.v_min, rc.link.op1.v_max,
                                    rc.transfer_points)
    windowed = metrics.fs_window(curve, *rc.window)
    v_lo, v_hi = sorted((windowed.v_lo_volts, windowed.v_hi_volts))
    tt = rc.two_tone
    drive = make_two_tone(rc.link.op1, tt["f1_ghz"], tt["f2_ghz"],
                          tt["sample_rate_ghz"], tt["n_samples"],
                          amplitude_v=(v_hi - v_lo) / 4.0,
                          center_v=0.5 * (v_lo + v_hi))
    return drive


@main.command("two-tone")
@_common
@click.option("--f1", default=None, type=float, help="tone 1 [GHz] override")
@click.option("--f2", default=None, type=float, help="tone 2 [GHz] override")
@_exit_codes
def two_tone_cmd(config_path, out, seed, detune1, detune2, window, f1, f2):
    """Two-tone IMD3 analysis of the dual link and the notch reference."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    if f1 is not None:
        rc.two_tone["f1_ghz"] = f1
        rc.resolved["two_tone"]["f1_ghz"] = f1
    if f2 is not None:
        rc.two_tone["f2_ghz"] = f2
        rc.resolved["two_tone"]["f2_ghz"] = f2
    tt = rc.two_tone
    results = {}
    for name, gain_fn in (("dual", summed_gain_fn(rc.link)),
                          ("notch", notch_gain_fn(rc.link))):
        drive = _windowed_two_tone(rc, gain_fn)
        if name == "dual":
            out_series = simulate_link(rc.link, drive)
            samples, guard = out_series.samples, out_series.edge_guard
        else:
            samples, guard = gain_fn(drive.samples), 0
        results[name] = metrics.two_tone_analysis(
            samples, tt["sample_rate_ghz"], tt["f1_ghz"], tt["f2_ghz"],
            edge_guard=guard)
    gap = results["notch"].imd3_dbc - results["dual"].imd3_dbc
    rep = results["dual"]
    reports.write_csv(_outpath(rc, "two_tone_bins.csv"),
                      {"bin": np.arange(rep.bin_power_db.size),
                       "power_dbc": rep.bin_power_db})
    reports.plot_two_tone(_outpath(rc, "two_tone.svg"), rep.bin_power_db,
                          {"f1": rep.fundamental_bins[0], "f2": rep.fundamental_bins[1],
                           "imd3-": rep.imd3_bins[0], "imd3+": rep.imd3_bins[1]}, rc.plot)
    reports.write_json(_outpath(rc, "two_tone.json"), {
        "f1_ghz": tt["f1_ghz"], "f2_ghz": tt["f2_ghz"],
        "imd3_dbc_dual": results["dual"].imd3_dbc,
        "imd3_dbc_notch": results["notch"].imd3_dbc,
        "imd3_gap_db": gap,
        "oip3_db_dual": results["dual"].oip3_db,
        "oip3_db_notch": results["notch"].oip3_db,
    }, rc.resolved, rc.seed)
    click.echo(f"wrote two-tone artifacts to {rc.output_dir} (IMD3 gap {gap:.2f} dB)")


@main.command()
@_common
@click.option("--levels", default=None, type=int, help="PAM levels override")
@_exit_codes
def eye(config_path, out, seed, detune1, detune2, window, levels):
    """PAM-N eye: quasi-static level DNL/INL plus a rendered eye raster."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    if levels is not None:
        rc.pam["levels"] = levels
        rc.resolved["pam"]["levels"] = levels
    cfg = rc.link
    gain_fn = summed_gain_fn(cfg)
    curve = metrics.static_transfer(gain_fn, cfg.op1.v_min, cfg.op1.v_max,
                                    rc.transfer_points)
    windowed = metrics.fs_window(curve, *rc.window)
    v_lo, v_hi = sorted((windowed.v_lo_volts, windowed.v_hi_volts))
    report = metrics.pam_level_report(gain_fn, v_lo, v_hi, rc.pam["levels"])
    pam_cfg = rc.pam
    drive = make_pam(cfg.op1, pam_cfg["levels"], pam_cfg["n_symbols"],
                     pam_cfg["oversampling"], pam_cfg["sample_rate_ghz"],
                     rc.seed, v_lo, v_hi)
    sim = simulate_link(cfg, drive)
    raster = eye_raster(sim.samples, sim.sample_rate_ghz, pam_cfg["oversampling"],
                        pam_cfg["raster_bins_t"], pam_cfg["raster_bins_v"])
    centers = eye_centers_from_waveform(sim.samples, drive.meta["symbols"],
                                        pam_cfg["levels"], pam_cfg["oversampling"])
    eye_report = ladder_report(centers)
    reports.write_csv(_outpath(rc, "eye_levels.csv"),
                      {"level": np.arange(pam_cfg["levels"]),
                       "gain": report.levels,
                       "inl_lsb": report.inl,
                       "dnl_lsb": np.concatenate((report.dnl, [np.nan]))})
    reports.plot_eye(_outpath(rc, "eye.svg"), raster, rc.plot)
    reports.write_json(_outpath(rc, "eye.json"), {
        "levels": pam_cfg["levels"],
        "dnl_pp_lsb": report.dnl_pp,
        "inl_pp_lsb": report.inl_pp,
        "eye_dnl_pp_lsb": eye_report.dnl_pp,
        "eye_inl_pp_lsb": eye_report.inl_pp,
        "prng": "numpy-PCG64",
    }, rc.resolved, rc.seed)
    click.echo(f"wrote eye artifacts to {rc.output_dir} "
               f"(DNLpp {report.dnl_pp:.4f} LSB, INLpp {report.inl_pp:.4f} LSB)")


@main.command("optimize")
@_common
@_exit_codes
def optimize_cmd(config_path, out, seed, detune1, detune2, window):
    """Search the configured free parameters for the best linearity."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    result = run_optimize(rc.link, rc.search)
    names = sorted(result.params)
    reports.write_csv(_outpath(rc, "optimize_trace.csv"),
                      {**{n: np.array([p[0][i] for p in result.trace])
                          for i, n in enumerate(names)},
                       "objective": np.array([p[1] for p in result.trace])})
    reports.write_json(_outpath(rc, "optimize.json"), {
        "objective": rc.search.objective,
        "best_params": result.params,
        "best_objective": result.objective,
        "objective_before": result.before if result.feasible_before else None,
        "n_evaluations": result.n_evaluations,
        "budget": rc.search.budget,
    }, rc.resolved, rc.seed)
    click.echo(f"wrote optimize artifacts to {rc.output_dir} "
               f"(best {rc.search.objective} = {result.objective:.6g})")


@main.command()
@_common
@click.option("--points-per-dim", default=16, type=int, help="grid points per parameter")
@_exit_codes
def sweep(config_path, out, seed, detune1, detune2, window, points_per_dim):
    """Exhaustive grid sweep of the configured free parameters."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    grids = {name: np.linspace(lo, hi, points_per_dim)
             for name, (lo, hi) in rc.search.free_params.items()}
    rows = run_grid_sweep(rc.link, grids, rc.search)
    names = sorted(grids)
    columns = {n: np.array([r.params[n] for r in rows]) for n in names}
    columns["inl_pp_fs"] = np.array([r.inl_pp for r in rows])
    columns["delta_v_fs"] = np.array([r.delta_v_fs for r in rows])
    columns["window_reachable"] = np.array([r.reachable for r in rows])
    reports.write_csv(_outpath(rc, "sweep.csv"), columns)
    reports.write_json(_outpath(rc, "sweep.json"),
                       {"rows": len(rows), "points_per_dim": points_per_dim},
                       rc.resolved, rc.seed)
    click.echo(f"wrote sweep.csv ({len(rows)} rows) to {rc.output_dir}")


@main.command()
@_common
@click.option("--thru", "thru_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="through-port spectrum CSV (wavelength_nm,power_mw)")
@click.option("--drop", "drop_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="drop-port spectrum CSV (wavelength_nm,power_mw)")
@_exit_codes
def ingest(config_path, out, seed, detune1, detune2, window, thru_path, drop_path):
    """Analyze measured thru/drop spectra through the window + INL pipeline."""
    rc = _load(config_path, out, seed, detune1, detune2, window)
    thru = ingest_spectrum_csv(thru_path, "thru")
    drop = ingest_spectrum_csv(drop_path, "drop")
    curve = summed_curve(thru, drop)
    windowed = metrics.fs_window(curve, *rc.window)
    report = metrics.inl(windowed)
    reports.write_csv(_outpath(rc, "measured_inl.csv"),
                      {"axis_norm": windowed.v_norm, "inl_fs": report.inl})
    reports.plot_inl(_outpath(rc, "measured_inl.svg"),
                     {"measured dual": (windowed.v_norm, report.inl)}, rc.plot)
    reports.write_json(_outpath(rc, "measured_inl.json"), {
        "window": list(rc.window),
        "inl_pp_fs": report.inl_pp,
        "wavelength_span_nm": [float(curve.v_volts[0]), float(curve.v_volts[-1])],
        "window_ambiguous": windowed.ambiguous,
    }, rc.resolved, rc.seed)
    click.echo(f"wrote measured-INL artifacts to {rc.output_dir} "
               f"(INLpp {report.inl_pp:.6f} FS)")


if __name__ == "__main__":
    main()
