"""Linearity metrology: transfer curves, INL/DNL, two-tone IMD, PAM levels.

Conventions pinned here and used everywhere:

* INL is measured against the endpoint-fit line (data-converter
  practice), in fractions of the output full scale for continuous
  curves and in LSB for level ladders.
* Optical power ratios (extinction ratio) use 10*log10; linearity
  improvement ratios use 20*log10 with 6.0206 dB per bit.
* Spectral analysis uses a plain rectangular-window DFT; coherent
  sampling is mandatory (integer bins), so there is no leakage to
  window away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, WindowUnreachableError

DB_PER_BIT = 6.0206

DEFAULT_WINDOW = (0.25, 0.75)


# ---------------------------------------------------------------------------
# static transfer curves


@dataclass(frozen=True)
class TransferCurve:
    """Static drive-to-gain map, both axes normalized to their sweep range.

    `v_volts` keeps the raw drive voltages so that windowed intervals can
    be mapped back to drive levels for time-domain stimuli.
    """

    v_norm: np.ndarray
    gain_norm: np.ndarray
    v_volts: np.ndarray
    gain_raw: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.v_norm) <= 0):
            raise InvalidArgumentError("transfer curve drive axis must be strictly increasing")
        if not np.all(np.isfinite(self.gain_norm)):
            raise InvalidArgumentError("transfer curve gains must be finite")


def static_transfer(gain_fn, v_min: float, v_max: float, n_points: int = 513) -> TransferCurve:
    """Sweep `gain_fn` over a ramp and normalize both axes to [0, 1].

    `gain_fn` maps drive voltage (array) to power gain; non-monotonic
    sweeps are allowed, windowing extracts a monotone sub-interval later.
    """
    if n_points < 33:
        raise InvalidArgumentError("static transfer needs at least 33 points")
    v = np.linspace(v_min, v_max, n_points)
    g = np.asarray(gain_fn(v), dtype=float)
    g_lo, g_hi = g.min(), g.max()
    if g_hi - g_lo <= 0:
        raise InvalidArgumentError("gain is constant over the sweep")
    gain_norm = (g - g_lo) / (g_hi - g_lo)
    v_norm = (v - v_min) / (v_max - v_min)
    return TransferCurve(v_norm, gain_norm, v, g)


@dataclass(frozen=True)
class WindowedCurve:
    """A monotone slice of a transfer curve re-normalized to the FS window."""

    v_norm: np.ndarray      # [0, 1] inside the window
    gain_norm: np.ndarray   # [0, 1] inside the window
    delta_v_fs: float       # electrical span of the window, fraction of full scale
    v_lo_volts: float       # drive voltage at the g_lo crossing
    v_hi_volts: float       # drive voltage at the g_hi crossing
    window: tuple = DEFAULT_WINDOW
    ambiguous: bool = False  # more than one candidate interval existed


def _monotone_runs(g: np.ndarray):
    """Index ranges [i0, i1] of maximal monotone runs of g."""
    dg = np.diff(g)
    sign = np.sign(dg)
    runs = []
    i = 0
    while i < len(dg):
        s = sign[i]
        j = i
        while j < len(dg) and sign[j] * s >= 0:
            j += 1
        runs.append((i, j))
        i = j
    return runs


def fs_window(curve: TransferCurve, g_lo: float = DEFAULT_WINDOW[0],
              g_hi: float = DEFAULT_WINDOW[1]) -> WindowedCurve:
    """Extract the monotone interval spanning normalized gains [g_lo, g_hi].

    The crossings are located by linear interpolation and both axes are
    re-normalized to [0, 1] inside the window.  Among multiple candidate
    intervals the one with the smallest electrical span wins and the
    ambiguity is flagged.  Raises WindowUnreachableError when no
    monotone interval crosses both levels.
    """
    if not 0 <= g_lo < g_hi <= 1:
        raise InvalidArgumentError(f"window must satisfy 0 <= g_lo < g_hi <= 1, got ({g_lo}, {g_hi})")
    candidates = []
    for i0, i1 in _monotone_runs(curve.gain_norm):
        gs = curve.gain_norm[i0:i1 + 1]
        vs = curve.v_norm[i0:i1 + 1]
        vv = curve.v_volts[i0:i1 + 1]
        rising = gs[-1] >= gs[0]
        if not rising:
            gs, vs, vv = gs[::-1], vs[::-1], vv[::-1]
        if not (gs[0] <= g_lo and gs[-1] >= g_hi):
            continue
        vn_lo = np.interp(g_lo, gs, vs)
        vn_hi = np.interp(g_hi, gs, vs)
        v_lo = np.interp(g_lo, gs, vv)
        v_hi = np.interp(g_hi, gs, vv)
        inside = (gs > g_lo) & (gs < g_hi)
        g_pts = np.concatenate(([g_lo], gs[inside], [g_hi]))
        vn_pts = np.concatenate(([vn_lo], vs[inside], [vn_hi]))
        candidates.append((abs(vn_hi - vn_lo), min(vn_lo, vn_hi),
                           vn_pts, g_pts, v_lo, v_hi))
    if not candidates:
        raise WindowUnreachableError(
            f"transfer curve never traverses the window ({g_lo}, {g_hi}) monotonically")
    candidates.sort(key=lambda c: (c[0], c[1]))
    delta_v, _, vn_pts, g_pts, v_lo, v_hi = candidates[0]
    # re-normalize inside the window; flip so the windowed curve rises with v
    if vn_pts[-1] < vn_pts[0]:
        vn_pts, g_pts = vn_pts[::-1], g_pts[::-1]
    v_w = (vn_pts - vn_pts[0]) / (vn_pts[-1] - vn_pts[0])
    g_w = (g_pts - g_lo) / (g_hi - g_lo)
    return WindowedCurve(v_w, g_w, float(delta_v), float(v_lo), float(v_hi),
                         (g_lo, g_hi), ambiguous=len(candidates) > 1)


def extinction_ratio_db(g_lo: float, g_hi: float) -> float:
    """Extinction ratio 10*log10(g_hi/g_lo) of a gain window [dB]."""
    if not 0 < g_lo <= g_hi:
        raise InvalidArgumentError("extinction ratio needs 0 < g_lo <= g_hi")
    return 10.0 * math.log10(g_hi / g_lo)


# ---------------------------------------------------------------------------
# INL / DNL


@dataclass(frozen=True)
class LinearityReport:
    """INL (and for level analyses DNL) against the endpoint-fit line."""

    inl: np.ndarray
    inl_pp: float
    unit: str = "fs"      # "fs" fraction of output full scale, or "lsb"
    dnl: np.ndarray | None = None
    dnl_pp: float | None = None
    levels: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


def inl(curve: WindowedCurve) -> LinearityReport:
    """Continuous INL of a windowed transfer curve, in fractions of FS."""
    if curve.v_norm.size < 3:
        raise InvalidArgumentError("INL needs at least 3 points")
    v, g = curve.v_norm, curve.gain_norm
    line = g[0] + (g[-1] - g[0]) * (v - v[0]) / (v[-1] - v[0])
    dev = g - line
    return LinearityReport(dev, float(dev.max() - dev.min()), "fs")


def delta_db(ref_pp: float, test_pp: float) -> float:
    """Improvement 20*log10(ref/test) of a peak-to-peak nonlinearity [dB]."""
    if ref_pp <= 0 or test_pp <= 0:
        raise InvalidArgumentError("peak-to-peak values must be positive")
    return 20.0 * math.log10(ref_pp / test_pp)


def db_to_bits(delta: float) -> float:
    """Convert a 20*log10 linearity delta to bits (6.0206 dB per bit)."""
    if not math.isfinite(delta):
        raise InvalidArgumentError("dB value must be finite")
    return delta / DB_PER_BIT


def bits_to_db(bits: float) -> float:
    if not math.isfinite(bits):
        raise InvalidArgumentError("bit value must be finite")
    return bits * DB_PER_BIT


# ---------------------------------------------------------------------------
# two-tone spectral analysis


@dataclass(frozen=True)
class SpectrumReport:
    """Single-sided DFT bin powers with tagged fundamental and IMD3 bins."""

    bin_power_db: np.ndarray      # dB re the stronger fundamental (dBc)
    fundamental_bins: tuple
    imd3_bins: tuple
    imd3_dbc: float
    fundamental_power_db: float   # absolute dB (10*log10 of mean-square volts)
    oip3_db: float
    sfdr_db_hz23: float | None = None
    meta: dict = field(default_factory=dict)


def two_tone_analysis(samples, sample_rate_ghz: float, f1_ghz: float, f2_ghz: float,
                      noise_floor_db_hz: float | None = None,
                      edge_guard: int = 0) -> SpectrumReport:
    """Rectangular-window DFT IMD3 / OIP3 / SFDR analysis of a link output.

    The record must be coherently sampled: f1, f2 and both third-order
    products 2f1-f2 and 2f2-f1 must land on integer, non-colliding bins.
    `edge_guard` must be zero -- the exact circular delay model never
    marks edges, and trimming would break coherence.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if edge_guard != 0:
        raise InvalidArgumentError("spectral analysis requires an edge-guard-free record")
    if n < 16:
        raise InvalidArgumentError("record too short for spectral analysis")
    bins = {}
    for name, f in (("f1", f1_ghz), ("f2", f2_ghz),
                    ("imd_lo", 2 * f1_ghz - f2_ghz), ("imd_hi", 2 * f2_ghz - f1_ghz)):
        k = f * n / sample_rate_ghz
        k_round = round(k)
        if abs(k - k_round) > 1e-9 * max(1.0, abs(k)):
            raise InvalidArgumentError(f"{name} at {f} GHz is not an integer bin ({k})")
        if not 0 < k_round < n // 2:
            raise InvalidArgumentError(f"{name} bin {k_round} outside the single-sided range")
        bins[name] = int(k_round)
    if {bins["imd_lo"], bins["imd_hi"]} & {bins["f1"], bins["f2"]}:
        raise InvalidArgumentError("IMD3 bins collide with the fundamentals")
    spectrum = np.fft.rfft(x) / n
    power = np.abs(spectrum) ** 2
    power[1:] *= 2.0                       # single-sided mean-square power
    if n % 2 == 0:
        power[-1] /= 2.0                   # Nyquist bin is not doubled
    p_fund = max(power[bins["f1"]], power[bins["f2"]])
    p_imd = max(power[bins["imd_lo"]], power[bins["imd_hi"]])
    if p_fund <= 0:
        raise InvalidArgumentError("no power at the fundamental bins")
    floor = 1e-300
    bin_db = 10.0 * np.log10(np.maximum(power, floor) / p_fund)
    imd3_dbc = 10.0 * math.log10(max(p_imd, floor) / p_fund)
    p_fund_db = 10.0 * math.log10(p_fund)
    oip3 = p_fund_db + (p_fund_db - (p_fund_db + imd3_dbc)) / 2.0
    sfdr = None
    if noise_floor_db_hz is not None:
        sfdr = (2.0 / 3.0) * (oip3 - noise_floor_db_hz)
    return SpectrumReport(bin_db, (bins["f1"], bins["f2"]),
                          (bins["imd_lo"], bins["imd_hi"]),
                          imd3_dbc, p_fund_db, oip3, sfdr,
                          {"n_samples": n, "sample_rate_ghz": sample_rate_ghz,
                           "f1_ghz": f1_ghz, "f2_ghz": f2_ghz})


def delta_sfdr_db(report_test: SpectrumReport, report_ref: SpectrumReport) -> float:
    """SFDR improvement of `test` over `ref` under identical noise assumptions.

    Falls back to the IMD3 dBc gap scaled by 2/3 when no noise floor was
    supplied (the noise term cancels in the difference).
    """
    if report_test.sfdr_db_hz23 is not None and report_ref.sfdr_db_hz23 is not None:
        return report_test.sfdr_db_hz23 - report_ref.sfdr_db_hz23
    return (2.0 / 3.0) * (report_test.oip3_db - report_ref.oip3_db)


# ---------------------------------------------------------------------------
# PAM level analysis


def pam_level_report(gain_fn, v_lo: float, v_hi: float, n_levels: int) -> LinearityReport:
    """DNL/INL of the quasi-static eye-center ladder, in LSB.

    Evaluates the static map at `n_levels` equally spaced drive levels
    across the windowed electrical span.  The model is memoryless, so
    these are exactly the settled eye centers of a time-domain PAM run.
    """
    if n_levels < 2:
        raise InvalidArgumentError("PAM analysis needs at least 2 levels")
    v = np.linspace(v_lo, v_hi, n_levels)
    levels = np.asarray(gain_fn(v), dtype=float)
    steps = np.diff(levels)
    if np.any(steps == 0) or np.any(np.sign(steps) != np.sign(steps[0])):
        raise InvalidArgumentError(
            f"{n_levels} levels exceed the resolvable monotone window")
    ideal_step = (levels[-1] - levels[0]) / (n_levels - 1)
    dnl = steps / ideal_step - 1.0
    line = levels[0] + ideal_step * np.arange(n_levels)
    inl_lsb = (levels - line) / ideal_step
    return LinearityReport(inl_lsb, float(inl_lsb.max() - inl_lsb.min()), "lsb",
                           dnl, float(dnl.max() - dnl.min()), levels,
                           {"n_levels": n_levels, "v_lo": v_lo, "v_hi": v_hi})


def eye_centers_from_waveform(output_samples, symbols, n_levels: int,
                              oversampling: int) -> np.ndarray:
    """Settled mid-symbol output level for each PAM symbol value.

    Presentation/oracle helper: groups mid-symbol samples of a simulated
    PAM record by transmitted symbol and averages them.  Raises when some
    symbol value never occurs in the record.
    """
    y = np.asarray(output_samples, dtype=float)
    symbols = np.asarray(symbols)
    mid = y[oversampling // 2::oversampling][:symbols.size]
    levels = np.empty(n_levels)
    for s in range(n_levels):
        mask = symbols == s
        if not mask.any():
            raise InvalidArgumentError(f"symbol {s} absent from the PAM record")
        levels[s] = mid[mask].mean()
    return levels


def ladder_report(levels) -> LinearityReport:
    """DNL/INL of an explicit level ladder, in LSB."""
    levels = np.asarray(levels, dtype=float)
    n = levels.size
    if n < 2:
        raise InvalidArgumentError("ladder needs at least 2 levels")
    ideal_step = (levels[-1] - levels[0]) / (n - 1)
    if ideal_step == 0:
        raise InvalidArgumentError("degenerate ladder: equal endpoints")
    dnl = np.diff(levels) / ideal_step - 1.0
    line = levels[0] + ideal_step * np.arange(n)
    inl_lsb = (levels - line) / ideal_step
    return LinearityReport(inl_lsb, float(inl_lsb.max() - inl_lsb.min()), "lsb",
                           dnl, float(dnl.max() - dnl.min()), levels)


def eye_raster(output_samples, sample_rate_ghz: float, oversampling: int,
               bins_t: int = 64, bins_v: int = 64) -> np.ndarray:
    """2-D eye-diagram histogram (time within 2 UI x output voltage).

    Presentation only; linearity metrics come from the deterministic
    level evaluation, never from this raster.
    """
    y = np.asarray(output_samples, dtype=float)
    period = 2 * oversampling
    n_keep = (y.size // period) * period
    if n_keep == 0:
        raise InvalidArgumentError("record shorter than one eye period")
    y = y[:n_keep]
    t_idx = np.tile(np.arange(period), n_keep // period)
    hist, _, _ = np.histogram2d(t_idx, y, bins=[bins_t, bins_v],
                                range=[[0, period], [y.min(), y.max()]])
    return hist
