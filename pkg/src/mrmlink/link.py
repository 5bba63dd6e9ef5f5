"""Dual micro-ring link: two resonators, summed photocurrent, fiber delay.

Ring 1 is used through its notch (through) port and ring 2 through its
bandpass (drop) port.  A dual-input photodiode sums the two optical
powers incoherently, I_PD = I_thru + I_drop, and an ideal linear TIA
converts the photocurrent to a voltage.  The optical response is
evaluated quasi-statically per sample (the stimuli of interest sit well
below the cavity and electrical bandwidths); an optional single-pole
low-pass on the output is available for sensitivity studies.

Fiber latency enters as the differential delay between the two paths.
The common-mode delay is removed (absolute link latency carries no
information), and the differential part is applied as an exact
band-limited circular shift of the periodic record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .actuation import DriveWaveform, OperatingPoint, resonance_shift
from .errors import InvalidArgumentError
from .resonator import RingDevice, drop_gain, fwhm_pm, thru_gain

TWO_FIBER = "two_fiber_single_lambda"
SINGLE_FIBER = "single_fiber_dual_lambda"


@dataclass(frozen=True)
class LaserSpec:
    wavelength_nm: float
    power_mw: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.wavelength_nm) and self.wavelength_nm > 0):
            raise InvalidArgumentError(f"laser wavelength must be > 0, got {self.wavelength_nm}")
        if not (math.isfinite(self.power_mw) and self.power_mw > 0):
            raise InvalidArgumentError(f"laser power must be > 0, got {self.power_mw}")


@dataclass(frozen=True)
class LinkConfig:
    """Full dual-MRM link description.

    `laser2` powers ring 2; when omitted in the two-fiber topology, ring 2
    receives the same injection as ring 1.  `drop_power_weight` scales the
    drop-path injection and is a legitimate linearization degree of freedom.
    """

    ring1: RingDevice
    op1: OperatingPoint
    ring2: RingDevice
    op2: OperatingPoint
    laser1: LaserSpec
    laser2: LaserSpec | None = None
    topology: str = TWO_FIBER
    fiber_delay_thru_ps: float = 0.0
    fiber_delay_drop_ps: float = 0.0
    pd_responsivity_a_w: float = 0.8
    tia_transimpedance_v_a: float = 1000.0
    drop_power_weight: float = 1.0
    min_spacing_linewidths: float = 5.0
    include_crosstalk: bool = False
    lowpass_cutoff_ghz: float | None = None

    def __post_init__(self) -> None:
        if self.topology not in (TWO_FIBER, SINGLE_FIBER):
            raise InvalidArgumentError(f"unknown topology {self.topology!r}")
        if self.pd_responsivity_a_w <= 0 or self.tia_transimpedance_v_a <= 0:
            raise InvalidArgumentError("PD responsivity and TIA transimpedance must be > 0")
        if self.drop_power_weight <= 0:
            raise InvalidArgumentError("drop_power_weight must be > 0")
        if (self.op1.v_min, self.op1.v_max) != (self.op2.v_min, self.op2.v_max):
            raise InvalidArgumentError("both rings are driven by the same V_P; "
                                       "electrical full scales must match")
        if self.topology == SINGLE_FIBER:
            if self.laser2 is None:
                raise InvalidArgumentError("single-fiber dual-lambda topology requires laser2")
            if self.fiber_delay_thru_ps != self.fiber_delay_drop_ps:
                raise InvalidArgumentError("single-fiber topology forces equal path delays")
            spacing_pm = abs(self.laser1.wavelength_nm - self.laser2.wavelength_nm) * 1e3
            linewidth = max(fwhm_pm(self.ring1), fwhm_pm(self.ring2))
            if spacing_pm < self.min_spacing_linewidths * linewidth:
                raise InvalidArgumentError(
                    f"dual-lambda lasers must be spaced by >= {self.min_spacing_linewidths} "
                    f"linewidths ({self.min_spacing_linewidths * linewidth:.1f} pm), "
                    f"got {spacing_pm:.1f} pm")
        if self.lowpass_cutoff_ghz is not None and self.lowpass_cutoff_ghz <= 0:
            raise InvalidArgumentError("lowpass cutoff must be > 0")

    def with_params(self, **overrides) -> "LinkConfig":
        return replace(self, **overrides)


def _ring_wavelengths(cfg: LinkConfig) -> tuple[float, float]:
    if cfg.topology == SINGLE_FIBER:
        return cfg.laser1.wavelength_nm, cfg.laser2.wavelength_nm
    return cfg.laser1.wavelength_nm, cfg.laser1.wavelength_nm


def _gain1(cfg: LinkConfig, lam_nm: float, v_drive):
    lam_res = cfg.ring1.resonance_wavelength_nm + resonance_shift(cfg.op1, v_drive) * 1e-3
    phi = 2.0 * np.pi * (lam_nm - lam_res) / cfg.ring1.fsr_nm
    return thru_gain(phi, cfg.ring1.self_coupling_thru,
                     cfg.ring1.self_coupling_drop, cfg.ring1.round_trip_amplitude)


def _gain2(cfg: LinkConfig, lam_nm: float, v_drive):
    lam_res = cfg.ring2.resonance_wavelength_nm + resonance_shift(cfg.op2, v_drive) * 1e-3
    phi = 2.0 * np.pi * (lam_nm - lam_res) / cfg.ring2.fsr_nm
    return drop_gain(phi, cfg.ring2.self_coupling_thru,
                     cfg.ring2.self_coupling_drop, cfg.ring2.round_trip_amplitude)


def spectral_gains(cfg: LinkConfig, wavelengths_nm, v_drive: float):
    """(thru, drop) power gains versus wavelength at a fixed drive voltage."""
    lam = np.asarray(wavelengths_nm, dtype=float)
    lam_res1 = cfg.ring1.resonance_wavelength_nm + resonance_shift(cfg.op1, v_drive) * 1e-3
    lam_res2 = cfg.ring2.resonance_wavelength_nm + resonance_shift(cfg.op2, v_drive) * 1e-3
    phi1 = 2.0 * np.pi * (lam - lam_res1) / cfg.ring1.fsr_nm
    phi2 = 2.0 * np.pi * (lam - lam_res2) / cfg.ring2.fsr_nm
    thru = thru_gain(phi1, cfg.ring1.self_coupling_thru,
                     cfg.ring1.self_coupling_drop, cfg.ring1.round_trip_amplitude)
    drop = drop_gain(phi2, cfg.ring2.self_coupling_thru,
                     cfg.ring2.self_coupling_drop, cfg.ring2.round_trip_amplitude)
    return thru, drop


def port_powers(cfg: LinkConfig, v_drive):
    """Quasi-static (P_thru, P_drop) in mW at drive voltage(s) `v_drive`."""
    lam1, lam2 = _ring_wavelengths(cfg)
    p2_inject = (cfg.laser2.power_mw if cfg.laser2 is not None else cfg.laser1.power_mw)
    p_thru = cfg.laser1.power_mw * _gain1(cfg, lam1, v_drive)
    p_drop = cfg.drop_power_weight * p2_inject * _gain2(cfg, lam2, v_drive)
    if cfg.include_crosstalk and cfg.topology == SINGLE_FIBER:
        # Each ring also responds (incoherently) at the other laser's wavelength.
        p_thru = p_thru + cfg.laser2.power_mw * _gain1(cfg, lam2, v_drive)
        p_drop = p_drop + cfg.drop_power_weight * cfg.laser1.power_mw * _gain2(cfg, lam1, v_drive)
    return p_thru, p_drop


def summed_gain(cfg: LinkConfig, v_drive):
    """(P_thru + P_drop) / P_in with P_in the per-ring injected power."""
    p_thru, p_drop = port_powers(cfg, v_drive)
    return (p_thru + p_drop) / cfg.laser1.power_mw


def summed_gain_fn(cfg: LinkConfig):
    """Vectorized drive-to-summed-gain callable for the metrology layer."""
    return lambda v: summed_gain(cfg, v)


def notch_gain_fn(cfg: LinkConfig):
    """Drive-to-gain callable of the notch path alone (conventional MRM link)."""
    lam1, _ = _ring_wavelengths(cfg)
    return lambda v: _gain1(cfg, lam1, v)


def _circular_delay(x: np.ndarray, delay_samples: float) -> np.ndarray:
    """Exact band-limited circular shift of a periodic record."""
    if delay_samples == 0.0:
        return x
    n = len(x)
    k = np.fft.fftfreq(n, d=1.0 / n)
    spectrum = np.fft.fft(x) * np.exp(-2j * np.pi * k * delay_samples / n)
    return np.fft.ifft(spectrum).real


@dataclass(frozen=True)
class LinkOutput:
    """TIA output voltage record plus analysis bookkeeping."""

    samples: np.ndarray
    sample_rate_ghz: float
    edge_guard: int  # leading/trailing samples touched by the wrap of the delay


def simulate_link(cfg: LinkConfig, drive: DriveWaveform) -> LinkOutput:
    """Run a drive waveform through the link and return the TIA output [V].

    Only the differential path delay is applied (common-mode latency is
    dropped); with equal fiber delays the output is bitwise identical to
    the undelayed summation.
    """
    v = np.asarray(drive.samples, dtype=float)
    if v.size < 16:
        raise InvalidArgumentError("drive must contain at least 16 samples")
    if drive.sample_rate_ghz <= 0:
        raise InvalidArgumentError("time-domain simulation needs a positive sample rate")
    p_thru, p_drop = port_powers(cfg, v)
    common = min(cfg.fiber_delay_thru_ps, cfg.fiber_delay_drop_ps)
    d_thru = (cfg.fiber_delay_thru_ps - common) * drive.sample_rate_ghz * 1e-3
    d_drop = (cfg.fiber_delay_drop_ps - common) * drive.sample_rate_ghz * 1e-3
    if max(d_thru, d_drop) > 0.1 * v.size:
        raise InvalidArgumentError("differential delay exceeds 10% of the record length")
    p_sum = _circular_delay(p_thru, d_thru) + _circular_delay(p_drop, d_drop)
    v_out = cfg.tia_transimpedance_v_a * cfg.pd_responsivity_a_w * 1e-3 * p_sum
    if cfg.lowpass_cutoff_ghz is not None:
        n = v_out.size
        f = np.fft.fftfreq(n, d=1.0 / drive.sample_rate_ghz)
        v_out = np.fft.ifft(np.fft.fft(v_out) / (1.0 + 1j * f / cfg.lowpass_cutoff_ghz)).real
    edge_guard = int(np.ceil(max(d_thru, d_drop)))
    return LinkOutput(v_out, drive.sample_rate_ghz, edge_guard)
