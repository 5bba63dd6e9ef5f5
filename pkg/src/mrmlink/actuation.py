"""Electrical control mapping and drive-waveform generation.

Two control knobs move a ring's resonance along the wavelength axis: a
static heater detuning (expressed directly in pm) and a high-speed
reverse-bias drive, linearized to a single pm/V slope so that every
nonlinearity observed downstream is attributable to the resonator
transfer function itself.  An optional quadratic term is accepted for
sensitivity studies and defaults to zero.

All waveforms are deterministic.  PAM symbol streams come from numpy's
default PCG64 generator seeded explicitly; the generator name and seed
travel with the waveform metadata for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

PRNG_NAME = "numpy-PCG64"


@dataclass(frozen=True)
class OperatingPoint:
    """Static bias state and electrical full scale of one ring drive."""

    heater_detuning_pm: float = 0.0
    bias_tuning_coeff_pm_per_v: float = 10.0
    v_min: float = 0.0
    v_max: float = 1.0
    quadratic_coeff_pm_per_v2: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.heater_detuning_pm, self.bias_tuning_coeff_pm_per_v,
                self.v_min, self.v_max, self.quadratic_coeff_pm_per_v2)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgumentError("OperatingPoint fields must be finite")
        if not self.v_min < self.v_max:
            raise InvalidArgumentError(f"v_min must be < v_max, got [{self.v_min}, {self.v_max}]")


def resonance_shift(op: OperatingPoint, v_drive):
    """Resonance wavelength shift [pm] at drive voltage(s) `v_drive`.

    Affine in the drive for the default zero quadratic coefficient:
    shift = heater + k * v.
    """
    v = np.asarray(v_drive, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError("v_drive must be finite")
    shift = (op.heater_detuning_pm + op.bias_tuning_coeff_pm_per_v * v
             + op.quadratic_coeff_pm_per_v2 * v * v)
    return shift if shift.ndim else float(shift)


@dataclass(frozen=True)
class DriveWaveform:
    """A sampled drive voltage sequence plus its generation metadata."""

    samples: np.ndarray
    sample_rate_ghz: float
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))


def _check_fs(samples: np.ndarray, op: OperatingPoint) -> None:
    eps = 1e-12 * max(1.0, abs(op.v_min), abs(op.v_max))
    if samples.min() < op.v_min - eps or samples.max() > op.v_max + eps:
        raise InvalidArgumentError("generated waveform exceeds the electrical full scale")


def make_ramp(op: OperatingPoint, n_points: int) -> DriveWaveform:
    """N equally spaced drive values spanning [v_min, v_max]."""
    if n_points < 2:
        raise InvalidArgumentError("ramp needs at least 2 points")
    samples = np.linspace(op.v_min, op.v_max, n_points)
    return DriveWaveform(samples, 0.0, "ramp", {"n_points": n_points})


def _tone_bin(f_ghz: float, sample_rate_ghz: float, n_samples: int) -> int:
    k = f_ghz * n_samples / sample_rate_ghz
    k_round = round(k)
    if abs(k - k_round) > 1e-9 * max(1.0, abs(k)):
        raise InvalidArgumentError(
            f"tone {f_ghz} GHz is not coherently sampled: bin {k} is not an integer")
    return int(k_round)


def make_two_tone(op: OperatingPoint, f1_ghz: float, f2_ghz: float,
                  sample_rate_ghz: float, n_samples: int,
                  amplitude_v: float | None = None,
                  center_v: float | None = None) -> DriveWaveform:
    """Coherently sampled equal-amplitude two-tone drive.

    v(t) = center + A*(sin(2*pi*f1*t) + sin(2*pi*f2*t)); the center
    defaults to mid-scale and A to a quarter of the electrical full
    scale so the peak excursion 2A fills half of it.  Both tone
    frequencies must land on exact integer DFT bins (no windowing is
    used anywhere downstream).
    """
    if f1_ghz == f2_ghz:
        raise InvalidArgumentError("two-tone frequencies must differ")
    if sample_rate_ghz <= 2.0 * max(f1_ghz, f2_ghz):
        raise InvalidArgumentError("sample rate must exceed twice the highest tone frequency")
    k1 = _tone_bin(f1_ghz, sample_rate_ghz, n_samples)
    k2 = _tone_bin(f2_ghz, sample_rate_ghz, n_samples)
    fs_span = op.v_max - op.v_min
    if center_v is None:
        center_v = 0.5 * (op.v_min + op.v_max)
    if amplitude_v is None:
        amplitude_v = fs_span / 4.0
    if amplitude_v <= 0:
        raise InvalidArgumentError("amplitude must be positive")
    if center_v - 2.0 * amplitude_v < op.v_min - 1e-12 or center_v + 2.0 * amplitude_v > op.v_max + 1e-12:
        raise InvalidArgumentError("two-tone excursion overflows the electrical full scale")
    t = np.arange(n_samples) / sample_rate_ghz
    samples = center_v + amplitude_v * (np.sin(2 * np.pi * f1_ghz * t)
                                        + np.sin(2 * np.pi * f2_ghz * t))
    _check_fs(samples, op)
    return DriveWaveform(samples, sample_rate_ghz, "two_tone",
                         {"f1_ghz": f1_ghz, "f2_ghz": f2_ghz, "bin1": k1, "bin2": k2,
                          "amplitude_v": amplitude_v, "center_v": center_v})


def make_pam(op: OperatingPoint, n_levels: int, n_symbols: int,
             oversampling: int, sample_rate_ghz: float, seed: int,
             v_lo: float | None = None, v_hi: float | None = None) -> DriveWaveform:
    """PAM-N drive: i.i.d. uniform symbols held one symbol period each.

    Levels are equally spaced over [v_lo, v_hi] (defaulting to the full
    electrical scale).  Identical seeds give bitwise identical streams.
    """
    if n_levels < 2:
        raise InvalidArgumentError("PAM needs at least 2 levels")
    if n_symbols < 1 or oversampling < 1:
        raise InvalidArgumentError("n_symbols and oversampling must be >= 1")
    if v_lo is None:
        v_lo = op.v_min
    if v_hi is None:
        v_hi = op.v_max
    if not op.v_min - 1e-12 <= v_lo < v_hi <= op.v_max + 1e-12:
        raise InvalidArgumentError("PAM level span must lie inside the electrical full scale")
    rng = np.random.default_rng(seed)
    symbols = rng.integers(0, n_levels, size=n_symbols)
    levels = np.linspace(v_lo, v_hi, n_levels)
    samples = np.repeat(levels[symbols], oversampling)
    _check_fs(samples, op)
    return DriveWaveform(samples, sample_rate_ghz, "pam",
                         {"n_levels": n_levels, "n_symbols": n_symbols,
                          "oversampling": oversampling, "seed": int(seed),
                          "prng": PRNG_NAME, "symbols": symbols,
                          "v_lo": v_lo, "v_hi": v_hi})


def make_waveform(spec: dict, op: OperatingPoint) -> DriveWaveform:
    """Dispatch a waveform spec dict (as carried by a run config)."""
    kind = spec.get("kind")
    if kind == "ramp":
        return make_ramp(op, spec["n_points"])
    if kind == "two_tone":
        return make_two_tone(op, spec["f1_ghz"], spec["f2_ghz"],
                             spec["sample_rate_ghz"], spec["n_samples"],
                             spec.get("amplitude_v"), spec.get("center_v"))
    if kind == "pam":
        return make_pam(op, spec["n_levels"], spec["n_symbols"],
                        spec["oversampling"], spec["sample_rate_ghz"], spec["seed"],
                        spec.get("v_lo"), spec.get("v_hi"))
    raise InvalidArgumentError(f"unknown waveform kind {kind!r}")
