"""Measured-spectrum ingestion and the passive-chip analysis path.

Lab validation sweeps a tunable laser instead of the electrical drive:
the through spectrum of device 1 and the drop spectrum of device 2 are
resampled onto a common wavelength grid, summed, self-normalized, and
pushed through the same window / INL pipeline as simulated transfer
curves, with wavelength standing in for the drive axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataParseError, InvalidArgumentError
from .metrics import TransferCurve

CSV_HEADER = ["wavelength_nm", "power_mw"]
MIN_ROWS = 16


@dataclass(frozen=True)
class MeasuredSpectrum:
    """One port's measured power spectrum, wavelengths strictly increasing."""

    wavelength_nm: np.ndarray
    power_mw: np.ndarray
    port: str            # "thru" | "drop"
    label: str = ""

    def __post_init__(self) -> None:
        if self.port not in ("thru", "drop"):
            raise InvalidArgumentError(f"port must be 'thru' or 'drop', got {self.port!r}")
        if self.wavelength_nm.size != self.power_mw.size:
            raise InvalidArgumentError("wavelength and power arrays must have equal length")
        if np.any(np.diff(self.wavelength_nm) <= 0):
            raise InvalidArgumentError("wavelengths must be strictly increasing")
        if np.any(self.power_mw < 0):
            raise InvalidArgumentError("powers must be non-negative")


def ingest_spectrum_csv(path, port: str, label: str = "") -> MeasuredSpectrum:
    """Parse a `wavelength_nm,power_mw` CSV into a validated spectrum.

    Errors name the offending row (1-based, header is row 1).
    """
    wavelengths, powers = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise DataParseError(f"{path}: row 1: expected header "
                                 f"'{','.join(CSV_HEADER)}', got '{','.join(header)}'")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataParseError(f"{path}: row {row_no}: expected 2 columns, got {len(row)}")
            try:
                lam, p = float(row[0]), float(row[1])
            except ValueError:
                raise DataParseError(f"{path}: row {row_no}: non-numeric value") from None
            if wavelengths and lam <= wavelengths[-1]:
                kind = "duplicate" if lam == wavelengths[-1] else "non-monotone"
                raise DataParseError(f"{path}: row {row_no}: {kind} wavelength {lam}")
            if p < 0:
                raise DataParseError(f"{path}: row {row_no}: negative power {p}")
            wavelengths.append(lam)
            powers.append(p)
    if len(wavelengths) < MIN_ROWS:
        raise DataParseError(f"{path}: {len(wavelengths)} data rows, need >= {MIN_ROWS}")
    return MeasuredSpectrum(np.array(wavelengths), np.array(powers), port, label)


def common_grid(thru: MeasuredSpectrum, drop: MeasuredSpectrum) -> np.ndarray:
    """Uniform wavelength grid over the overlap of the two sweeps.

    The point count matches the denser input, so the result is
    independent (to interpolation tolerance) of which grid is denser.
    """
    lo = max(thru.wavelength_nm[0], drop.wavelength_nm[0])
    hi = min(thru.wavelength_nm[-1], drop.wavelength_nm[-1])
    if hi <= lo:
        raise InvalidArgumentError("measured spectra do not overlap in wavelength")
    n = max(thru.wavelength_nm.size, drop.wavelength_nm.size)
    return np.linspace(lo, hi, n)


def summed_curve(thru: MeasuredSpectrum, drop: MeasuredSpectrum) -> TransferCurve:
    """Resample, sum and self-normalize the two measured port spectra.

    The wavelength axis plays the role of the drive sweep; absolute
    power units cancel in the normalization (both ports are assumed to
    be recorded in the same units).
    """
    if thru.port != "thru" or drop.port != "drop":
        raise InvalidArgumentError("summed_curve takes (thru, drop) in that order")
    grid = common_grid(thru, drop)
    total = (np.interp(grid, thru.wavelength_nm, thru.power_mw)
             + np.interp(grid, drop.wavelength_nm, drop.power_mw))
    lo, hi = total.min(), total.max()
    if hi - lo <= 0:
        raise InvalidArgumentError("summed measured spectrum is flat")
    gain_norm = (total - lo) / (hi - lo)
    axis_norm = (grid - grid[0]) / (grid[-1] - grid[0])
    return TransferCurve(axis_norm, gain_norm, grid, total)
