"""Closed-form power-gain model of a ring / racetrack resonator.

A single resonator coupled to one bus (all-pass) or two buses (add-drop)
has the standard power transfer functions

    T(phi) = (r2^2 a^2 - 2 r1 r2 a cos(phi) + r1^2)
             / (1 - 2 r1 r2 a cos(phi) + (r1 r2 a)^2)        (through port)

    D(phi) = (1 - r1^2)(1 - r2^2) a
             / (1 - 2 r1 r2 a cos(phi) + (r1 r2 a)^2)        (drop port)

where r1, r2 are the field self-coupling coefficients of the two
couplers (r2 = 1 means no drop coupler), a is the per-round-trip field
amplitude transmission, and phi is the round-trip phase.  Near one
resonance the phase is modelled to first order in wavelength,
phi = 2*pi*(lam - lam_res)/FSR with FSR = lam^2/(n_g * L).

Racetracks use the same model; they only differ in round-trip length and
coupling values.

References:
    Bogaerts, W. et al., "Silicon microring resonators,"
    Laser Photon. Rev. 6, 47-73 (2012).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResponseError, InvalidArgumentError


@dataclass(frozen=True)
class RingDevice:
    """Geometry, coupling and loss of one ring or racetrack resonator.

    Parameters
    ----------
    round_trip_length_um : float
        Round-trip length L [um]. For a circular ring of radius R this
        is 2*pi*R; racetracks supply it directly.
    group_index : float
        Group index n_g (dimensionless).
    resonance_wavelength_nm : float
        Resonance wavelength at zero heater detuning and zero drive [nm].
    self_coupling_thru : float
        Input-bus coupler field transmission r1, in (0, 1).
    self_coupling_drop : float
        Drop-bus coupler field transmission r2, in (0, 1]. r2 = 1 means
        no drop coupler (pure all-pass notch device).
    round_trip_amplitude : float
        Per-round-trip field amplitude transmission a, in (0, 1].
    """

    round_trip_length_um: float
    group_index: float
    resonance_wavelength_nm: float
    self_coupling_thru: float
    self_coupling_drop: float = 1.0
    round_trip_amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.round_trip_length_um) and self.round_trip_length_um > 0):
            raise InvalidArgumentError(f"round_trip_length_um must be > 0, got {self.round_trip_length_um}")
        if not (math.isfinite(self.group_index) and self.group_index > 0):
            raise InvalidArgumentError(f"group_index must be > 0, got {self.group_index}")
        if not (math.isfinite(self.resonance_wavelength_nm) and self.resonance_wavelength_nm > 0):
            raise InvalidArgumentError(f"resonance_wavelength_nm must be > 0, got {self.resonance_wavelength_nm}")
        if not 0 < self.self_coupling_thru < 1:
            raise InvalidArgumentError(f"self_coupling_thru must be in (0, 1), got {self.self_coupling_thru}")
        if not 0 < self.self_coupling_drop <= 1:
            raise InvalidArgumentError(f"self_coupling_drop must be in (0, 1], got {self.self_coupling_drop}")
        if not 0 < self.round_trip_amplitude <= 1:
            raise InvalidArgumentError(f"round_trip_amplitude must be in (0, 1], got {self.round_trip_amplitude}")

    @property
    def fsr_nm(self) -> float:
        """Free spectral range lam^2/(n_g*L) at the device resonance [nm]."""
        length_nm = self.round_trip_length_um * 1e3
        return self.resonance_wavelength_nm**2 / (self.group_index * length_nm)


def fsr(device: RingDevice, wavelength_nm: float | None = None) -> float:
    """Free spectral range in picometers, evaluated at `wavelength_nm`.

    Defaults to the device's own resonance wavelength.
    """
    lam = device.resonance_wavelength_nm if wavelength_nm is None else wavelength_nm
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidArgumentError(f"wavelength must be > 0, got {lam}")
    length_nm = device.round_trip_length_um * 1e3
    return lam**2 / (device.group_index * length_nm) * 1e3


def round_trip_phase(wavelength_nm, device: RingDevice, resonance_nm: float):
    """Round-trip phase of light at `wavelength_nm` for a resonance at `resonance_nm`.

    First-order dispersion model: phi = 2*pi*(lam - lam_res)/FSR, exact
    zero on resonance and affine in wavelength.  Accepts scalars or
    arrays of wavelength.  Warns when evaluated more than one FSR away
    from the device's nominal resonance, where the first-order model
    degrades.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    if not (np.all(np.isfinite(lam)) and math.isfinite(resonance_nm)):
        raise InvalidArgumentError("wavelengths must be finite")
    fsr_local = resonance_nm**2 / (device.group_index * device.round_trip_length_um * 1e3)
    far = np.abs(lam - device.resonance_wavelength_nm) > device.fsr_nm
    if np.any(far) or abs(resonance_nm - device.resonance_wavelength_nm) > device.fsr_nm:
        warnings.warn("round_trip_phase evaluated beyond one FSR from the nominal "
                      "resonance; first-order dispersion model may be inaccurate",
                      stacklevel=2)
    phi = 2.0 * np.pi * (lam - resonance_nm) / fsr_local
    return phi if phi.ndim else float(phi)


def _check_coupling(r1: float, r2: float, a: float) -> None:
    if not 0 < r1 < 1:
        raise InvalidArgumentError(f"r1 must be in (0, 1), got {r1}")
    if not 0 < r2 <= 1:
        raise InvalidArgumentError(f"r2 must be in (0, 1], got {r2}")
    if not 0 < a <= 1:
        raise InvalidArgumentError(f"a must be in (0, 1], got {a}")


def thru_gain(phi, r1: float, r2: float = 1.0, a: float = 1.0):
    """Through-port (notch) power gain T(phi) in [0, 1].

    With r2 = 1 this reduces to the all-pass notch response; r1 = a then
    gives the critical-coupling null T(0) = 0.
    """
    _check_coupling(r1, r2, a)
    phi = np.asarray(phi, dtype=float)
    cos_phi = np.cos(phi)
    num = (r2 * a) ** 2 - 2.0 * r1 * r2 * a * cos_phi + r1**2
    den = 1.0 - 2.0 * r1 * r2 * a * cos_phi + (r1 * r2 * a) ** 2
    t = num / den
    return t if t.ndim else float(t)


def drop_gain(phi, r1: float, r2: float, a: float = 1.0):
    """Drop-port (bandpass) power gain D(phi) in [0, 1], peaking at phi = 0."""
    _check_coupling(r1, r2, a)
    phi = np.asarray(phi, dtype=float)
    num = (1.0 - r1**2) * (1.0 - r2**2) * a
    den = 1.0 - 2.0 * r1 * r2 * a * np.cos(phi) + (r1 * r2 * a) ** 2
    d = num / den
    return d if d.ndim else float(d)


def loaded_q(device: RingDevice, rel_tol: float = 1e-10) -> float:
    """Loaded quality factor Q = lam_res / FWHM of the through-port notch.

    The full width is taken at the midpoint between the on-resonance
    gain T(0) and the anti-resonance gain T(pi) and located by bisection
    in phase, so the result stays correct if the transfer forms are
    extended.  Raises DegenerateResponseError when the response is flat
    (no resolvable notch, e.g. a = 1 with r2 = 1).
    """
    r1, r2, a = device.self_coupling_thru, device.self_coupling_drop, device.round_trip_amplitude
    t0 = thru_gain(0.0, r1, r2, a)
    t_pi = thru_gain(np.pi, r1, r2, a)
    contrast = t_pi - t0
    if contrast <= 1e-15:
        raise DegenerateResponseError("through-port response is flat; Q is undefined")
    mid = 0.5 * (t0 + t_pi)
    # T is monotone in phi on [0, pi] (monotone in cos phi), so bisection is exact.
    lo, hi = 0.0, np.pi
    while hi - lo > rel_tol * max(hi, 1e-300):
        m = 0.5 * (lo + hi)
        if thru_gain(m, r1, r2, a) < mid:
            lo = m
        else:
            hi = m
    phi_half = 0.5 * (lo + hi)
    fwhm_nm = (2.0 * phi_half / (2.0 * np.pi)) * device.fsr_nm
    return device.resonance_wavelength_nm / fwhm_nm


def fwhm_pm(device: RingDevice) -> float:
    """Full width at half depth of the through-port notch [pm]."""
    return device.resonance_wavelength_nm / loaded_q(device) * 1e3
