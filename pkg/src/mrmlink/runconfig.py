"""Strict JSON run-configuration loading.

The config file is the single reproducibility record: loading resolves
every default, re-checks every physical invariant, and the fully
resolved dict is echoed into each emitted report so that a report can be
re-run bit-for-bit.  Unknown keys are rejected (no silent typo
absorption of physics parameters).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .actuation import OperatingPoint
from .errors import ConfigError, InvalidArgumentError
from .link import SINGLE_FIBER, TWO_FIBER, LaserSpec, LinkConfig
from .optimize import SearchSpec
from .resonator import RingDevice

_RING_DEFAULTS = {
    "round_trip_length_um": 188.5,
    "group_index": 4.0,
    "resonance_wavelength_nm": 1310.0,
    "self_coupling_thru": 0.9,
    "self_coupling_drop": 0.9,
    "round_trip_amplitude": 0.95,
    "heater_detuning_pm": 0.0,
    "bias_tuning_coeff_pm_per_v": 150.0,
    "quadratic_coeff_pm_per_v2": 0.0,
    "v_min": 0.0,
    "v_max": 2.0,
}

_TOP_DEFAULTS = {
    "topology": TWO_FIBER,
    "laser1": {"wavelength_nm": 1310.0, "power_mw": 1.0},
    "laser2": None,
    "fiber_delay_thru_ps": 0.0,
    "fiber_delay_drop_ps": 0.0,
    "pd_responsivity_a_w": 0.8,
    "tia_transimpedance_v_a": 1000.0,
    "drop_power_weight": 1.0,
    "min_spacing_linewidths": 5.0,
    "include_crosstalk": False,
    "lowpass_cutoff_ghz": None,
    "window": [0.25, 0.75],
    "transfer_points": 513,
    "two_tone": {"f1_ghz": 7.9, "f2_ghz": 8.1, "sample_rate_ghz": 64.0,
                 "n_samples": 640, "amplitude_v": None},
    "pam": {"levels": 8, "n_symbols": 512, "oversampling": 16,
            "sample_rate_ghz": 64.0, "raster_bins_t": 64, "raster_bins_v": 64},
    "optimizer": {"free_params": {"ring1.heater_detuning": [-600.0, 300.0],
                                  "ring2.heater_detuning": [-600.0, 300.0]},
                  "objective": "inl_pp", "budget": 2000,
                  "grid_points": 8, "n_starts": 4},
    "plot": {"width_in": 6.4, "height_in": 4.8},
    "seed": 20260825,
    "output_dir": "out",
}


def _merge(defaults, given, path):
    """Fill defaults into `given`, rejecting keys absent from `defaults`."""
    if given is None:
        return json.loads(json.dumps(defaults))
    if not isinstance(given, dict):
        raise ConfigError(f"{path}: expected an object")
    out = {}
    for key in given:
        if key not in defaults:
            raise ConfigError(f"unknown key '{path}{key}'")
    for key, default in defaults.items():
        value = given.get(key, default)
        if isinstance(default, dict) and key != "free_params":
            value = _merge(default, given.get(key), f"{path}{key}.")
        out[key] = json.loads(json.dumps(value))
    return out


@dataclass(frozen=True)
class RunConfig:
    """A validated link config plus analysis settings and the resolved echo."""

    link: LinkConfig
    window: tuple
    transfer_points: int
    two_tone: dict
    pam: dict
    search: SearchSpec
    plot: dict
    seed: int
    output_dir: str
    resolved: dict     # exact dict that reproduces this RunConfig


def resolve(raw: dict) -> dict:
    """Apply defaults and strict-key checking; return the resolved dict."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    for key in raw:
        if key not in _TOP_DEFAULTS and key not in ("ring1", "ring2"):
            raise ConfigError(f"unknown key '{key}'")
    out = _merge(_TOP_DEFAULTS, {k: v for k, v in raw.items() if k in _TOP_DEFAULTS}, "")
    out["ring1"] = _merge(_RING_DEFAULTS, raw.get("ring1"), "ring1.")
    out["ring2"] = _merge(_RING_DEFAULTS, raw.get("ring2"), "ring2.")
    return out


def _build_ring(block: dict, path: str) -> tuple[RingDevice, OperatingPoint]:
    try:
        device = RingDevice(
            round_trip_length_um=block["round_trip_length_um"],
            group_index=block["group_index"],
            resonance_wavelength_nm=block["resonance_wavelength_nm"],
            self_coupling_thru=block["self_coupling_thru"],
            self_coupling_drop=block["self_coupling_drop"],
            round_trip_amplitude=block["round_trip_amplitude"])
        op = OperatingPoint(
            heater_detuning_pm=block["heater_detuning_pm"],
            bias_tuning_coeff_pm_per_v=block["bias_tuning_coeff_pm_per_v"],
            v_min=block["v_min"], v_max=block["v_max"],
            quadratic_coeff_pm_per_v2=block["quadratic_coeff_pm_per_v2"])
    except InvalidArgumentError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return device, op


def from_dict(raw: dict) -> RunConfig:
    resolved = resolve(raw)
    ring1, op1 = _build_ring(resolved["ring1"], "ring1")
    ring2, op2 = _build_ring(resolved["ring2"], "ring2")
    laser2 = None
    if resolved["laser2"] is not None:
        l2 = _merge({"wavelength_nm": 1310.0, "power_mw": 1.0}, resolved["laser2"], "laser2.")
        resolved["laser2"] = l2
        laser2 = LaserSpec(l2["wavelength_nm"], l2["power_mw"])
    try:
        link = LinkConfig(
            ring1=ring1, op1=op1, ring2=ring2, op2=op2,
            laser1=LaserSpec(resolved["laser1"]["wavelength_nm"],
                             resolved["laser1"]["power_mw"]),
            laser2=laser2,
            topology=resolved["topology"],
            fiber_delay_thru_ps=resolved["fiber_delay_thru_ps"],
            fiber_delay_drop_ps=resolved["fiber_delay_drop_ps"],
            pd_responsivity_a_w=resolved["pd_responsivity_a_w"],
            tia_transimpedance_v_a=resolved["tia_transimpedance_v_a"],
            drop_power_weight=resolved["drop_power_weight"],
            min_spacing_linewidths=resolved["min_spacing_linewidths"],
            include_crosstalk=resolved["include_crosstalk"],
            lowpass_cutoff_ghz=resolved["lowpass_cutoff_ghz"])
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from exc
    window = resolved["window"]
    if (not isinstance(window, list) or len(window) != 2
            or not 0 <= window[0] < window[1] <= 1):
        raise ConfigError(f"window: must be [g_lo, g_hi] with 0 <= g_lo < g_hi <= 1, got {window}")
    opt = resolved["optimizer"]
    try:
        search = SearchSpec(
            free_params={k: (float(v[0]), float(v[1])) for k, v in opt["free_params"].items()},
            objective=opt["objective"], budget=opt["budget"],
            grid_points=opt["grid_points"], n_starts=opt["n_starts"],
            window=tuple(window), transfer_points=resolved["transfer_points"],
            two_tone={k: resolved["two_tone"][k]
                      for k in ("f1_ghz", "f2_ghz", "sample_rate_ghz", "n_samples")})
    except (InvalidArgumentError, KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"optimizer: {exc}") from exc
    if not isinstance(resolved["seed"], int):
        raise ConfigError(f"seed: must be an integer, got {resolved['seed']!r}")
    return RunConfig(link=link, window=tuple(window),
                     transfer_points=resolved["transfer_points"],
                     two_tone=resolved["two_tone"], pam=resolved["pam"],
                     search=search, plot=resolved["plot"],
                     seed=resolved["seed"], output_dir=resolved["output_dir"],
                     resolved=resolved)


def load_config(path) -> RunConfig:
    """Load, validate and default-resolve a JSON run config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return from_dict(raw)
