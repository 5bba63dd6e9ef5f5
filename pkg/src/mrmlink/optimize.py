"""Design-space search for the dual-ring linearity enhancement.

The canonical search mirrors the identical-devices setting: the two
heater detunings misalign the notch and the peak, and everything else
is opt-in (ring-2 coupling coefficients, drop-path power weight).  The
objective (windowed INL, or IMD3 for the dynamic case) is piecewise
smooth with kinks where the window crossing reassigns, so the search is
a coarse deterministic grid multistart followed by Nelder-Mead
refinement.  No randomness anywhere: identical configs give identical
results.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import metrics
from .actuation import make_two_tone
from .errors import InfeasibleSearchError, InvalidArgumentError, WindowUnreachableError
from .link import LinkConfig, notch_gain_fn, summed_gain_fn

FREE_PARAM_NAMES = (
    "ring1.heater_detuning",
    "ring2.heater_detuning",
    "ring2.self_coupling_thru",
    "ring2.self_coupling_drop",
    "drop_power_weight",
)

INFEASIBLE_PENALTY = 1e6


@dataclass(frozen=True)
class SearchSpec:
    """Free parameters with box bounds, objective choice, evaluation budget."""

    free_params: dict            # name -> (lo, hi)
    objective: str = "inl_pp"    # or "imd3_dbc"
    budget: int = 2000
    grid_points: int = 8
    n_starts: int = 4
    response: str = "summed"     # or "thru_only" for the notch-only baseline
    window: tuple = metrics.DEFAULT_WINDOW
    transfer_points: int = 513
    two_tone: dict = field(default_factory=lambda: {
        "f1_ghz": 7.9, "f2_ghz": 8.1, "sample_rate_ghz": 64.0, "n_samples": 640})

    def __post_init__(self) -> None:
        if not self.free_params:
            raise InvalidArgumentError("at least one free parameter is required")
        for name, (lo, hi) in self.free_params.items():
            if name not in FREE_PARAM_NAMES:
                raise InvalidArgumentError(f"unknown free parameter {name!r}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InvalidArgumentError(f"bounds for {name!r} must be finite with lo < hi")
        if self.objective not in ("inl_pp", "imd3_dbc"):
            raise InvalidArgumentError(f"unknown objective {self.objective!r}")
        if self.budget < 50:
            raise InvalidArgumentError("budget must be >= 50")
        if self.response not in ("summed", "thru_only"):
            raise InvalidArgumentError(f"unknown response {self.response!r}")


def apply_params(cfg: LinkConfig, params: dict) -> LinkConfig:
    """Return a copy of `cfg` with the named search parameters overridden."""
    out = cfg
    for name, value in params.items():
        if name == "ring1.heater_detuning":
            out = replace(out, op1=replace(out.op1, heater_detuning_pm=float(value)))
        elif name == "ring2.heater_detuning":
            out = replace(out, op2=replace(out.op2, heater_detuning_pm=float(value)))
        elif name == "ring2.self_coupling_thru":
            out = replace(out, ring2=replace(out.ring2, self_coupling_thru=float(value)))
        elif name == "ring2.self_coupling_drop":
            out = replace(out, ring2=replace(out.ring2, self_coupling_drop=float(value)))
        elif name == "drop_power_weight":
            out = replace(out, drop_power_weight=float(value))
        else:
            raise InvalidArgumentError(f"unknown free parameter {name!r}")
    return out


def _gain_fn(cfg: LinkConfig, response: str):
    return summed_gain_fn(cfg) if response == "summed" else notch_gain_fn(cfg)


def evaluate_inl(cfg: LinkConfig, spec: SearchSpec) -> tuple[float, float]:
    """(INL_pp, delta_v_fs) of the windowed response; raises when unreachable."""
    fn = _gain_fn(cfg, spec.response)
    curve = metrics.static_transfer(fn, cfg.op1.v_min, cfg.op1.v_max, spec.transfer_points)
    windowed = metrics.fs_window(curve, *spec.window)
    return metrics.inl(windowed).inl_pp, windowed.delta_v_fs


def evaluate_imd3(cfg: LinkConfig, spec: SearchSpec) -> float:
    """IMD3 [dBc] of a two-tone stimulus spanning the windowed electrical span."""
    fn = _gain_fn(cfg, spec.response)
    curve = metrics.static_transfer(fn, cfg.op1.v_min, cfg.op1.v_max, spec.transfer_points)
    windowed = metrics.fs_window(curve, *spec.window)
    v_lo, v_hi = sorted((windowed.v_lo_volts, windowed.v_hi_volts))
    tt = spec.two_tone
    drive = make_two_tone(cfg.op1, tt["f1_ghz"], tt["f2_ghz"],
                          tt["sample_rate_ghz"], tt["n_samples"],
                          amplitude_v=(v_hi - v_lo) / 4.0,
                          center_v=0.5 * (v_lo + v_hi))
    y = fn(drive.samples)
    report = metrics.two_tone_analysis(y, tt["sample_rate_ghz"], tt["f1_ghz"], tt["f2_ghz"])
    return report.imd3_dbc


class _Budget(Exception):
    pass


@dataclass
class OptimizeResult:
    params: dict
    objective: float
    n_evaluations: int
    trace: list                   # (params tuple, objective) in evaluation order
    before: float                 # objective at the incoming config
    feasible_before: bool


def _objective_value(cfg: LinkConfig, spec: SearchSpec) -> float:
    try:
        if spec.objective == "inl_pp":
            return evaluate_inl(cfg, spec)[0]
        return evaluate_imd3(cfg, spec)
    except WindowUnreachableError:
        return INFEASIBLE_PENALTY


def optimize(cfg: LinkConfig, spec: SearchSpec) -> OptimizeResult:
    """Grid multistart + Nelder-Mead refinement under a hard evaluation cap.

    Deterministic; never returns a point worse than the best grid seed.
    Raises InfeasibleSearchError when the window is unreachable at every
    grid seed.
    """
    names = sorted(spec.free_params)
    bounds = np.array([spec.free_params[n] for n in names], dtype=float)
    span = bounds[:, 1] - bounds[:, 0]

    state = {"count": 0, "best": None, "trace": []}

    def eval_unit(x_unit: np.ndarray) -> float:
        if state["count"] >= spec.budget:
            raise _Budget()
        x_unit = np.clip(x_unit, 0.0, 1.0)
        x = bounds[:, 0] + span * x_unit
        value = _objective_value(apply_params(cfg, dict(zip(names, x))), spec)
        state["count"] += 1
        key = tuple(float(v) for v in x)
        state["trace"].append((key, value))
        best = state["best"]
        if best is None or value < best[1] or (value == best[1] and key < best[0]):
            state["best"] = (key, value)
        return value

    try:
        before = _objective_value(cfg, spec)
    except InvalidArgumentError:
        before = INFEASIBLE_PENALTY
    feasible_before = before < INFEASIBLE_PENALTY

    axes = [np.linspace(0.0, 1.0, spec.grid_points)] * len(names)
    seeds = []
    try:
        for point in itertools.product(*axes):
            x = np.array(point)
            seeds.append((eval_unit(x), tuple(point)))
    except _Budget:
        pass
    feasible = [s for s in seeds if s[0] < INFEASIBLE_PENALTY]
    if not feasible:
        raise InfeasibleSearchError("gain window unreachable at every grid seed")
    feasible.sort(key=lambda s: (s[0], s[1]))
    try:
        for _, start in feasible[:spec.n_starts]:
            remaining = spec.budget - state["count"]
            if remaining <= 0:
                break
            minimize(eval_unit, np.array(start), method="Nelder-Mead",
                     options={"maxfev": remaining, "xatol": 1e-6, "fatol": 0.0,
                              "maxiter": 10 * remaining})
    except _Budget:
        pass
    best_key, best_val = state["best"]
    return OptimizeResult(dict(zip(names, best_key)), best_val,
                          state["count"], state["trace"], before, feasible_before)


@dataclass(frozen=True)
class SweepRow:
    params: dict
    inl_pp: float        # nan when the window is unreachable
    delta_v_fs: float    # nan when the window is unreachable
    reachable: bool


def grid_sweep(cfg: LinkConfig, grids: dict, spec: SearchSpec | None = None,
               max_rows: int = 10**6) -> list[SweepRow]:
    """Exhaustive evaluation over a parameter grid, rows in lexicographic order.

    Unreachable-window rows are flagged, never dropped.
    """
    if spec is None:
        free = {}
        for name, values in grids.items():
            vals = [float(v) for v in values]
            lo, hi = min(vals), max(vals)
            free[name] = (lo, hi if hi > lo else lo + 1.0)
        spec = SearchSpec(free_params=free)
    names = sorted(grids)
    for name in names:
        if name not in FREE_PARAM_NAMES:
            raise InvalidArgumentError(f"unknown sweep parameter {name!r}")
    axes = [np.asarray(grids[n], dtype=float) for n in names]
    total = int(np.prod([a.size for a in axes])) if axes else 0
    if total > max_rows:
        raise InvalidArgumentError(f"grid size {total} exceeds the cap of {max_rows}")
    rows = []
    for point in itertools.product(*axes):
        params = dict(zip(names, (float(p) for p in point)))
        try:
            inl_pp, dv = evaluate_inl(apply_params(cfg, params), spec)
            rows.append(SweepRow(params, inl_pp, dv, True))
        except WindowUnreachableError:
            rows.append(SweepRow(params, float("nan"), float("nan"), False))
    return rows
