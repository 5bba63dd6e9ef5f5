import importlib

import numpy as np
import pytest

# the package re-exports the optimize() function under the same name as
# this submodule, so fetch the module explicitly for monkeypatching
optimize_mod = importlib.import_module("mrmlink.optimize")
from mrmlink.errors import InfeasibleSearchError, InvalidArgumentError
from mrmlink.optimize import (INFEASIBLE_PENALTY, SearchSpec, apply_params,
                              evaluate_inl, grid_sweep, optimize)

DETUNE_SPEC = SearchSpec(
    free_params={"ring1.heater_detuning": (-600.0, 300.0),
                 "ring2.heater_detuning": (-600.0, 300.0)},
    budget=2000)


class TestSearchSpec:
    def test_unknown_param_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SearchSpec(free_params={"ring1.radius": (0.0, 1.0)})

    def test_inverted_bounds_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SearchSpec(free_params={"ring1.heater_detuning": (10.0, -10.0)})

    def test_tiny_budget_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SearchSpec(free_params={"ring1.heater_detuning": (0.0, 1.0)}, budget=10)


class TestApplyParams:
    def test_round_trips_through_config(self, canonical_cfg):
        cfg = apply_params(canonical_cfg, {"ring1.heater_detuning": -42.0,
                                           "ring2.self_coupling_drop": 0.88,
                                           "drop_power_weight": 1.5})
        assert cfg.op1.heater_detuning_pm == -42.0
        assert cfg.ring2.self_coupling_drop == 0.88
        assert cfg.drop_power_weight == 1.5
        assert canonical_cfg.op1.heater_detuning_pm != -42.0  # original untouched


class TestOptimize:
    def test_convex_synthetic_converges(self, canonical_cfg, monkeypatch):
        # quadratic bowl in the detuning alone; minimum at x = 0.3
        def fake_objective(cfg, spec):
            return (cfg.op1.heater_detuning_pm - 0.3) ** 2

        monkeypatch.setattr(optimize_mod, "_objective_value", fake_objective)
        spec = SearchSpec(free_params={"ring1.heater_detuning": (0.0, 1.0)},
                          budget=500)
        result = optimize(canonical_cfg, spec)
        assert result.params["ring1.heater_detuning"] == pytest.approx(0.3, abs=1e-5)
        assert result.objective == pytest.approx(0.0, abs=1e-10)

    def test_budget_is_a_hard_cap(self, canonical_cfg):
        spec = SearchSpec(free_params=DETUNE_SPEC.free_params, budget=50,
                          transfer_points=65)
        result = optimize(canonical_cfg, spec)
        assert result.n_evaluations <= 50
        assert len(result.trace) == result.n_evaluations

    def test_deterministic(self, canonical_cfg):
        spec = SearchSpec(free_params=DETUNE_SPEC.free_params, budget=300,
                          transfer_points=129)
        a = optimize(canonical_cfg, spec)
        b = optimize(canonical_cfg, spec)
        assert a.params == b.params and a.objective == b.objective
        assert a.trace == b.trace

    def test_never_worse_than_best_seed(self, canonical_cfg):
        spec = SearchSpec(free_params=DETUNE_SPEC.free_params, budget=200,
                          transfer_points=129)
        result = optimize(canonical_cfg, spec)
        grid_best = min(v for _, v in result.trace[:spec.grid_points ** 2])
        assert result.objective <= grid_best

    def test_improves_on_canonical_start(self, canonical_cfg):
        result = optimize(canonical_cfg, SearchSpec(
            free_params=DETUNE_SPEC.free_params, budget=400, transfer_points=129))
        assert result.feasible_before
        assert result.objective <= result.before

    def test_all_seeds_infeasible_raises(self, canonical_cfg, monkeypatch):
        monkeypatch.setattr(optimize_mod, "_objective_value",
                            lambda cfg, spec: INFEASIBLE_PENALTY)
        with pytest.raises(InfeasibleSearchError):
            optimize(canonical_cfg, SearchSpec(
                free_params={"ring1.heater_detuning": (0.0, 1.0)}, budget=100))

    def test_declaration_order_invariance(self, canonical_cfg):
        fp = DETUNE_SPEC.free_params
        forward = optimize(canonical_cfg, SearchSpec(
            free_params=dict(fp), budget=200, transfer_points=129))
        reordered = optimize(canonical_cfg, SearchSpec(
            free_params=dict(reversed(list(fp.items()))), budget=200,
            transfer_points=129))
        assert forward.params == reordered.params
        assert forward.objective == reordered.objective


class TestGridSweep:
    def test_single_point_matches_direct_evaluation(self, canonical_cfg):
        rows = grid_sweep(canonical_cfg, {"ring1.heater_detuning": [86.0]})
        assert len(rows) == 1 and rows[0].reachable
        direct = evaluate_inl(canonical_cfg, SearchSpec(
            free_params={"ring1.heater_detuning": (0.0, 1.0)}))
        assert rows[0].inl_pp == direct[0]
        assert rows[0].delta_v_fs == direct[1]

    def test_rows_in_lexicographic_order(self, canonical_cfg):
        rows = grid_sweep(canonical_cfg,
                          {"ring2.heater_detuning": [-200.0, -100.0],
                           "ring1.heater_detuning": [0.0, 100.0]},
                          spec=SearchSpec(free_params=DETUNE_SPEC.free_params,
                                          transfer_points=65))
        keys = [(r.params["ring1.heater_detuning"],
                 r.params["ring2.heater_detuning"]) for r in rows]
        assert keys == sorted(keys)
        assert len(rows) == 4

    def test_unreachable_rows_flagged_not_dropped(self, canonical_cfg):
        # a strong quadratic tuning term retraces the resonance, producing a
        # W-shaped curve with no monotone run spanning the window
        from dataclasses import replace
        cfg = replace(canonical_cfg,
                      op1=replace(canonical_cfg.op1, quadratic_coeff_pm_per_v2=-400.0),
                      op2=replace(canonical_cfg.op2, quadratic_coeff_pm_per_v2=-400.0),
                      drop_power_weight=0.05)
        rows = grid_sweep(cfg,
                          {"ring1.heater_detuning": [86.0, -500.0],
                           "ring2.heater_detuning": [0.0]},
                          spec=SearchSpec(free_params=DETUNE_SPEC.free_params,
                                          transfer_points=257))
        assert len(rows) == 2
        assert any(not r.reachable and np.isnan(r.inl_pp) for r in rows)
        assert any(r.reachable for r in rows)

    def test_unknown_parameter_rejected(self, canonical_cfg):
        with pytest.raises(InvalidArgumentError):
            grid_sweep(canonical_cfg, {"ring1.radius": [1.0]})

    def test_row_cap(self, canonical_cfg):
        with pytest.raises(InvalidArgumentError):
            grid_sweep(canonical_cfg,
                       {"ring1.heater_detuning": list(range(40))},
                       max_rows=10)
