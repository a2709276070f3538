"""Objective assembly, annualization, accounting closure."""

import math

import numpy as np
import pytest
from conftest import UNIFORM, lcia, make_scenario, resource, tech
from numpy.testing import assert_allclose

from environom.indicators import COST, PROFILE_INDICATORS
from environom.lp import Status, solve
from environom.model import EndUseDemand, Layer
from environom.objectives import (
    ObjectiveError,
    UncharacterizedError,
    annualization_factor,
    breakdown,
    cost_vector,
    evaluate,
    lcia_vector,
    objective_vector,
)
from environom.problem import build_problem


class TestAnnualization:
    def test_zero_rate_limit(self):
        assert annualization_factor(0.0, 25) == pytest.approx(0.04, abs=0)

    def test_single_year(self):
        assert annualization_factor(0.03, 1) == pytest.approx(1.03, rel=1e-15)

    def test_against_discount_sum_oracle(self):
        # tau must equal 1 / sum of discount factors over the lifetime.
        for rate, n in ((0.03, 25), (0.07, 10), (0.12, 40)):
            pv = math.fsum((1.0 + rate) ** (-k) for k in range(1, n + 1))
            assert_allclose(annualization_factor(rate, n), 1.0 / pv, rtol=1e-12)

    def test_reference_value(self):
        assert_allclose(annualization_factor(0.03, 25), 0.0574279, rtol=1e-5)

    def test_domain_error(self):
        with pytest.raises(ObjectiveError):
            annualization_factor(0.03, 0.5)


class TestCostObjective:
    def test_constant_part_arithmetic(self, single_tech_scenario):
        # tau = 1/25 at zero rate: c_inv 1000, F 2, f_ext 0.5, c_maint 10
        # gives 1000 * 0.04 * 1.5 + 10 * 2 = 80.
        s = make_scenario(
            layers=[Layer("elec", "GWh")],
            demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
            resources=[],
            technologies=[tech("gen", {"elec": 1.0}, c_inv=1000.0, c_maint=10.0,
                               lifetime=25.0, f_min=2.0, f_max=2.0, f_ext=0.5)],
            discount_rate=0.0)
        ep = build_problem(s)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        assert sol.status is Status.OPTIMAL
        assert_allclose(sol.objective, 1000.0 * 0.04 * 1.5 + 10.0 * 2.0, rtol=1e-12)

    def test_no_new_investment(self):
        s = make_scenario(
            layers=[Layer("elec", "GWh")],
            demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
            resources=[],
            technologies=[tech("gen", {"elec": 1.0}, c_inv=1000.0, c_maint=7.0,
                               f_min=1.5, f_max=3.0, f_ext=1.5)])
        ep = build_problem(s)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        # F stays at f_ext: only maintenance remains.
        assert_allclose(sol.objective, 7.0 * 1.5, rtol=1e-9)

    def test_reaccounting_matches_solver(self, chain_scenario):
        ep = build_problem(chain_scenario)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        recomputed = evaluate(ep, ep.view(sol), COST)
        assert_allclose(recomputed, sol.objective, rtol=1e-9)


class TestLciaObjective:
    def test_constant_part_arithmetic(self):
        # lcia_stat 500 per unit capacity, F = 2, lifetime 25 -> 40 per year.
        s = make_scenario(
            layers=[Layer("elec", "GWh")],
            demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
            resources=[],
            technologies=[tech("gen", {"elec": 1.0}, lifetime=25.0,
                               f_min=2.0, f_max=2.0, stat=lcia(cf=500.0))])
        ep = build_problem(s)
        sol = solve(ep.lp.with_objective(*lcia_vector(ep, "CF")))
        assert_allclose(sol.objective, 40.0, rtol=1e-12)

    def test_no_operation_inventory_gives_zero_variable_part(self, chain_scenario):
        ep = build_problem(chain_scenario)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        bd = breakdown(ep, ep.view(sol), "CF")
        pv_row = next(r for r in bd.rows if r.entity == "pv")
        assert pv_row.variable == 0.0

    def test_reaccounting_matches_solver(self, chain_scenario):
        ep = build_problem(chain_scenario)
        sol = solve(ep.lp.with_objective(*lcia_vector(ep, "CF")))
        assert_allclose(evaluate(ep, ep.view(sol), "CF"), sol.objective, rtol=1e-9)

    def test_uncharacterized_technology_is_an_error(self, chain_scenario):
        s = chain_scenario
        bare = tech("mystery", {"elec": 1.0})
        object.__setattr__(bare, "lcia_stat", {})
        object.__setattr__(bare, "lcia_var", {})
        dirty = make_scenario(layers=s.layers, demands=s.demands,
                              resources=s.resources,
                              technologies=list(s.technologies) + [bare])
        ep = build_problem(dirty)
        with pytest.raises(UncharacterizedError, match="mystery"):
            lcia_vector(ep, "CF")

    def test_exempt_technology_is_allowed(self, chain_scenario):
        s = chain_scenario
        bare = tech("legacy", {"elec": 1.0}, exempt=True)
        object.__setattr__(bare, "lcia_stat", {})
        object.__setattr__(bare, "lcia_var", {})
        ok = make_scenario(layers=s.layers, demands=s.demands,
                           resources=s.resources,
                           technologies=list(s.technologies) + [bare])
        ep = build_problem(ok)
        c, c0 = lcia_vector(ep, "CF")
        assert c[ep.i_f["legacy"]] == 0.0


class TestBreakdown:
    def test_single_technology_equals_total(self, single_tech_scenario):
        ep = build_problem(single_tech_scenario)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        bd = breakdown(ep, ep.view(sol), COST)
        assert len([r for r in bd.rows if r.total != 0.0]) == 1
        assert_allclose(bd.total, sol.objective, rtol=1e-9)

    def test_accounting_closure_for_all_objectives(self, chain_scenario):
        ep = build_problem(chain_scenario)
        for obj in (COST,) + PROFILE_INDICATORS:
            sol = solve(ep.lp.with_objective(*objective_vector(ep, obj)))
            assert sol.status is Status.OPTIMAL
            bd = breakdown(ep, ep.view(sol), obj)
            scale = max(1.0, abs(sol.objective))
            assert abs(bd.total - sol.objective) <= 1e-9 * scale

    def test_zero_operation_run_has_zero_variable_parts(self):
        s = make_scenario(
            layers=[Layer("elec", "GWh")],
            demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
            resources=[resource("imports", "elec", c_op=1.0)],
            technologies=[tech("gen", {"elec": 1.0}, f_min=1.0, f_max=2.0,
                               f_ext=1.0)])
        ep = build_problem(s)
        sol = solve(ep.lp.with_objective(*cost_vector(ep)))
        bd = breakdown(ep, ep.view(sol), COST)
        assert all(r.variable == 0.0 for r in bd.rows)


class TestExpressionSupport:
    def test_objective_touches_only_f_ft_r(self, storage_scenario):
        ep = build_problem(storage_scenario)
        allowed = set(ep.i_f.values())
        for js in ep.i_ft.values():
            allowed.update(js)
        for js in ep.i_r.values():
            allowed.update(js)
        for obj in (COST,) + PROFILE_INDICATORS:
            c, _ = objective_vector(ep, obj)
            outside = [j for j in np.nonzero(c)[0] if j not in allowed]
            assert outside == []

    def test_lcia_stat_scales_linearly_with_capacity(self):
        def built(fmin):
            s = make_scenario(
                layers=[Layer("elec", "GWh")],
                demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
                resources=[],
                technologies=[tech("gen", {"elec": 1.0}, lifetime=20.0,
                                   f_min=fmin, f_max=fmin, stat=lcia(wsf=64.0))])
            ep = build_problem(s)
            sol = solve(ep.lp.with_objective(*lcia_vector(ep, "WSF")))
            return sol.objective

        base = built(1.0)
        assert_allclose(built(3.0), 3.0 * base, rtol=1e-12)
