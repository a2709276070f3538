"""Problem assembly and solved-instance physics."""

import numpy as np
import pytest
from conftest import UNIFORM, make_scenario, resource, tech
from numpy.testing import assert_allclose

from environom.lp import Status, solve
from environom.model import EndUseDemand, Layer
from environom.objectives import cost_vector
from environom.problem import StructureError, build_problem, check_solution_physics


def solve_min_cost(scenario):
    ep = build_problem(scenario)
    c, c0 = cost_vector(ep)
    sol = solve(ep.lp.with_objective(c, c0))
    assert sol.status is Status.OPTIMAL
    return ep, sol


def test_single_technology_closure(single_tech_scenario):
    ep, sol = solve_min_cost(single_tech_scenario)
    view = ep.view(sol)
    peak_rate = max(ep.demand_rate["elec"])
    assert_allclose(view.F["gen"], peak_rate, rtol=1e-9)
    assert check_solution_physics(ep, sol) == []


def test_zero_demand_keeps_existing_only(single_tech_scenario):
    s = single_tech_scenario
    zero = make_scenario(
        layers=s.layers,
        demands=[EndUseDemand("elec", "households", 0.0, UNIFORM)],
        resources=[],
        technologies=[tech("gen", {"elec": 1.0}, c_inv=10.0, c_maint=0.5,
                           f_min=0.3, f_ext=0.3)])
    ep, sol = solve_min_cost(zero)
    view = ep.view(sol)
    assert_allclose(view.F["gen"], 0.3, rtol=1e-12)
    # No new investment: objective is maintenance on existing capacity only.
    assert_allclose(sol.objective, 0.5 * 0.3, rtol=1e-9)
    assert_allclose(view.annual_use("gen"), 0.0, atol=1e-12)


def test_demand_doubling_doubles_resource_use(chain_scenario):
    # Positive homogeneity needs the unconstrained variant: lift the PV cap so
    # no potential binds at either demand level.
    s = chain_scenario
    uncapped = [t if t.id != "pv" else
                tech("pv", dict(t.conversion), c_inv=600.0, c_maint=6.0,
                     cf=t.capacity_factor,
                     stat=dict(t.lcia_stat), var=dict(t.lcia_var))
                for t in s.technologies]
    base = make_scenario(layers=s.layers, demands=s.demands,
                         resources=s.resources, technologies=uncapped)
    doubled = make_scenario(
        layers=s.layers,
        demands=[EndUseDemand(d.layer, d.sector, 2.0 * d.annual, d.monthly_shares)
                 for d in s.demands],
        resources=s.resources, technologies=uncapped)
    ep1, sol1 = solve_min_cost(base)
    ep2, sol2 = solve_min_cost(doubled)
    use1 = ep1.view(sol1).annual_resource_use("natgas")
    use2 = ep2.view(sol2).annual_resource_use("natgas")
    assert use1 > 0
    assert_allclose(use2, 2.0 * use1, rtol=1e-8)


def test_capacity_constraint_binds(chain_scenario):
    ep, sol = solve_min_cost(chain_scenario)
    view = ep.view(sol)
    for tec in ("gas_plant", "pv"):
        cf = np.asarray(ep.scenario.technology_map()[tec].capacity_factor)
        assert np.all(view.Ft[tec] <= cf * view.F[tec] + 1e-9 * max(1.0, view.F[tec]))
    assert check_solution_physics(ep, sol) == []


def test_resource_availability_cap(chain_scenario):
    # Cap gas below what full-gas supply would need (2 GWh gas per GWh elec,
    # 1200 GWh demand) and give PV room to fill the shortfall.
    s = chain_scenario
    roomy_pv = [t if t.id != "pv" else
                tech("pv", dict(t.conversion), c_inv=600.0, c_maint=6.0,
                     f_max=50.0, cf=t.capacity_factor,
                     stat=dict(t.lcia_stat), var=dict(t.lcia_var))
                for t in s.technologies]
    capped = make_scenario(
        layers=s.layers, demands=s.demands,
        resources=[resource("natgas", "gas", availability=1800.0, c_op=0.05)],
        technologies=roomy_pv)
    ep, sol = solve_min_cost(capped)
    used = ep.view(sol).annual_resource_use("natgas")
    assert used <= 1800.0 + 1e-6
    # The gas route alone cannot meet demand, so PV must carry the remainder.
    assert ep.view(sol).F["pv"] > 0


def test_storage_cycles_and_balances(storage_scenario):
    ep, sol = solve_min_cost(storage_scenario)
    assert check_solution_physics(ep, sol) == []
    view = ep.view(sol)
    # Winter demand with summer supply forces real storage throughput.
    assert view.E["battery"] > 1.0
    assert view.annual_use("battery") > 0


def test_structural_error_on_orphan_layer(single_tech_scenario):
    s = single_tech_scenario
    orphan = make_scenario(
        layers=list(s.layers) + [Layer("ghost", "GWh")],
        demands=s.demands, resources=[], technologies=s.technologies)
    with pytest.raises(StructureError, match="ghost"):
        build_problem(orphan)


def test_build_requires_clean_validation(single_tech_scenario):
    s = single_tech_scenario
    dirty = make_scenario(
        layers=s.layers, demands=s.demands, resources=[],
        technologies=[tech("gen", {"elec": 1.0}, f_max=1.0, f_ext=2.0)])
    with pytest.raises(StructureError, match="fails validation"):
        build_problem(dirty)


def test_manifest_counts(chain_scenario):
    ep = build_problem(chain_scenario)
    man = ep.manifest()
    assert man["variables"]["F"] == 2
    assert man["variables"]["Ft"] == 24
    assert man["variables"]["R"] == 12
    assert man["n_variables"] == ep.lp.n_vars
    assert man["n_constraints"] == ep.lp.n_rows
    # 2 layers x 12 balances + 2 techs x 12 capacity rows; gas has no finite cap.
    assert man["constraints"]["balance"] == 24
    assert man["constraints"]["capacity"] == 24


def test_problem_is_reusable_across_objectives(chain_scenario):
    ep = build_problem(chain_scenario)
    c, c0 = cost_vector(ep)
    a = solve(ep.lp.with_objective(c, c0))
    b = solve(ep.lp.with_objective(np.zeros(ep.lp.n_vars)))
    assert a.status is Status.OPTIMAL and b.status is Status.OPTIMAL
    # The base problem must not have been mutated by either solve.
    assert np.all(ep.lp.c == 0.0)


def test_integer_capacity_flag(single_tech_scenario):
    s = single_tech_scenario
    lumpy = make_scenario(
        layers=s.layers,
        demands=[EndUseDemand("elec", "households", 12.0, UNIFORM)],
        resources=[],
        technologies=[tech("gen", {"elec": 1.0}, c_inv=10.0, c_maint=0.5,
                           integer=True)])
    ep, sol = solve_min_cost(lumpy)
    f = ep.view(sol).F["gen"]
    assert abs(f - round(f)) < 1e-7
    assert f >= max(ep.demand_rate["elec"]) - 1e-9
