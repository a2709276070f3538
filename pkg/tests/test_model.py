"""Scenario invariants and validation diagnostics."""

import numpy as np
import pytest
from conftest import FLAT_CF, UNIFORM, make_scenario, resource, tech

from environom.model import (
    EndUseDemand,
    Layer,
    Period,
    Scenario,
    StorageParams,
    validate_scenario,
)


def rules(diags):
    return {d.rule for d in diags}


def test_clean_scenario_has_no_diagnostics(single_tech_scenario):
    assert validate_scenario(single_tech_scenario) == []


def test_unproducible_layer(single_tech_scenario):
    s = single_tech_scenario
    bad = make_scenario(
        layers=list(s.layers) + [Layer("heat", "GWh")],
        demands=list(s.demands) + [EndUseDemand("heat", "services", 5.0, UNIFORM)],
        resources=[], technologies=list(s.technologies))
    assert "unproducible layer" in rules(validate_scenario(bad))


def test_existing_exceeds_potential(single_tech_scenario):
    s = single_tech_scenario
    bad = make_scenario(
        layers=s.layers, demands=s.demands, resources=[],
        technologies=[tech("gen", {"elec": 1.0}, f_max=1.0, f_ext=2.0)])
    assert "existing exceeds potential" in rules(validate_scenario(bad))


def test_shares_must_sum_to_one(single_tech_scenario):
    s = single_tech_scenario
    bad_shares = tuple([0.1] * 12)  # sums to 1.2
    bad = make_scenario(
        layers=s.layers,
        demands=[EndUseDemand("elec", "households", 12.0, bad_shares)],
        resources=[], technologies=list(s.technologies))
    assert "shares sum to 1" in rules(validate_scenario(bad))


def test_period_invariants(single_tech_scenario):
    s = single_tech_scenario
    eleven = tuple(Period(i, 800.0) for i in range(11))
    bad = Scenario(name="p", periods=eleven, layers=s.layers, demands=s.demands,
                   resources=(), technologies=s.technologies)
    got = rules(validate_scenario(bad))
    assert "period count" in got
    assert "annual hours" in got


def test_primary_output_rule(single_tech_scenario):
    s = single_tech_scenario
    two_outputs = tech("chp", {"elec": 1.0, "heat": 1.0})
    bad = make_scenario(
        layers=list(s.layers) + [Layer("heat", "GWh")],
        demands=s.demands, resources=[],
        technologies=[two_outputs])
    assert "exactly one primary output (+1 coefficient)" in rules(validate_scenario(bad))


def test_secondary_outputs_are_fine(single_tech_scenario):
    s = single_tech_scenario
    chp = tech("chp", {"elec": 1.0, "heat": 0.8})
    ok = make_scenario(
        layers=list(s.layers) + [Layer("heat", "GWh")],
        demands=s.demands, resources=[], technologies=[chp])
    assert validate_scenario(ok) == []


def test_capacity_factor_range(single_tech_scenario):
    s = single_tech_scenario
    cf = (1.5,) + FLAT_CF[1:]
    bad = make_scenario(
        layers=s.layers, demands=s.demands, resources=[],
        technologies=[tech("gen", {"elec": 1.0}, cf=cf)])
    assert "capacity factor in [0,1]" in rules(validate_scenario(bad))


def test_storage_parameter_rules(single_tech_scenario):
    s = single_tech_scenario
    sloppy = tech("st", {"elec": 1.0},
                  storage=StorageParams(100.0, eta_charge=1.5, eta_discharge=0.9))
    bad = make_scenario(layers=s.layers, demands=s.demands, resources=[],
                        technologies=list(s.technologies) + [sloppy])
    assert "charge efficiency in (0,1]" in rules(validate_scenario(bad))


def test_unit_category_consistency(single_tech_scenario):
    s = single_tech_scenario
    bad = make_scenario(
        layers=s.layers, demands=s.demands, resources=[],
        technologies=[tech("bus", {"elec": 1.0}, category="mobility_passenger")])
    assert "primary output unit matches end-use category" in rules(validate_scenario(bad))


def test_resource_rules(single_tech_scenario):
    s = single_tech_scenario
    bad = make_scenario(
        layers=s.layers, demands=s.demands,
        resources=[resource("neg", "elec", availability=-1.0, c_op=-0.5)],
        technologies=list(s.technologies))
    got = rules(validate_scenario(bad))
    assert "non-negative availability" in got
    assert "non-negative operating cost" in got


def test_infinite_availability_is_allowed(single_tech_scenario):
    s = single_tech_scenario
    ok = make_scenario(
        layers=s.layers, demands=s.demands,
        resources=[resource("grid", "elec", availability=np.inf, c_op=0.1)],
        technologies=list(s.technologies))
    assert validate_scenario(ok) == []
