"""Shared scenario builders for the unit tests."""

import numpy as np
import pytest

from environom.indicators import PROFILE_INDICATORS
from environom.model import (
    EndUseDemand,
    Layer,
    Resource,
    Scenario,
    StorageParams,
    Technology,
    default_periods,
)

UNIFORM = tuple([1.0 / 12.0] * 12)
FLAT_CF = tuple([1.0] * 12)


def lcia(**values):
    """Impact-coefficient dict covering all five profile indicators."""
    out = {ind: 0.0 for ind in PROFILE_INDICATORS}
    for k, v in values.items():
        out[k.upper()] = float(v)
    return out


def tech(id, conversion, *, category="electricity", c_inv=100.0, c_maint=1.0,
         lifetime=25.0, f_min=0.0, f_max=np.inf, f_ext=0.0, cf=FLAT_CF,
         stat=None, var=None, storage=None, integer=False, exempt=False):
    return Technology(
        id=id, end_use_category=category, conversion=dict(conversion),
        c_inv=c_inv, c_maint=c_maint, lifetime=lifetime,
        f_min=f_min, f_max=f_max, f_ext=f_ext, capacity_factor=tuple(cf),
        lcia_stat=stat if stat is not None else lcia(),
        lcia_var=var if var is not None else lcia(),
        is_storage=storage is not None, storage=storage,
        integer_capacity=integer, lcia_exempt=exempt)


def resource(id, layer, *, availability=np.inf, c_op=0.0, var=None):
    return Resource(id=id, layer=layer, availability=availability, c_op=c_op,
                    lcia_var=var if var is not None else lcia())


def make_scenario(layers, demands, resources, technologies, *,
                  name="test", discount_rate=0.03, reference=None):
    return Scenario(
        name=name, periods=default_periods(), layers=tuple(layers),
        demands=tuple(demands), resources=tuple(resources),
        technologies=tuple(technologies), discount_rate=discount_rate,
        reference_run=reference)


@pytest.fixture
def single_tech_scenario():
    """One generator, one layer, 12 GWh/yr flat demand."""
    return make_scenario(
        layers=[Layer("elec", "GWh")],
        demands=[EndUseDemand("elec", "households", 12.0, UNIFORM)],
        resources=[],
        technologies=[tech("gen", {"elec": 1.0}, c_inv=10.0, c_maint=0.5)],
    )


@pytest.fixture
def chain_scenario():
    """Gas resource -> gas plant -> electricity, plus a capacity-limited PV."""
    layers = [Layer("elec", "GWh"), Layer("gas", "GWh")]
    demands = [EndUseDemand("elec", "industry", 1200.0, UNIFORM)]
    resources = [resource("natgas", "gas", c_op=0.05, var=lcia(cf=0.25, fneu=4.0))]
    technologies = [
        tech("gas_plant", {"elec": 1.0, "gas": -2.0}, c_inv=80.0, c_maint=2.0,
             stat=lcia(cf=40.0, reqd=3.0), var=lcia(cf=0.40)),
        tech("pv", {"elec": 1.0}, c_inv=600.0, c_maint=6.0, f_max=0.08,
             cf=(0.06, 0.09, 0.13, 0.17, 0.20, 0.22,
                 0.22, 0.19, 0.15, 0.10, 0.06, 0.05),
             stat=lcia(cf=900.0, reqd=80.0, wsf=30.0)),
    ]
    return make_scenario(layers, demands, resources, technologies)


def build_moo_scenario():
    """Four electricity routes with deliberately conflicting impact profiles:
    gas is cheap but carbon/fossil heavy, PV is water/material heavy in
    construction, hydro is water heavy in operation, geothermal is clean but
    expensive with a human-health construction burden."""
    layers = [Layer("elec", "GWh"), Layer("gas", "GWh")]
    demands = [EndUseDemand("elec", "industry", 1500.0, UNIFORM)]
    resources = [resource("natgas", "gas", c_op=0.04,
                          var=lcia(cf=0.25, fneu=4.0, reqd=0.01, rhhd=0.002,
                                   wsf=0.1))]
    technologies = [
        tech("gas_plant", {"elec": 1.0, "gas": -2.0}, c_inv=60.0, c_maint=2.0,
             stat=lcia(cf=30.0, fneu=20.0, reqd=3.0, rhhd=0.5, wsf=5.0),
             var=lcia(cf=0.05)),
        tech("pv", {"elec": 1.0}, c_inv=500.0, c_maint=5.0, f_max=4.0,
             cf=(0.06, 0.09, 0.13, 0.17, 0.20, 0.22,
                 0.22, 0.19, 0.15, 0.10, 0.06, 0.05),
             stat=lcia(cf=800.0, fneu=900.0, reqd=120.0, rhhd=25.0, wsf=300.0)),
        tech("hydro", {"elec": 1.0}, c_inv=900.0, c_maint=3.0, f_max=0.5,
             cf=tuple([0.45] * 12),
             stat=lcia(cf=200.0, fneu=150.0, reqd=40.0, rhhd=6.0, wsf=100.0),
             var=lcia(wsf=3.0)),
        tech("geo", {"elec": 1.0}, c_inv=1400.0, c_maint=12.0, f_max=0.6,
             cf=tuple([0.9] * 12),
             stat=lcia(cf=150.0, fneu=100.0, reqd=60.0, rhhd=40.0, wsf=20.0)),
    ]
    return make_scenario(layers, demands, resources, technologies)


@pytest.fixture
def moo_scenario():
    return build_moo_scenario()


@pytest.fixture
def storage_scenario():
    """Summer-weighted generator, winter-weighted demand, one battery."""
    winter = (0.2, 0.15, 0.1, 0.05, 0.0, 0.0, 0.0, 0.0, 0.05, 0.1, 0.15, 0.2)
    summer_cf = (0.2, 0.3, 0.5, 0.7, 0.9, 1.0, 1.0, 0.9, 0.7, 0.5, 0.3, 0.2)
    layers = [Layer("elec", "GWh")]
    demands = [EndUseDemand("elec", "households", 600.0, winter)]
    technologies = [
        tech("solar", {"elec": 1.0}, c_inv=50.0, c_maint=0.5, cf=summer_cf),
        tech("battery", {"elec": 1.0}, c_inv=30.0, c_maint=0.2,
             storage=StorageParams(energy_capacity_max=400.0,
                                   eta_charge=0.95, eta_discharge=0.95)),
    ]
    return make_scenario(layers, demands, [], technologies)
