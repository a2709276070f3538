"""Energy-system data model: periods, layers, demands, resources, technologies.

Scenarios are immutable after construction and safe to share between workers.
``validate_scenario`` returns diagnostics instead of raising so a scenario can
be audited in one pass; problem assembly requires a clean validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# Calendar-month durations in hours (non-leap year, 8760 h total).
MONTH_HOURS: tuple[float, ...] = (
    744.0, 672.0, 744.0, 720.0, 744.0, 720.0,
    744.0, 744.0, 720.0, 744.0, 720.0, 744.0,
)
N_PERIODS = 12
HOURS_TOLERANCE = 24.0  # leap years

LAYER_UNITS = ("GWh", "Mtkm", "Mpkm")
SECTORS = ("households", "services", "industry", "mobility")

# End-use category -> (operation unit, construction unit).
END_USE_UNITS = {
    "electricity": ("GWh", "GW"),
    "heat": ("GWh", "GW"),
    "mobility_freight": ("Mtkm", "Mtkm/h"),
    "mobility_passenger": ("Mpkm", "Mpkm/h"),
}


class ModelError(Exception):
    """Raised for structural problems that prevent building anything at all."""


@dataclass(frozen=True)
class Period:
    id: int
    t_op: float  # hours


@dataclass(frozen=True)
class Layer:
    id: str
    unit: str
    cpc: tuple[str, ...] = ()  # product classification codes of the carrier


@dataclass(frozen=True)
class EndUseDemand:
    layer: str
    sector: str
    annual: float                       # in the layer unit
    monthly_shares: tuple[float, ...]   # 12 non-negative fractions, sum 1


@dataclass(frozen=True)
class Resource:
    """A purchasable primary carrier feeding one layer."""

    id: str
    layer: str
    availability: float                 # annual cap in GWh; inf allowed
    c_op: float                         # MCHF per unit
    lcia_var: dict = field(default_factory=dict)   # indicator -> impact per unit


@dataclass(frozen=True)
class StorageParams:
    energy_capacity_max: float          # upper bound of the energy-capacity variable
    eta_charge: float
    eta_discharge: float


@dataclass(frozen=True)
class Technology:
    id: str
    end_use_category: str
    conversion: dict                    # layer -> signed coefficient per unit of use
    c_inv: float                        # MCHF per capacity unit
    c_maint: float                      # MCHF per capacity unit per year
    lifetime: float                     # years
    f_min: float
    f_max: float
    f_ext: float                        # existing capacity
    capacity_factor: tuple[float, ...]  # 12 values in [0, 1]
    lcia_stat: dict = field(default_factory=dict)  # indicator -> impact per capacity unit
    lcia_var: dict = field(default_factory=dict)   # indicator -> impact per operation unit
    is_storage: bool = False
    storage: StorageParams | None = None
    integer_capacity: bool = False
    lcia_exempt: bool = False           # explicitly allowed to lack impact data

    def primary_output(self) -> str | None:
        """The layer whose coefficient is exactly +1 (the normalized output)."""
        hits = [l for l, v in self.conversion.items() if v == 1.0]
        return hits[0] if len(hits) == 1 else None

    def input_layers(self) -> tuple[str, ...]:
        return tuple(l for l, v in sorted(self.conversion.items()) if v < 0)


@dataclass(frozen=True)
class Scenario:
    name: str
    periods: tuple[Period, ...]
    layers: tuple[Layer, ...]
    demands: tuple[EndUseDemand, ...]
    resources: tuple[Resource, ...]
    technologies: tuple[Technology, ...]
    discount_rate: float = 0.03
    reference_run: dict | None = None   # objective id -> baseline value

    def layer_map(self) -> dict:
        return {l.id: l for l in self.layers}

    def technology_map(self) -> dict:
        return {t.id: t for t in self.technologies}

    def resource_map(self) -> dict:
        return {r.id: r for r in self.resources}

    def t_op(self) -> tuple[float, ...]:
        return tuple(p.t_op for p in self.periods)


@dataclass(frozen=True)
class Diagnostic:
    entity: str
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule} ({self.detail})"


def default_periods() -> tuple[Period, ...]:
    return tuple(Period(i, h) for i, h in enumerate(MONTH_HOURS))


def validate_scenario(s: Scenario) -> list[Diagnostic]:
    """Check every type invariant and cross-reference; empty list means clean."""
    out: list[Diagnostic] = []

    def bad(entity: str, rule: str, detail: str):
        out.append(Diagnostic(entity, rule, detail))

    if len(s.periods) != N_PERIODS:
        bad("periods", "period count", f"expected {N_PERIODS}, got {len(s.periods)}")
    total_hours = sum(p.t_op for p in s.periods)
    if abs(total_hours - 8760.0) > HOURS_TOLERANCE:
        bad("periods", "annual hours", f"sum t_op = {total_hours}")
    for p in s.periods:
        if p.t_op <= 0:
            bad(f"period {p.id}", "positive duration", f"t_op = {p.t_op}")

    layer_ids = [l.id for l in s.layers]
    if len(set(layer_ids)) != len(layer_ids):
        dup = sorted({x for x in layer_ids if layer_ids.count(x) > 1})
        bad("layers", "unique ids", ", ".join(dup))
    layers = s.layer_map()
    for l in s.layers:
        if l.unit not in LAYER_UNITS:
            bad(f"layer {l.id}", "unit", f"{l.unit!r} not in {LAYER_UNITS}")

    for d in s.demands:
        ent = f"demand {d.layer}/{d.sector}"
        if d.layer not in layers:
            bad(ent, "unknown layer", d.layer)
        if d.sector not in SECTORS:
            bad(ent, "unknown sector", d.sector)
        if d.annual < 0:
            bad(ent, "non-negative annual demand", str(d.annual))
        if len(d.monthly_shares) != N_PERIODS:
            bad(ent, "12 monthly shares", str(len(d.monthly_shares)))
        else:
            if any(x < 0 for x in d.monthly_shares):
                bad(ent, "non-negative shares", "")
            total = math.fsum(d.monthly_shares)
            if abs(total - 1.0) > 1e-9:
                bad(ent, "shares sum to 1", f"sum = {total!r}")

    seen_res = set()
    for r in s.resources:
        ent = f"resource {r.id}"
        if r.id in seen_res:
            bad(ent, "unique ids", "")
        seen_res.add(r.id)
        if r.layer not in layers:
            bad(ent, "unknown layer", r.layer)
        if r.availability < 0:
            bad(ent, "non-negative availability", str(r.availability))
        if r.c_op < 0:
            bad(ent, "non-negative operating cost", str(r.c_op))

    seen_tec = set()
    for t in s.technologies:
        ent = f"technology {t.id}"
        if t.id in seen_tec:
            bad(ent, "unique ids", "")
        seen_tec.add(t.id)
        if t.end_use_category not in END_USE_UNITS:
            bad(ent, "unknown end-use category", t.end_use_category)
        if t.lifetime < 1:
            bad(ent, "lifetime >= 1 year", str(t.lifetime))
        if not (0 <= t.f_min <= t.f_max):
            bad(ent, "0 <= f_min <= f_max", f"f_min={t.f_min}, f_max={t.f_max}")
        if t.f_ext > t.f_max:
            bad(ent, "existing exceeds potential", f"f_ext={t.f_ext} > f_max={t.f_max}")
        if len(t.capacity_factor) != N_PERIODS:
            bad(ent, "12 capacity factors", str(len(t.capacity_factor)))
        elif any(not (0.0 <= cf <= 1.0) for cf in t.capacity_factor):
            bad(ent, "capacity factor in [0,1]", "")
        for lid in t.conversion:
            if lid not in layers:
                bad(ent, "unknown conversion layer", lid)
        if t.primary_output() is None:
            bad(ent, "exactly one primary output (+1 coefficient)",
                str(sorted(t.conversion.items())))
        else:
            prim = layers.get(t.primary_output())
            want = END_USE_UNITS.get(t.end_use_category, (None,))[0]
            if prim is not None and want is not None and prim.unit != want:
                bad(ent, "primary output unit matches end-use category",
                    f"{prim.unit} != {want}")
        if t.is_storage and t.storage is None:
            bad(ent, "storage parameters required", "is_storage set")
        if not t.is_storage and t.storage is not None:
            bad(ent, "storage parameters forbidden", "is_storage not set")
        if t.storage is not None:
            sp = t.storage
            if sp.energy_capacity_max < 0:
                bad(ent, "non-negative energy capacity", str(sp.energy_capacity_max))
            for nm, eta in (("charge", sp.eta_charge), ("discharge", sp.eta_discharge)):
                if not (0.0 < eta <= 1.0):
                    bad(ent, f"{nm} efficiency in (0,1]", str(eta))

    # Every demanded layer must be producible by some technology or resource.
    producible = set()
    for t in s.technologies:
        for lid, v in t.conversion.items():
            if v > 0:
                producible.add(lid)
    for r in s.resources:
        producible.add(r.layer)
    for d in s.demands:
        if d.annual > 0 and d.layer in layers and d.layer not in producible:
            bad(f"layer {d.layer}", "unproducible layer",
                "demanded but no technology or resource supplies it")

    if not (0.0 <= s.discount_rate < 1.0):
        bad("scenario", "discount rate in [0,1)", str(s.discount_rate))

    return out
