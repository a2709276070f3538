"""Catalog of impact indicators and objective identifiers.

Six objectives are optimizable: total cost plus the five impact-profile
indicators (three Areas of Concern, two Areas of Protection).  A further set
of impact categories is evaluated on solutions for reporting only and never
enters an objective or constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

COST = "COST"

DALY = "DALY"
PDF_M2_YR = "PDF*m2*yr"


@dataclass(frozen=True)
class Indicator:
    id: str
    name: str
    unit: str
    group: str          # "profile", "human_health", "ecosystem_quality"
    aggregate: bool = False


_PROFILE = [
    Indicator("CF", "Carbon footprint", "kg CO2-eq (short)", "profile"),
    Indicator("FNEU", "Fossil and nuclear energy use", "MJ deprived", "profile"),
    Indicator("REQD", "Remaining ecosystem quality damage", PDF_M2_YR, "profile"),
    Indicator("RHHD", "Remaining human health damage", DALY, "profile"),
    Indicator("WSF", "Water scarcity footprint", "m3 world-eq", "profile"),
]

_HUMAN_HEALTH = [
    ("CCHHL", "Climate change, human health, long term"),
    ("CCHHS", "Climate change, human health, short term"),
    ("HTXCL", "Human toxicity cancer, long term"),
    ("HTXCS", "Human toxicity cancer, short term"),
    ("HTXNCL", "Human toxicity non-cancer, long term"),
    ("HTXNCS", "Human toxicity non-cancer, short term"),
    ("IRHH", "Ionizing radiation, human health"),
    ("OLD", "Ozone layer depletion"),
    ("PMF", "Particulate matter formation"),
    ("PCOX", "Photochemical oxidant formation"),
    ("WAVHH", "Water availability, human health"),
]

_ECOSYSTEM_QUALITY = [
    ("CCEQL", "Climate change, ecosystem quality, long term"),
    ("CCEQS", "Climate change, ecosystem quality, short term"),
    ("FWA", "Freshwater acidification"),
    ("FWEXL", "Freshwater ecotoxicity, long term"),
    ("FWEXS", "Freshwater ecotoxicity, short term"),
    ("FWEU", "Freshwater eutrophication"),
    ("IREQ", "Ionizing radiation, ecosystem quality"),
    ("LOBDV", "Land occupation, biodiversity"),
    ("LTBDV", "Land transformation, biodiversity"),
    ("MAL", "Marine acidification, long term"),
    ("MAS", "Marine acidification, short term"),
    ("MEU", "Marine eutrophication"),
    ("TRA", "Terrestrial acidification"),
    ("TPW", "Thermally polluted water"),
    ("WAVFWES", "Water availability, freshwater ecosystem"),
    ("WAVTES", "Water availability, terrestrial ecosystem"),
]

CATALOG: dict[str, Indicator] = {}
for ind in _PROFILE:
    CATALOG[ind.id] = ind
for iid, name in _HUMAN_HEALTH:
    CATALOG[iid] = Indicator(iid, name, DALY, "human_health")
for iid, name in _ECOSYSTEM_QUALITY:
    CATALOG[iid] = Indicator(iid, name, PDF_M2_YR, "ecosystem_quality")
CATALOG["TTHH"] = Indicator("TTHH", "Total human health", DALY, "human_health",
                            aggregate=True)
CATALOG["TTEQ"] = Indicator("TTEQ", "Total ecosystem quality", PDF_M2_YR,
                            "ecosystem_quality", aggregate=True)

# The five optimizable impact indicators, in canonical order.
PROFILE_INDICATORS: tuple[str, ...] = tuple(i.id for i in _PROFILE)

# COST first, then the impact profile: the order used everywhere a run
# reports "all six objectives".
OPTIMIZABLE_OBJECTIVES: tuple[str, ...] = (COST,) + PROFILE_INDICATORS

# Reporting-only categories (computed on solutions, never optimized).
REPORTING_CATEGORIES: tuple[str, ...] = tuple(
    iid for iid, ind in CATALOG.items()
    if ind.group != "profile" and not ind.aggregate)

ALL_INDICATORS: tuple[str, ...] = tuple(CATALOG)


def unit_of(indicator_id: str) -> str:
    return CATALOG[indicator_id].unit
