"""Scenario ingestion and persistence: CSV schemas, coefficient files, hashing.

A scenario directory holds:
    layers.csv         id, unit, cpc (semicolon-separated, optional)
    demands.csv        layer, sector, annual, share01..share12 (optional)
    resources.csv      id, layer, availability ('' or inf = unlimited), c_op
    technologies.csv   id, end_use_category, c_inv, c_maint, lifetime,
                       f_min, f_max, f_ext, integer, lcia_exempt,
                       cf01..cf12 (optional), conv_<layer> columns
    storage.csv        tech, energy_capacity_max, eta_charge, eta_discharge
    scenario.json      name, discount_rate, reference_run (optional)
    lcia_coefficients.csv   entity, kind, phase, indicator, value (optional;
                       normally produced by the lci stage)

All numbers are serialized with 17 significant digits, so every file parses
back to the exact same doubles.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from environom.model import (
    MONTH_HOURS,
    N_PERIODS,
    EndUseDemand,
    Layer,
    Resource,
    Scenario,
    StorageParams,
    Technology,
    default_periods,
)


class ScenarioIOError(Exception):
    """Malformed scenario content (files exist but do not parse)."""


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def _parse_float(text: str, where: str) -> float:
    text = text.strip()
    if text in ("", "inf", "Inf", "INF"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise ScenarioIOError(f"{where}: cannot parse number {text!r}") from None


def _read_rows(path: Path, required: tuple[str, ...]) -> list[dict]:
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or ()
        missing = [c for c in required if c not in fields]
        if missing:
            raise ScenarioIOError(f"{path.name}: missing columns {missing}")
        return list(reader)


_SHARE_COLS = tuple(f"share{k:02d}" for k in range(1, N_PERIODS + 1))
_CF_COLS = tuple(f"cf{k:02d}" for k in range(1, N_PERIODS + 1))


def load_scenario(directory, coefficients=None) -> Scenario:
    """Load a scenario directory; ``coefficients`` overrides the bundled
    lcia_coefficients.csv (pass the output of a later lci run)."""
    d = Path(directory)
    meta_path = d / "scenario.json"
    if not meta_path.exists():
        raise FileNotFoundError(meta_path)
    with open(meta_path) as fh:
        meta = json.load(fh)

    layers = []
    for row in _read_rows(d / "layers.csv", ("id", "unit")):
        cpc = tuple(c for c in (row.get("cpc") or "").split(";") if c)
        layers.append(Layer(id=row["id"], unit=row["unit"], cpc=cpc))

    demands = []
    for row in _read_rows(d / "demands.csv", ("layer", "sector", "annual")):
        where = f"demands.csv[{row['layer']}/{row['sector']}]"
        if row.get(_SHARE_COLS[0]) not in (None, ""):
            shares = tuple(_parse_float(row[c], where) for c in _SHARE_COLS)
        else:
            shares = tuple([1.0 / N_PERIODS] * N_PERIODS)
        demands.append(EndUseDemand(
            layer=row["layer"], sector=row["sector"],
            annual=_parse_float(row["annual"], where), monthly_shares=shares))

    resources = []
    for row in _read_rows(d / "resources.csv", ("id", "layer", "availability", "c_op")):
        where = f"resources.csv[{row['id']}]"
        resources.append(Resource(
            id=row["id"], layer=row["layer"],
            availability=_parse_float(row["availability"], where),
            c_op=_parse_float(row["c_op"], where)))

    storage: dict[str, StorageParams] = {}
    storage_path = d / "storage.csv"
    if storage_path.exists():
        for row in _read_rows(storage_path,
                              ("tech", "energy_capacity_max", "eta_charge",
                               "eta_discharge")):
            where = f"storage.csv[{row['tech']}]"
            storage[row["tech"]] = StorageParams(
                energy_capacity_max=_parse_float(row["energy_capacity_max"], where),
                eta_charge=_parse_float(row["eta_charge"], where),
                eta_discharge=_parse_float(row["eta_discharge"], where))

    tech_rows = _read_rows(
        d / "technologies.csv",
        ("id", "end_use_category", "c_inv", "c_maint", "lifetime",
         "f_min", "f_max", "f_ext"))
    conv_cols = [c for c in tech_rows[0] if c.startswith("conv_")] if tech_rows else []
    technologies = []
    for row in tech_rows:
        tid = row["id"]
        where = f"technologies.csv[{tid}]"
        conversion = {}
        for col in conv_cols:
            cell = (row.get(col) or "").strip()
            if cell:
                conversion[col[len("conv_"):]] = _parse_float(cell, where)
        if row.get(_CF_COLS[0]) not in (None, ""):
            cf = tuple(_parse_float(row[c], where) for c in _CF_COLS)
        else:
            cf = tuple([1.0] * N_PERIODS)
        technologies.append(Technology(
            id=tid, end_use_category=row["end_use_category"],
            conversion=conversion,
            c_inv=_parse_float(row["c_inv"], where),
            c_maint=_parse_float(row["c_maint"], where),
            lifetime=_parse_float(row["lifetime"], where),
            f_min=_parse_float(row["f_min"], where),
            f_max=_parse_float(row["f_max"], where),
            f_ext=_parse_float(row["f_ext"], where),
            capacity_factor=cf,
            is_storage=tid in storage, storage=storage.get(tid),
            integer_capacity=(row.get("integer") or "0").strip() in ("1", "true", "True"),
            lcia_exempt=(row.get("lcia_exempt") or "0").strip() in ("1", "true", "True")))

    orphans = sorted(set(storage) - {t.id for t in technologies})
    if orphans:
        raise ScenarioIOError(f"storage.csv names unknown technologies: {orphans}")

    coeff_path = Path(coefficients) if coefficients else d / "lcia_coefficients.csv"
    if coeff_path.exists():
        stat, var = load_coefficients(coeff_path)
        technologies = [
            Technology(
                id=t.id, end_use_category=t.end_use_category, conversion=t.conversion,
                c_inv=t.c_inv, c_maint=t.c_maint, lifetime=t.lifetime,
                f_min=t.f_min, f_max=t.f_max, f_ext=t.f_ext,
                capacity_factor=t.capacity_factor,
                lcia_stat=stat.get(t.id, {}), lcia_var=var.get(t.id, {}),
                is_storage=t.is_storage, storage=t.storage,
                integer_capacity=t.integer_capacity, lcia_exempt=t.lcia_exempt)
            for t in technologies]
        resources = [
            Resource(id=r.id, layer=r.layer, availability=r.availability,
                     c_op=r.c_op, lcia_var=var.get(r.id, {}))
            for r in resources]
    elif coefficients:
        raise FileNotFoundError(coeff_path)

    return Scenario(
        name=meta.get("name", d.name),
        periods=default_periods(),
        layers=tuple(layers), demands=tuple(demands),
        resources=tuple(resources), technologies=tuple(technologies),
        discount_rate=float(meta.get("discount_rate", 0.03)),
        reference_run=meta.get("reference_run"))


def save_scenario(s: Scenario, directory) -> None:
    """Write the scenario directory (without coefficient data)."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if tuple(p.t_op for p in s.periods) != MONTH_HOURS:
        raise ScenarioIOError("only calendar-month periods can be serialized")

    with open(d / "scenario.json", "w") as fh:
        meta = {"name": s.name, "discount_rate": s.discount_rate}
        if s.reference_run is not None:
            meta["reference_run"] = s.reference_run
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")

    with open(d / "layers.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("id", "unit", "cpc"))
        for l in s.layers:
            w.writerow((l.id, l.unit, ";".join(l.cpc)))

    with open(d / "demands.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("layer", "sector", "annual") + _SHARE_COLS)
        for dm in s.demands:
            w.writerow((dm.layer, dm.sector, fmt(dm.annual))
                       + tuple(fmt(x) for x in dm.monthly_shares))

    with open(d / "resources.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("id", "layer", "availability", "c_op"))
        for r in s.resources:
            avail = "inf" if math.isinf(r.availability) else fmt(r.availability)
            w.writerow((r.id, r.layer, avail, fmt(r.c_op)))

    layer_ids = [l.id for l in s.layers]
    with open(d / "technologies.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("id", "end_use_category", "c_inv", "c_maint", "lifetime",
                    "f_min", "f_max", "f_ext", "integer", "lcia_exempt")
                   + _CF_COLS + tuple(f"conv_{l}" for l in layer_ids))
        for t in s.technologies:
            fmax = "inf" if math.isinf(t.f_max) else fmt(t.f_max)
            row = [t.id, t.end_use_category, fmt(t.c_inv), fmt(t.c_maint),
                   fmt(t.lifetime), fmt(t.f_min), fmax, fmt(t.f_ext),
                   int(t.integer_capacity), int(t.lcia_exempt)]
            row += [fmt(x) for x in t.capacity_factor]
            row += [fmt(t.conversion[l]) if l in t.conversion else ""
                    for l in layer_ids]
            w.writerow(row)

    with open(d / "storage.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("tech", "energy_capacity_max", "eta_charge", "eta_discharge"))
        for t in s.technologies:
            if t.storage is not None:
                w.writerow((t.id, fmt(t.storage.energy_capacity_max),
                            fmt(t.storage.eta_charge), fmt(t.storage.eta_discharge)))


def load_coefficients(path) -> tuple[dict, dict]:
    """lcia_coefficients.csv -> (stat, var) tables: entity -> {indicator: value}."""
    stat: dict = {}
    var: dict = {}
    for row in _read_rows(Path(path), ("entity", "kind", "phase", "indicator", "value")):
        table = stat if row["phase"] == "construction" else var
        if row["phase"] not in ("construction", "operation"):
            raise ScenarioIOError(f"{path}: unknown phase {row['phase']!r}")
        table.setdefault(row["entity"], {})[row["indicator"]] = _parse_float(
            row["value"], f"coefficients[{row['entity']}]")
    return stat, var


def save_coefficients(path, stat: dict, var: dict, kinds: dict) -> None:
    """Write the coefficient table sorted by entity, phase, indicator."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("entity", "kind", "phase", "indicator", "value"))
        entities = sorted(set(stat) | set(var))
        for e in entities:
            for phase, table in (("construction", stat), ("operation", var)):
                if e not in table:
                    continue
                for ind in sorted(table[e]):
                    w.writerow((e, kinds.get(e, "technology"), phase, ind,
                                fmt(table[e][ind])))


def scenario_hash(directory) -> str:
    """Content hash over every file in the scenario directory.

    Changes iff any input file byte changes; file order is normalized.
    """
    d = Path(directory)
    h = hashlib.sha256()
    for path in sorted(p for p in d.rglob("*") if p.is_file()):
        h.update(str(path.relative_to(d)).encode())
        h.update(b"\0")
        h.update(path.read_bytes())
        h.update(b"\0")
    return h.hexdigest()


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
