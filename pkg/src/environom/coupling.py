"""Coupling of the energy model with the background life-cycle database.

Every (entity, phase) pair that needs impact coefficients becomes one
foreground column appended to the background technosphere.  A mapped column
clones the recipe of its background process: the process inputs (off-diagonal
column entries) scaled by the unit-conversion factor land in the
background-foreground block, and the process's direct elementary flows scaled
by the same factor extend B.  The foreground block itself is the identity:
foreground columns produce one unit of their own product and exchange nothing
among each other, because flows between energy technologies are handled by the
energy model itself -- that is exactly what double-counting removal enforces
on the background side.

Unit demand on a foreground column therefore reproduces factor-times the full
life-cycle score of the mapped process, and zeroing an input exchange removes
that supply chain and nothing else.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sla

from environom.technosphere import TechnosphereDB

CONSTRUCTION = "construction"
OPERATION = "operation"
PHASES = (CONSTRUCTION, OPERATION)


class LcaError(Exception):
    pass


class MarketCycleError(LcaError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("market cycle: " + " -> ".join(cycle))


@dataclass(frozen=True)
class MappingEntry:
    entity: str          # technology or resource id
    phase: str
    process: str         # background process id
    factor: float        # unit bridge (occupancy, distances, MW vs GW, ...)


@dataclass(frozen=True)
class ExtendedTechnosphere:
    db: TechnosphereDB
    targets: tuple            # ordered (entity, phase) pairs, one per column
    a: sparse.csc_matrix      # (n + K, n + K)
    b_ext: sparse.csc_matrix  # (n_flows, n + K)
    unmapped: tuple           # (entity, phase) pairs left as zero columns
    zero_log: tuple = ()      # double-counting provenance entries

    def column_of(self, entity: str, phase: str) -> int:
        return self.db.n + self.targets.index((entity, phase))


def load_mapping(path) -> list[MappingEntry]:
    entries = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entries.append(MappingEntry(
                entity=row["entity"], phase=row["phase"],
                process=row["process"], factor=float(row["factor"])))
    return entries


def harmonize(db: TechnosphereDB, mapping: list[MappingEntry],
              targets=None) -> ExtendedTechnosphere:
    """Append one foreground column per target, populated from the mapping.

    Targets without a mapping entry stay as zero columns and are flagged via
    ``unmapped`` rather than silently scoring zero impact.
    """
    idx = db.index()
    by_target: dict = {}
    for e in mapping:
        if e.phase not in PHASES:
            raise LcaError(f"mapping {e.entity}: unknown phase {e.phase!r}")
        if e.process not in idx:
            raise LcaError(f"mapping {e.entity}/{e.phase}: unknown process {e.process!r}")
        if e.factor <= 0:
            raise LcaError(f"mapping {e.entity}/{e.phase}: non-positive factor {e.factor}")
        key = (e.entity, e.phase)
        if key in by_target:
            raise LcaError(f"duplicate mapping for {e.entity}/{e.phase}")
        by_target[key] = e

    if targets is None:
        targets = tuple(by_target)
    else:
        targets = tuple(targets)
        stray = [k for k in by_target if k not in set(targets)]
        if stray:
            raise LcaError(f"mapping entries without a requested target: {stray}")

    n = db.n
    K = len(targets)
    a_bb = db.a_bb.tocsc()
    b_bg = db.b.tocsc()

    bf_cols = []
    b_cols = []
    unmapped = []
    for key in targets:
        entry = by_target.get(key)
        if entry is None:
            unmapped.append(key)
            bf_cols.append(sparse.csc_matrix((n, 1)))
            b_cols.append(sparse.csc_matrix((len(db.flows), 1)))
            continue
        p = idx[entry.process]
        col = a_bb[:, [p]] * entry.factor
        col[p, 0] = 0.0  # the clone consumes the inputs, not the product itself
        col.eliminate_zeros()
        bf_cols.append(col)
        b_cols.append(b_bg[:, [p]] * entry.factor)

    a_bf = sparse.hstack(bf_cols, format="csc") if K else sparse.csc_matrix((n, 0))
    a = sparse.bmat([[a_bb, a_bf],
                     [None, sparse.eye(K, format="csc")]], format="csc")
    b_fg = sparse.hstack(b_cols, format="csc") if K else sparse.csc_matrix((len(db.flows), 0))
    b_ext = sparse.hstack([b_bg, b_fg], format="csc")
    return ExtendedTechnosphere(db=db, targets=targets, a=a, b_ext=b_ext,
                                unmapped=tuple(unmapped))


def expand_markets(db: TechnosphereDB, process: str) -> list[tuple[str, float]]:
    """Recursively expand market processes into leaf suppliers with cumulative shares.

    Non-markets return themselves with share 1.  Self-loops are dropped;
    genuine cycles among markets raise ``MarketCycleError`` naming the cycle.
    """
    idx = db.index()
    if process not in idx:
        raise LcaError(f"unknown process {process!r}")
    a = db.a_bb.tocsc()
    procs = db.processes
    leaves: dict[str, float] = {}

    def visit(pid: str, share: float, stack: list[str]):
        k = idx[pid]
        if not procs[k].market:
            leaves[pid] = leaves.get(pid, 0.0) + share
            return
        if pid in stack:
            raise MarketCycleError(stack[stack.index(pid):] + [pid])
        stack.append(pid)
        col = a[:, [k]].tocoo()
        suppliers = sorted(
            (int(r), float(v)) for r, v in zip(col.row, col.data)
            if r != k and v < 0)
        for r, v in suppliers:
            visit(procs[r].id, share * (-v), stack)
        stack.pop()

    visit(process, 1.0, [])
    return list(leaves.items())


def _cpc_matches(bg_codes, es_codes, prefix: bool) -> str | None:
    for code in bg_codes:
        if code in es_codes:
            return code
        if prefix:
            for es in es_codes:
                if code.startswith(es):
                    return code
    return None


def remove_double_counting(ext: ExtendedTechnosphere, es_inputs: dict,
                           *, prefix_matching: bool = False) -> ExtendedTechnosphere:
    """Zero operation-column exchanges whose product is already an ES input.

    ``es_inputs`` maps an entity id to the CPC codes of the carriers the
    energy model feeds it.  Matching exchanges are zeroed and logged together
    with their market expansion; a market whose own product code does not
    match is still zeroed when all of its leaves match.  Partially matching
    markets are logged and left untouched (no silent over-zeroing), as are ES
    inputs that matched nothing.
    """
    db = ext.db
    procs = db.processes
    n = db.n
    a = ext.a.tolil(copy=True)
    # Re-application keeps the existing provenance: nothing is left to zero on
    # an already-corrected matrix, so the log must carry over unchanged.
    log: list[dict] = list(ext.zero_log)
    logged_entities = {e["entity"] for e in log}

    for t_idx, (entity, phase) in enumerate(ext.targets):
        if phase != OPERATION:
            continue
        codes = frozenset(es_inputs.get(entity, ()))
        if not codes:
            continue
        col_j = n + t_idx
        zeroed, partial = [], []
        matched_codes: set[str] = set()
        col = ext.a[:, [col_j]].tocoo()
        for r, v in sorted(zip(col.row.tolist(), col.data.tolist())):
            if r >= n or v == 0.0:
                continue
            proc = procs[r]
            hit = _cpc_matches(proc.cpc, codes, prefix_matching)
            if hit is None and proc.market:
                leaves = expand_markets(db, proc.id)
                leaf_hits = [_cpc_matches(procs[db.index()[l]].cpc, codes,
                                          prefix_matching) for l, _ in leaves]
                if leaves and all(h is not None for h in leaf_hits):
                    hit = leaf_hits[0]
                elif any(h is not None for h in leaf_hits):
                    partial.append({
                        "process": proc.id, "amount": v,
                        "matched_leaves": [l for (l, _), h in zip(leaves, leaf_hits)
                                           if h is not None]})
                    matched_codes.update(h for h in leaf_hits if h is not None)
                    continue
            if hit is None:
                continue
            matched_codes.add(hit)
            leaves = (expand_markets(db, proc.id) if proc.market
                      else [(proc.id, 1.0)])
            a[r, col_j] = 0.0
            zeroed.append({"process": proc.id, "amount": v, "cpc": hit,
                           "leaves": [[l, s] for l, s in leaves]})
        fresh_info = bool(zeroed or partial)
        if fresh_info or (codes - matched_codes and entity not in logged_entities):
            log.append({
                "entity": entity, "phase": phase,
                "zeroed": zeroed, "partial": partial,
                "unmatched_cpc": sorted(codes - matched_codes)})

    return ExtendedTechnosphere(
        db=db, targets=ext.targets, a=a.tocsc(), b_ext=ext.b_ext,
        unmapped=ext.unmapped, zero_log=tuple(log))


def _condition_estimate(a: sparse.csc_matrix, lu) -> float:
    m = a.shape[0]
    if m <= 64:
        return float(np.linalg.cond(a.toarray(), 1))
    inv_op = sla.LinearOperator(a.shape, matvec=lu.solve,
                                rmatvec=lambda v: lu.solve(v, trans="T"))
    return float(sla.onenormest(a) * sla.onenormest(inv_op))


def impact_scores(ext: ExtendedTechnosphere, *, condition_limit: float = 1e12,
                  b: sparse.spmatrix | None = None,
                  c: sparse.spmatrix | None = None) -> np.ndarray:
    """Indicator scores per foreground column: solve the extended technosphere
    for each unit final demand, then push through B and C.

    Returns an (n_indicators, n_targets) array in target order.  Raises on a
    singular or ill-conditioned system.
    """
    a = ext.a.tocsc()
    n, K = ext.db.n, len(ext.targets)
    bm = ext.b_ext if b is None else b
    cm = ext.db.c if c is None else c
    try:
        lu = sla.splu(a)
    except RuntimeError as err:
        raise LcaError(f"technosphere is singular: {err}") from None
    cond = _condition_estimate(a, lu)
    if not np.isfinite(cond) or cond > condition_limit:
        raise LcaError(
            f"technosphere condition estimate {cond:.3e} exceeds {condition_limit:.1e}")
    rhs = np.zeros((n + K, K))
    rhs[n:, :] = np.eye(K)
    scaling = lu.solve(rhs)                 # (n + K, K)
    inventory = bm @ scaling                # flows x targets
    return np.asarray(cm @ inventory)       # indicators x targets


def scenario_targets(scenario) -> tuple[tuple, dict]:
    """Foreground columns a scenario needs: both phases per technology, the
    operation phase per resource.  Returns (targets, entity kind map)."""
    targets = []
    kinds = {}
    for t in scenario.technologies:
        targets.append((t.id, CONSTRUCTION))
        targets.append((t.id, OPERATION))
        kinds[t.id] = "technology"
    for r in scenario.resources:
        targets.append((r.id, OPERATION))
        kinds[r.id] = "resource"
    return tuple(targets), kinds


def es_input_codes(scenario) -> dict:
    """Per-technology CPC codes of the carriers the energy model supplies it.

    These are the flows whose background equivalents must be nullified: the
    model already accounts for producing them.  Storage draws on its own
    layer while charging, so that layer counts as an input too.
    """
    layer_cpc = {l.id: l.cpc for l in scenario.layers}
    out: dict = {}
    for t in scenario.technologies:
        layers = set(t.input_layers())
        if t.is_storage and t.primary_output():
            layers.add(t.primary_output())
        codes = set()
        for lid in layers:
            codes.update(layer_cpc.get(lid, ()))
        if codes:
            out[t.id] = frozenset(codes)
    return out


def compute_scenario_coefficients(db: TechnosphereDB, mapping, scenario, *,
                                  prefix_matching: bool = False):
    """Full coupling pipeline for one scenario.

    Returns (lcia_stat, lcia_var, kinds, log): coefficient tables keyed by
    entity, the entity kind map, and a JSON-ready log with unmapped phases,
    fully uncharacterized entities and the double-counting provenance.
    """
    targets, kinds = scenario_targets(scenario)
    ext = harmonize(db, mapping, targets=targets)
    corrected = remove_double_counting(ext, es_input_codes(scenario),
                                       prefix_matching=prefix_matching)
    scores = impact_scores(corrected)
    stat, var = derive_coefficients(scores, corrected)

    unmapped_by_entity: dict = {}
    for entity, phase in corrected.unmapped:
        unmapped_by_entity.setdefault(entity, []).append(phase)
    wanted: dict = {}
    for entity, phase in targets:
        wanted.setdefault(entity, []).append(phase)
    uncharacterized = sorted(
        e for e, phases in wanted.items()
        if sorted(unmapped_by_entity.get(e, ())) == sorted(phases))
    log = {
        "unmapped": [{"entity": e, "phase": p} for e, p in corrected.unmapped],
        "uncharacterized": uncharacterized,
        "double_counting": [dict(entry) for entry in corrected.zero_log],
    }
    return stat, var, kinds, log


def derive_coefficients(scores: np.ndarray, ext: ExtendedTechnosphere) -> tuple[dict, dict]:
    """Split per-target scores into capacity (construction) and use (operation)
    coefficient tables: entity -> {indicator: value}.

    Lifetime division is not applied here; the objective assembly does that.
    Entities missing a phase get explicit zeros for it.
    """
    indicators = ext.db.indicators
    entities = []
    for entity, _ in ext.targets:
        if entity not in entities:
            entities.append(entity)
    stat = {e: {i: 0.0 for i in indicators} for e in entities}
    var = {e: {i: 0.0 for i in indicators} for e in entities}
    for k, (entity, phase) in enumerate(ext.targets):
        table = stat if phase == CONSTRUCTION else var
        for i, ind in enumerate(indicators):
            table[entity][ind] = float(scores[i, k])
    return stat, var
