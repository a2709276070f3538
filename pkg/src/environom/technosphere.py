"""Background life-cycle database: technosphere, elementary flows, characterization.

The technosphere matrix follows the usual database convention: every process
produces exactly one unit of its reference product (+1 on the diagonal) and
consumes inputs as negative off-diagonal entries.  B maps processes to
elementary flows, C maps elementary flows to impact indicators.

Data ships as three triplet CSV files plus a processes.json with per-process
metadata (unit, product CPC codes, market flag).  A seeded generator for
well-conditioned random technospheres is provided for testing, since real
background databases cannot be redistributed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse


class TechnosphereError(Exception):
    pass


@dataclass(frozen=True)
class Process:
    id: str
    unit: str
    cpc: tuple[str, ...] = ()
    market: bool = False


@dataclass(frozen=True)
class TechnosphereDB:
    processes: tuple[Process, ...]
    a_bb: sparse.csc_matrix          # (n, n)
    flows: tuple[str, ...]
    b: sparse.csc_matrix             # (n_flows, n)
    indicators: tuple[str, ...]
    c: sparse.csc_matrix             # (n_indicators, n_flows)

    def __post_init__(self):
        n = len(self.processes)
        if self.a_bb.shape != (n, n):
            raise TechnosphereError("a_bb shape does not match process count")
        if self.b.shape != (len(self.flows), n):
            raise TechnosphereError("b shape does not match flows x processes")
        if self.c.shape != (len(self.indicators), len(self.flows)):
            raise TechnosphereError("c shape does not match indicators x flows")
        diag = self.a_bb.diagonal()
        if not np.allclose(diag, 1.0, rtol=0, atol=1e-12):
            off = int(np.argmax(np.abs(diag - 1.0)))
            raise TechnosphereError(
                f"process {self.processes[off].id} reference output is {diag[off]}, "
                "expected exactly 1")

    @property
    def n(self) -> int:
        return len(self.processes)

    def index(self) -> dict:
        return {p.id: k for k, p in enumerate(self.processes)}

    def flow_index(self) -> dict:
        return {f: k for k, f in enumerate(self.flows)}


def _read_triplets(path: Path, cols: tuple[str, str, str]):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in cols if c not in (reader.fieldnames or ())]
        if missing:
            raise TechnosphereError(f"{path.name}: missing columns {missing}")
        for row in reader:
            yield row[cols[0]], row[cols[1]], float(row[cols[2]])


def load_db(directory) -> TechnosphereDB:
    """Load a_bb.csv, b.csv, c.csv and processes.json from one directory."""
    d = Path(directory)
    meta_path = d / "processes.json"
    if not meta_path.exists():
        raise FileNotFoundError(meta_path)
    with open(meta_path) as fh:
        meta = json.load(fh)
    processes = tuple(
        Process(id=m["id"], unit=m.get("unit", ""),
                cpc=tuple(m.get("cpc", ())), market=bool(m.get("market", False)))
        for m in meta)
    idx = {p.id: k for k, p in enumerate(processes)}
    if len(idx) != len(processes):
        raise TechnosphereError("duplicate process ids in processes.json")
    n = len(processes)

    rows, cols, vals = [], [], []
    for rp, cp, v in _read_triplets(d / "a_bb.csv", ("row_process", "col_process", "value")):
        if rp not in idx or cp not in idx:
            raise TechnosphereError(f"a_bb.csv references unknown process {rp!r} or {cp!r}")
        rows.append(idx[rp]); cols.append(idx[cp]); vals.append(v)
    a_bb = sparse.csc_matrix((vals, (rows, cols)), shape=(n, n))

    b_trip = list(_read_triplets(d / "b.csv", ("flow", "process", "value")))
    flows = tuple(sorted({t[0] for t in b_trip}))
    fidx = {f: k for k, f in enumerate(flows)}
    rows, cols, vals = [], [], []
    for f, p, v in b_trip:
        if p not in idx:
            raise TechnosphereError(f"b.csv references unknown process {p!r}")
        rows.append(fidx[f]); cols.append(idx[p]); vals.append(v)
    b = sparse.csc_matrix((vals, (rows, cols)), shape=(len(flows), n))

    c_trip = list(_read_triplets(d / "c.csv", ("indicator", "flow", "value")))
    indicators = tuple(sorted({t[0] for t in c_trip}))
    iidx = {i: k for k, i in enumerate(indicators)}
    rows, cols, vals = [], [], []
    for i, f, v in c_trip:
        if f not in fidx:
            raise TechnosphereError(f"c.csv references unknown flow {f!r}")
        rows.append(iidx[i]); cols.append(fidx[f]); vals.append(v)
    c = sparse.csc_matrix((vals, (rows, cols)), shape=(len(indicators), len(flows)))

    return TechnosphereDB(processes=processes, a_bb=a_bb, flows=flows, b=b,
                          indicators=indicators, c=c)


def save_db(db: TechnosphereDB, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "processes.json", "w") as fh:
        json.dump([{"id": p.id, "unit": p.unit, "cpc": list(p.cpc),
                    "market": p.market} for p in db.processes], fh, indent=1)
        fh.write("\n")

    def write_triplets(path, header, mat, row_names, col_names):
        coo = mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k in order:
                w.writerow([row_names[coo.row[k]], col_names[coo.col[k]],
                            "%.17g" % coo.data[k]])

    pids = [p.id for p in db.processes]
    write_triplets(d / "a_bb.csv", ("row_process", "col_process", "value"),
                   db.a_bb, pids, pids)
    write_triplets(d / "b.csv", ("flow", "process", "value"), db.b, db.flows, pids)
    write_triplets(d / "c.csv", ("indicator", "flow", "value"), db.c,
                   db.indicators, db.flows)


def flag_markets_by_prefix(db: TechnosphereDB, prefix: str = "market for ") -> TechnosphereDB:
    """Convenience importer heuristic: mark processes as markets by name prefix.

    Explicit metadata flags are preferred; this exists for databases exported
    without them.
    """
    processes = tuple(
        Process(p.id, p.unit, p.cpc, market=p.market or p.id.startswith(prefix))
        for p in db.processes)
    return TechnosphereDB(processes=processes, a_bb=db.a_bb, flows=db.flows,
                          b=db.b, indicators=db.indicators, c=db.c)


def synthetic_technosphere(n: int, *, n_flows: int = 8, indicators=("CF", "WSF"),
                           density: float = 0.08, seed: int = 0,
                           max_condition: float = 1e6) -> TechnosphereDB:
    """Random productive technosphere with bounded condition number.

    Off-diagonal column sums are kept below one in absolute value, which keeps
    the system Leontief-productive (non-negative inverse) and well away from
    singularity; the dense condition number is checked and enforced.
    """
    rng = np.random.default_rng(seed)
    A = np.eye(n)
    for j in range(n):
        k = rng.binomial(max(n - 1, 1), density)
        if k == 0:
            continue
        others = rng.choice([i for i in range(n) if i != j], size=min(k, n - 1),
                            replace=False)
        amounts = rng.uniform(0.01, 1.0, size=len(others))
        amounts *= rng.uniform(0.1, 0.8) / amounts.sum()
        A[others, j] = -amounts
    cond = np.linalg.cond(A, 1)
    if cond > max_condition:
        raise TechnosphereError(f"generated matrix condition {cond:.3e} too high")

    B = np.zeros((n_flows, n))
    for j in range(n):
        hit = rng.random(n_flows) < 0.6
        B[hit, j] = rng.uniform(0.0, 2.0, size=int(hit.sum()))
    C = rng.uniform(0.0, 1.5, size=(len(indicators), n_flows))

    processes = tuple(
        Process(id=f"proc{k:03d}", unit="unit", cpc=(f"CPC{k:03d}",), market=False)
        for k in range(n))
    flows = tuple(f"flow{k:02d}" for k in range(n_flows))
    return TechnosphereDB(
        processes=processes, a_bb=sparse.csc_matrix(A), flows=flows,
        b=sparse.csc_matrix(B), indicators=tuple(indicators),
        c=sparse.csc_matrix(C))
