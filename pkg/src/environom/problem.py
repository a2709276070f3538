"""Assembly of the energy-system linear program.

Variables (in deterministic order):
    F[tec]        installed capacity, bounded by [f_min, f_max]
    Ft[tec, t]    use per period, in operation units per hour; for storage
                  technologies Ft is the discharge rate
    R[res, t]     resource draw per period, units per hour
    Chg[tec, t]   charge rate (storage only)
    SoC[tec, t]   state of charge at the end of period t (storage only)
    E[tec]        energy-capacity variable (storage only)

Constraints:
    balance       one equality per (layer, period), in per-hour rate form
    capacity      Ft (and Chg) <= capacity_factor * F
    availability  sum_t R * t_op <= availability (finite availabilities only)
    soc           cyclic state-of-charge balance, SoC <= E
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from environom.lp import EQ, LE, LinearProgram, Solution
from environom.model import N_PERIODS, Scenario, validate_scenario


class StructureError(Exception):
    """The scenario cannot be assembled into a well-formed problem."""


@dataclass(frozen=True)
class EnergyProblem:
    """An assembled, objective-free LP plus the variable bookkeeping.

    Immutable; attach an objective with ``lp.with_objective`` and extra
    constraint rows with ``lp.with_rows`` (both return copies).
    """

    scenario: Scenario
    lp: LinearProgram
    i_f: dict            # tech -> column
    i_ft: dict           # tech -> tuple of 12 columns
    i_r: dict            # res -> tuple of 12 columns
    i_chg: dict          # storage tech -> tuple of 12 columns
    i_soc: dict          # storage tech -> tuple of 12 columns
    i_e: dict            # storage tech -> column
    demand_rate: dict    # layer -> ndarray(12), operation units per hour
    demand_qty: dict     # layer -> ndarray(12), operation units per period

    def manifest(self) -> dict:
        """Size summary used as a regression fixture for the bundled scenario."""
        kinds = {"F": len(self.i_f), "Ft": sum(len(v) for v in self.i_ft.values()),
                 "R": sum(len(v) for v in self.i_r.values()),
                 "Chg": sum(len(v) for v in self.i_chg.values()),
                 "SoC": sum(len(v) for v in self.i_soc.values()),
                 "E": len(self.i_e)}
        rows: dict[str, int] = {}
        for name in self.lp.row_names:
            kind = name.split("[", 1)[0]
            rows[kind] = rows.get(kind, 0) + 1
        return {"variables": kinds, "n_variables": self.lp.n_vars,
                "constraints": rows, "n_constraints": self.lp.n_rows}

    def view(self, sol: Solution) -> "SolutionView":
        return SolutionView(self, sol)


class SolutionView:
    """Named access to primal values of a solved instance."""

    def __init__(self, problem: EnergyProblem, sol: Solution):
        self.problem = problem
        self.solution = sol
        x = sol.x
        self.F = {tec: float(x[j]) for tec, j in problem.i_f.items()}
        self.Ft = {tec: x[list(js)].copy() for tec, js in problem.i_ft.items()}
        self.R = {res: x[list(js)].copy() for res, js in problem.i_r.items()}
        self.charge = {tec: x[list(js)].copy() for tec, js in problem.i_chg.items()}
        self.soc = {tec: x[list(js)].copy() for tec, js in problem.i_soc.items()}
        self.E = {tec: float(x[j]) for tec, j in problem.i_e.items()}

    def annual_use(self, tec: str) -> float:
        t_op = np.asarray(self.problem.scenario.t_op())
        return float(self.Ft[tec] @ t_op)

    def annual_resource_use(self, res: str) -> float:
        t_op = np.asarray(self.problem.scenario.t_op())
        return float(self.R[res] @ t_op)


def build_problem(s: Scenario) -> EnergyProblem:
    """Assemble the constraint set; requires a clean validation."""
    diags = validate_scenario(s)
    if diags:
        raise StructureError(
            "scenario fails validation: " + "; ".join(str(d) for d in diags[:5]))

    t_op = np.asarray(s.t_op())
    storage_tecs = [t for t in s.technologies if t.is_storage]
    for t in storage_tecs:
        extra = {l: v for l, v in t.conversion.items() if v != 1.0}
        if extra:
            raise StructureError(
                f"storage technology {t.id} must convert exactly one layer "
                f"with coefficient +1, found {sorted(extra)}")

    # ---- variable layout -------------------------------------------------
    names: list[str] = []
    lo: list[float] = []
    hi: list[float] = []
    integer: list[bool] = []

    def add_var(name: str, lo_v: float, hi_v: float, is_int: bool = False) -> int:
        names.append(name)
        lo.append(lo_v)
        hi.append(hi_v)
        integer.append(is_int)
        return len(names) - 1

    i_f = {t.id: add_var(f"F[{t.id}]", t.f_min, t.f_max, t.integer_capacity)
           for t in s.technologies}
    i_ft = {t.id: tuple(add_var(f"Ft[{t.id}][{k}]", 0.0, np.inf)
                        for k in range(N_PERIODS))
            for t in s.technologies}
    i_r = {r.id: tuple(add_var(f"R[{r.id}][{k}]", 0.0, np.inf)
                       for k in range(N_PERIODS))
           for r in s.resources}
    i_chg = {t.id: tuple(add_var(f"Chg[{t.id}][{k}]", 0.0, np.inf)
                         for k in range(N_PERIODS))
             for t in storage_tecs}
    i_soc = {t.id: tuple(add_var(f"SoC[{t.id}][{k}]", 0.0, np.inf)
                         for k in range(N_PERIODS))
             for t in storage_tecs}
    i_e = {t.id: add_var(f"E[{t.id}]", 0.0, t.storage.energy_capacity_max)
           for t in storage_tecs}

    # ---- demand --------------------------------------------------------
    demand_qty = {l.id: np.zeros(N_PERIODS) for l in s.layers}
    for d in s.demands:
        demand_qty[d.layer] += d.annual * np.asarray(d.monthly_shares)
    demand_rate = {lid: q / t_op for lid, q in demand_qty.items()}

    # ---- rows ------------------------------------------------------------
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    senses: list[str] = []
    rhs: list[float] = []
    row_names: list[str] = []

    def add_row(name: str, sense: str, b: float, entries: list[tuple[int, float]]):
        i = len(row_names)
        row_names.append(name)
        senses.append(sense)
        rhs.append(b)
        for j, v in entries:
            if v != 0.0:
                rows.append(i)
                cols.append(j)
                vals.append(v)

    # (a) layer balance, per layer and period, in rate form.
    producers: dict[str, list] = {l.id: [] for l in s.layers}
    for t in s.technologies:
        if t.is_storage:
            continue
        for lid, coef in t.conversion.items():
            producers[lid].append(("tec", t.id, coef))
    for r in s.resources:
        producers[r.layer].append(("res", r.id, 1.0))
    for t in storage_tecs:
        producers[t.primary_output()].append(("sto", t.id, 1.0))

    for l in s.layers:
        if not producers[l.id] and not np.any(demand_qty[l.id]):
            raise StructureError(f"layer {l.id} appears in no constraint")
        for k in range(N_PERIODS):
            entries: list[tuple[int, float]] = []
            for kind, eid, coef in producers[l.id]:
                if kind == "tec":
                    entries.append((i_ft[eid][k], coef))
                elif kind == "res":
                    entries.append((i_r[eid][k], 1.0))
                else:  # storage: discharge adds, charge removes
                    entries.append((i_ft[eid][k], 1.0))
                    entries.append((i_chg[eid][k], -1.0))
            add_row(f"balance[{l.id}][{k}]", EQ, float(demand_rate[l.id][k]), entries)

    # (b) capacity limits.
    for t in s.technologies:
        for k in range(N_PERIODS):
            add_row(f"capacity[{t.id}][{k}]", LE, 0.0,
                    [(i_ft[t.id][k], 1.0), (i_f[t.id], -t.capacity_factor[k])])
    for t in storage_tecs:
        for k in range(N_PERIODS):
            add_row(f"chargecap[{t.id}][{k}]", LE, 0.0,
                    [(i_chg[t.id][k], 1.0), (i_f[t.id], -t.capacity_factor[k])])

    # (c) annual resource availability (finite caps only).
    for r in s.resources:
        if np.isfinite(r.availability):
            add_row(f"availability[{r.id}]", LE, r.availability,
                    [(i_r[r.id][k], float(t_op[k])) for k in range(N_PERIODS)])

    # (d) cyclic state of charge; period 0 links back to period 11.
    for t in storage_tecs:
        sp = t.storage
        for k in range(N_PERIODS):
            prev = (k - 1) % N_PERIODS
            add_row(f"soc[{t.id}][{k}]", EQ, 0.0, [
                (i_soc[t.id][k], 1.0),
                (i_soc[t.id][prev], -1.0),
                (i_chg[t.id][k], -sp.eta_charge * float(t_op[k])),
                (i_ft[t.id][k], float(t_op[k]) / sp.eta_discharge),
            ])
            add_row(f"socbound[{t.id}][{k}]", LE, 0.0,
                    [(i_soc[t.id][k], 1.0), (i_e[t.id], -1.0)])

    n = len(names)
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(row_names), n))
    integer_arr = np.asarray(integer, dtype=bool)
    lp = LinearProgram(
        c=np.zeros(n), A=A, senses=tuple(senses), rhs=np.asarray(rhs, dtype=float),
        lo=np.asarray(lo, dtype=float), hi=np.asarray(hi, dtype=float),
        integer=integer_arr if integer_arr.any() else None,
        var_names=tuple(names), row_names=tuple(row_names))
    return EnergyProblem(
        scenario=s, lp=lp, i_f=i_f, i_ft=i_ft, i_r=i_r, i_chg=i_chg,
        i_soc=i_soc, i_e=i_e, demand_rate=demand_rate, demand_qty=demand_qty)


def check_solution_physics(ep: EnergyProblem, sol: Solution) -> list[str]:
    """Independent re-check of the model invariants on a solved instance.

    Returns human-readable violations; empty list means the solution respects
    layer balances (1e-6 of the period demand quantity), capacity limits and
    storage cyclicity.
    """
    problems: list[str] = []
    view = ep.view(sol)
    s = ep.scenario
    t_op = np.asarray(s.t_op())

    for l in s.layers:
        supply = np.zeros(N_PERIODS)
        for t in s.technologies:
            if t.is_storage:
                if t.primary_output() == l.id:
                    supply += view.Ft[t.id] - view.charge[t.id]
            else:
                coef = t.conversion.get(l.id, 0.0)
                if coef:
                    supply += coef * view.Ft[t.id]
        for r in s.resources:
            if r.layer == l.id:
                supply += view.R[r.id]
        resid_qty = (supply - ep.demand_rate[l.id]) * t_op
        tol = 1e-6 * np.maximum(1.0, np.abs(ep.demand_qty[l.id]))
        for k in range(N_PERIODS):
            if abs(resid_qty[k]) > tol[k]:
                problems.append(
                    f"balance[{l.id}][{k}] residual {resid_qty[k]:.3e}")

    for t in s.technologies:
        cap = np.asarray(t.capacity_factor) * view.F[t.id]
        scale = np.maximum(1.0, cap)
        if np.any(view.Ft[t.id] > cap + 1e-9 * scale):
            problems.append(f"capacity[{t.id}] exceeded")
        if t.is_storage and np.any(view.charge[t.id] > cap + 1e-9 * scale):
            problems.append(f"chargecap[{t.id}] exceeded")

    for t in s.technologies:
        if not t.is_storage:
            continue
        soc = view.soc[t.id]
        sp = t.storage
        start = soc[-1]  # cyclic: end of December is the start of January
        flow0 = (sp.eta_charge * view.charge[t.id][0]
                 - view.Ft[t.id][0] / sp.eta_discharge) * t_op[0]
        drift = soc[0] - (start + flow0)
        if abs(drift) > 1e-6 * max(1.0, abs(start)):
            problems.append(f"soc[{t.id}] cyclicity drift {drift:.3e}")

    return problems
