"""Run artifacts and post-processing reports.

The soo stage persists objective values, capacities and per-entity objective
compositions for each of the six optima.  The moo stage streams one CSV row
per sample plus a capacity sidecar.  The analyze stage turns those artifacts
into the statistics bundle: correlation matrices with significance,
distributions, the non-dominated front, burden shift against the scenario
reference, and cost/impact composition tables.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from environom.analysis import (
    CorrelationMatrix,
    burden_shift,
    distribution,
    non_dominated_mask,
    pearson,
)
from environom.indicators import COST, OPTIMIZABLE_OBJECTIVES, PROFILE_INDICATORS
from environom.model import Scenario
from environom.moo import ObjectiveBounds, ParetoPoint, _available_reporting
from environom.objectives import breakdown
from environom.problem import EnergyProblem
from environom.scenario_io import fmt

OMEGA_COLS = tuple(f"omega_{i}" for i in PROFILE_INDICATORS)


class ReportError(Exception):
    pass


# ---------------------------------------------------------------------------
# SOO persistence
# ---------------------------------------------------------------------------

def write_soo_run(run_dir, ep: EnergyProblem, results: dict,
                  bounds: ObjectiveBounds) -> None:
    run_dir = Path(run_dir)
    reporting = _available_reporting(ep.scenario)
    cols = OPTIMIZABLE_OBJECTIVES + reporting

    with open(run_dir / "objective_values.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "status") + cols)
        for obj, res in results.items():
            row = [obj, res.status.value]
            merged = {**res.values, **res.reporting}
            row += [fmt(merged[c]) if c in merged else "" for c in cols]
            w.writerow(row)

    with open(run_dir / "bounds.json", "w") as fh:
        json.dump({"f_min": bounds.f_min, "f_max": bounds.f_max},
                  fh, indent=1, sort_keys=True)
        fh.write("\n")

    with open(run_dir / "capacities.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "tech", "capacity", "annual_use", "storage_energy"))
        for obj, res in results.items():
            view = ep.view(res.solution)
            for t in ep.scenario.technologies:
                energy = fmt(view.E[t.id]) if t.id in view.E else ""
                w.writerow((obj, t.id, fmt(view.F[t.id]),
                            fmt(view.annual_use(t.id)), energy))

    categories = {t.id: t.end_use_category for t in ep.scenario.technologies}
    with open(run_dir / "compositions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "objective", "entity", "kind", "end_use_category",
                    "constant", "variable", "total"))
        for obj, res in results.items():
            view = ep.view(res.solution)
            for target in cols:
                bd = breakdown(ep, view, target)
                for row in bd.rows:
                    w.writerow((obj, target, row.entity, row.kind,
                                categories.get(row.entity, ""),
                                fmt(row.constant), fmt(row.variable),
                                fmt(row.total)))


def read_soo_values(run_dir) -> dict:
    """objective_values.csv -> {run: {objective: value}} (optimal runs only)."""
    out = {}
    with open(Path(run_dir) / "objective_values.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "optimal":
                continue
            out[row["run"]] = {k: float(v) for k, v in row.items()
                               if k not in ("run", "status") and v != ""}
    return out


def read_bounds(run_dir) -> ObjectiveBounds:
    with open(Path(run_dir) / "bounds.json") as fh:
        data = json.load(fh)
    return ObjectiveBounds(f_min=data["f_min"], f_max=data["f_max"])


# ---------------------------------------------------------------------------
# MOO persistence (streaming)
# ---------------------------------------------------------------------------

class ParetoWriter:
    """Streams pareto_points.csv plus the capacities sidecar, one row per
    sample, in index order.  Solve times are deliberately not persisted:
    artifact bytes must depend on inputs only."""

    def __init__(self, run_dir, reporting_cols):
        run_dir = Path(run_dir)
        self.reporting = tuple(reporting_cols)
        self._points_fh = open(run_dir / "pareto_points.csv", "w", newline="")
        self._points = csv.writer(self._points_fh)
        self._points.writerow(("index",) + OMEGA_COLS + ("status",)
                              + OPTIMIZABLE_OBJECTIVES + self.reporting)
        self._caps_fh = open(run_dir / "capacities.csv", "w", newline="")
        self._caps = csv.writer(self._caps_fh)
        self._caps.writerow(("index", "tech", "capacity", "annual_use"))

    def write(self, pt: ParetoPoint) -> None:
        row = [str(pt.index)] + [fmt(w) for w in pt.omega] + [pt.status]
        merged = {**pt.values, **pt.reporting}
        row += [fmt(merged[c]) if c in merged else ""
                for c in OPTIMIZABLE_OBJECTIVES + self.reporting]
        self._points.writerow(row)
        for tech in sorted(pt.capacities):
            self._caps.writerow((str(pt.index), tech, fmt(pt.capacities[tech]),
                                 fmt(pt.use.get(tech, 0.0))))

    def close(self) -> None:
        self._points_fh.close()
        self._caps_fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_pareto_points(run_dir):
    """pareto_points.csv + capacities.csv -> (rows, capacity table).

    rows: list of dicts with index, omega tuple, status and float values.
    capacities: {index: {tech: capacity}}.
    """
    run_dir = Path(run_dir)
    rows = []
    with open(run_dir / "pareto_points.csv", newline="") as fh:
        for raw in csv.DictReader(fh):
            entry = {
                "index": int(raw["index"]),
                "omega": tuple(float(raw[c]) for c in OMEGA_COLS),
                "status": raw["status"],
                "values": {k: float(v) for k, v in raw.items()
                           if k not in ("index", "status") + OMEGA_COLS and v != ""},
            }
            rows.append(entry)
    caps: dict[int, dict] = {}
    with open(run_dir / "capacities.csv", newline="") as fh:
        for raw in csv.DictReader(fh):
            caps.setdefault(int(raw["index"]), {})[raw["tech"]] = float(raw["capacity"])
    return rows, caps


# ---------------------------------------------------------------------------
# Correlation serialization (bit-exact round trip)
# ---------------------------------------------------------------------------

def write_correlation(cm: CorrelationMatrix, out_dir, basename="correlation") -> None:
    out_dir = Path(out_dir)
    for suffix, matrix in (("r", cm.r), ("p", cm.p)):
        with open(out_dir / f"{basename}_{suffix}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("variable",) + cm.names)
            for name, row in zip(cm.names, matrix):
                w.writerow((name,) + tuple(fmt(v) for v in row))
    with open(out_dir / f"{basename}_meta.json", "w") as fh:
        json.dump({"n_samples": cm.n_samples, "dropped": list(cm.dropped)},
                  fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_correlation(out_dir, basename="correlation") -> CorrelationMatrix:
    out_dir = Path(out_dir)

    def read_matrix(suffix):
        with open(out_dir / f"{basename}_{suffix}.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        names = tuple(rows[0][1:])
        mat = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
        return names, mat

    names, r = read_matrix("r")
    _, p = read_matrix("p")
    with open(out_dir / f"{basename}_meta.json") as fh:
        meta = json.load(fh)
    return CorrelationMatrix(names=names, r=r, p=p,
                             n_samples=meta["n_samples"],
                             dropped=tuple(meta["dropped"]))


# ---------------------------------------------------------------------------
# Analyze
# ---------------------------------------------------------------------------

def analyze(out_dir, scenario: Scenario, soo_dir, moo_dir, *,
            histogram_prominence: float = 0.02) -> dict:
    """Produce the statistics bundle from persisted soo/moo artifacts.

    Returns the summary dict (also written as summary.json).
    """
    out_dir = Path(out_dir)
    soo_values = read_soo_values(soo_dir)
    points, caps = read_pareto_points(moo_dir)
    optimal = [p for p in points if p["status"] == "optimal"]

    # Correlation + distributions over objectives and technology capacities.
    tech_ids = [t.id for t in scenario.technologies]
    var_names = list(OPTIMIZABLE_OBJECTIVES) + [f"F[{t}]" for t in tech_ids]
    data = np.array([
        [p["values"][obj] for obj in OPTIMIZABLE_OBJECTIVES]
        + [caps.get(p["index"], {}).get(t, 0.0) for t in tech_ids]
        for p in optimal])
    summary = {
        "n_samples": len(points),
        "n_optimal": len(optimal),
        "n_infeasible": sum(1 for p in points if p["status"] == "infeasible"),
    }

    if len(optimal) >= 3:
        cm = pearson(data, var_names)
        write_correlation(cm, out_dir)
        dists = []
        for j, name in enumerate(var_names):
            d = distribution(data[:, j], name, prominence=histogram_prominence)
            dists.append({
                "name": name,
                "bin_edges": [float(x) for x in d.bin_edges],
                "frequencies": [float(x) for x in d.frequencies],
                "modes": [[float(a), float(b)] for a, b in d.modes],
            })
        with open(out_dir / "distributions.json", "w") as fh:
            json.dump(dists, fh, indent=1)
            fh.write("\n")
        summary["correlation_variables"] = list(cm.names)
        summary["dropped_constant_variables"] = list(cm.dropped)
    else:
        summary["correlation_variables"] = []
        summary["dropped_constant_variables"] = []

    # Non-dominated front over the six objectives.
    with open(out_dir / "pareto_front.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("index",) + OPTIMIZABLE_OBJECTIVES)
        if optimal:
            vals = np.array([[p["values"][o] for o in OPTIMIZABLE_OBJECTIVES]
                             for p in optimal])
            mask = non_dominated_mask(vals)
            kept = 0
            for p, keep in zip(optimal, mask):
                if keep:
                    w.writerow((str(p["index"]),)
                               + tuple(fmt(p["values"][o])
                                       for o in OPTIMIZABLE_OBJECTIVES))
                    kept += 1
            summary["n_pareto"] = kept
        else:
            summary["n_pareto"] = 0

    # Burden shift against the scenario reference, when one is bundled.
    if scenario.reference_run:
        objectives = tuple(o for o in OPTIMIZABLE_OBJECTIVES
                           if o in scenario.reference_run)
        table = burden_shift(
            {run: vals for run, vals in soo_values.items()},
            scenario.reference_run, objectives=objectives,
            reference_name="reference_2020")
        with open(out_dir / "burden_shift.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("run",) + table.objectives)
            for rec in table.as_records():
                w.writerow([rec["run"]] + [
                    rec[o] if isinstance(rec[o], str) else fmt(rec[o])
                    for o in table.objectives])
        summary["burden_shift_reference"] = True
    else:
        summary["burden_shift_reference"] = False

    # Composition tables: cost split per run, impact split per run/indicator.
    comp_rows = []
    with open(Path(soo_dir) / "compositions.csv", newline="") as fh:
        comp_rows = list(csv.DictReader(fh))
    with open(out_dir / "cost_composition.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "entity", "kind", "end_use_category",
                    "constant", "variable", "total"))
        for row in comp_rows:
            if row["objective"] == COST:
                w.writerow((row["run"], row["entity"], row["kind"],
                            row["end_use_category"], row["constant"],
                            row["variable"], row["total"]))
    with open(out_dir / "lcia_composition.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "indicator", "entity", "kind", "end_use_category",
                    "constant", "variable", "total"))
        for row in comp_rows:
            if row["objective"] != COST:
                w.writerow((row["run"], row["objective"], row["entity"],
                            row["kind"], row["end_use_category"],
                            row["constant"], row["variable"], row["total"]))

    # Sectoral phase split: end-use category x constant/variable per objective.
    sector_tot: dict = {}
    for row in comp_rows:
        key = (row["run"], row["objective"],
               row["end_use_category"] or row["kind"])
        agg = sector_tot.setdefault(key, [0.0, 0.0])
        agg[0] += float(row["constant"])
        agg[1] += float(row["variable"])
    with open(out_dir / "sectoral_composition.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("run", "objective", "sector", "constant", "variable"))
        for (run, obj, sector), (c, v) in sorted(sector_tot.items()):
            w.writerow((run, obj, sector, fmt(c), fmt(v)))

    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------------------
# Scatter-matrix report (SVG)
# ---------------------------------------------------------------------------

def render_scatter_matrix(out_path, data: np.ndarray, names,
                          cm: CorrelationMatrix | None = None) -> None:
    """Correlation-matrix figure: distributions on the diagonal, r and p in
    the upper triangle, scatter plus a least-squares trend line with a
    +-1.96 SE band below.  The SVG output is byte-deterministic."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "environom"
    names = tuple(names)
    k = len(names)
    if cm is None:
        cm = pearson(data, names)
    fig, axes = plt.subplots(k, k, figsize=(2.1 * k, 2.1 * k))
    if k == 1:
        axes = np.array([[axes]])
    for i in range(k):
        for j in range(k):
            ax = axes[i][j]
            x, y = data[:, j], data[:, i]
            if i == j:
                ax.hist(x, bins=min(20, max(5, len(x) // 5)), color="#4878a8")
            elif i < j:
                ax.axis("off")
                try:
                    a = cm.names.index(names[j])
                    b = cm.names.index(names[i])
                    r, p = cm.r[a, b], cm.p[a, b]
                    color = plt.get_cmap("RdYlGn")((r + 1) / 2)
                    ax.text(0.5, 0.5, f"r={r:.2f}\np={p:.3f}",
                            ha="center", va="center", fontsize=9,
                            alpha=max(0.25, 1.0 - p), color=color,
                            transform=ax.transAxes)
                except ValueError:
                    pass  # variable was dropped as constant
            else:
                ax.scatter(x, y, s=6, alpha=0.6, color="#5a5a5a", linewidths=0)
                if np.ptp(x) > 0:
                    slope, intercept = np.polyfit(x, y, 1)
                    xs = np.linspace(x.min(), x.max(), 50)
                    fit = slope * xs + intercept
                    resid = y - (slope * x + intercept)
                    dof = max(len(x) - 2, 1)
                    se = np.sqrt(resid @ resid / dof) * np.sqrt(
                        1.0 / len(x) + (xs - x.mean()) ** 2
                        / max((x - x.mean()) @ (x - x.mean()), 1e-300))
                    ax.plot(xs, fit, color="#b03030", lw=1)
                    ax.fill_between(xs, fit - 1.96 * se, fit + 1.96 * se,
                                    color="#b03030", alpha=0.15, linewidth=0)
            if i == k - 1:
                ax.set_xlabel(names[j], fontsize=7)
            if j == 0:
                ax.set_ylabel(names[i], fontsize=7)
            ax.tick_params(labelsize=5)
    fig.tight_layout()
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
