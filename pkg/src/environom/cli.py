"""Command-line pipeline: validate, lci, soo, moo, analyze, report.

Exit codes: 0 success, 1 domain error (bad scenario content, missing prior
stage, stale hashes), 2 usage or missing-file errors.  Completed runs are
keyed by content hashes of their inputs and reused when identical, so every
command is idempotent.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from environom import __version__
from environom.analysis import AnalysisError
from environom.coupling import LcaError, compute_scenario_coefficients, load_mapping
from environom.indicators import OPTIMIZABLE_OBJECTIVES
from environom.lp import LpError
from environom.model import validate_scenario
from environom.moo import MooError, _available_reporting, objective_bounds, run_moo, run_soo_suite
from environom.objectives import ObjectiveError
from environom.problem import StructureError, build_problem
from environom.reports import (
    ParetoWriter,
    ReportError,
    analyze,
    read_bounds,
    read_pareto_points,
    render_scatter_matrix,
    write_soo_run,
)
from environom.scenario_io import (
    ScenarioIOError,
    file_hash,
    load_scenario,
    save_coefficients,
    scenario_hash,
)
from environom.store import RunStore, StoreError
from environom.technosphere import TechnosphereError, load_db

OUT_ENV = "ENVIRONOM_OUT"

_DOMAIN_ERRORS = (ScenarioIOError, StructureError, MooError, LcaError,
                  ObjectiveError, TechnosphereError, StoreError, AnalysisError,
                  ReportError, LpError)


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FileNotFoundError as err:
            _fail(f"missing file: {err}", 2)
        except _DOMAIN_ERRORS as err:
            _fail(str(err), 1)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _out_root(out):
    return Path(out or os.environ.get(OUT_ENV, "runs"))


def _coeff_path(scenario_dir, coefficients):
    path = Path(coefficients) if coefficients else Path(scenario_dir) / "lcia_coefficients.csv"
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def _run_key(scenario_dir, coeff_path) -> str:
    return f"{scenario_hash(scenario_dir)[:12]}-{file_hash(coeff_path)[:12]}"


scenario_option = click.option(
    "--scenario", "scenario_dir", required=True,
    type=click.Path(file_okay=False), help="Scenario directory.")
out_option = click.option(
    "--out", default=None, type=click.Path(file_okay=False),
    help=f"Output root for runs (default: ${OUT_ENV} or ./runs).")
coeff_option = click.option(
    "--coefficients", default=None, type=click.Path(dir_okay=False),
    help="lcia_coefficients.csv to use (default: the scenario's bundled one).")


@click.group()
@click.version_option(version=__version__)
def main():
    """Energy-system optimization coupled with life-cycle impact assessment."""


@main.command()
@scenario_option
@guarded
def validate(scenario_dir):
    """Check scenario invariants and cross-references."""
    s = load_scenario(scenario_dir)
    diagnostics = validate_scenario(s)
    for d in diagnostics:
        click.echo(str(d), err=True)
    if diagnostics:
        _fail(f"{len(diagnostics)} diagnostic(s)", 1)
    click.echo(f"scenario {s.name!r} is valid")


@main.command()
@scenario_option
@click.option("--db", "db_dir", required=True, type=click.Path(file_okay=False),
              help="Background database directory (a_bb/b/c + processes.json).")
@click.option("--mapping", default=None, type=click.Path(dir_okay=False),
              help="mapping.csv (default: <db>/mapping.csv).")
@click.option("--cpc-prefix-matching", is_flag=True, default=False,
              help="Match CPC codes hierarchically by prefix instead of exactly.")
@out_option
@guarded
def lci(scenario_dir, db_dir, mapping, cpc_prefix_matching, out):
    """Compute impact coefficients from the background database."""
    s = load_scenario(scenario_dir)
    db = load_db(db_dir)
    mapping_path = Path(mapping) if mapping else Path(db_dir) / "mapping.csv"
    if not mapping_path.exists():
        raise FileNotFoundError(mapping_path)
    entries = load_mapping(mapping_path)

    store = RunStore(_out_root(out))
    run_id = f"lci-{scenario_hash(scenario_dir)[:12]}-{file_hash(mapping_path)[:12]}"
    if store.is_complete(run_id):
        click.echo(f"reusing completed run {run_id}")
        click.echo(store.run_dir(run_id) / "lcia_coefficients.csv")
        return

    stat, var, kinds, log = compute_scenario_coefficients(
        db, entries, s, prefix_matching=cpc_prefix_matching)
    manifest = {"kind": "lci", "scenario_hash": scenario_hash(scenario_dir),
                "mapping_hash": file_hash(mapping_path), "version": __version__}
    with store.begin(run_id, manifest) as run_dir:
        save_coefficients(run_dir / "lcia_coefficients.csv", stat, var, kinds)
        with open(run_dir / "double_counting_log.json", "w") as fh:
            json.dump(log, fh, indent=1, sort_keys=True)
            fh.write("\n")
    for entity in log["uncharacterized"]:
        click.echo(f"warning: {entity} has no life-cycle mapping "
                   "(all coefficients zero)", err=True)
    click.echo(f"completed run {run_id}")
    click.echo(store.run_dir(run_id) / "lcia_coefficients.csv")


@main.command()
@scenario_option
@coeff_option
@out_option
@guarded
def soo(scenario_dir, coefficients, out):
    """Run all six single-objective optimizations and persist the bounds."""
    coeff_path = _coeff_path(scenario_dir, coefficients)
    s = load_scenario(scenario_dir, coefficients=coeff_path)
    store = RunStore(_out_root(out))
    run_id = f"soo-{_run_key(scenario_dir, coeff_path)}"
    if store.is_complete(run_id):
        click.echo(f"reusing completed run {run_id}")
        return

    ep = build_problem(s)
    results = run_soo_suite(s, ep)
    bounds = objective_bounds(results)
    manifest = {"kind": "soo", "scenario_hash": scenario_hash(scenario_dir),
                "coefficients_hash": file_hash(coeff_path),
                "version": __version__}
    with store.begin(run_id, manifest) as run_dir:
        write_soo_run(run_dir, ep, results, bounds)
    for obj in OPTIMIZABLE_OBJECTIVES:
        click.echo(f"{obj}: {results[obj].values[obj]:.6g}")
    click.echo(f"completed run {run_id}")


@main.command()
@scenario_option
@coeff_option
@click.option("--samples", type=int, required=True, help="Number of Sobol samples.")
@click.option("--relaxation", type=float, default=0.0, show_default=True,
              help="Fractional relaxation applied to every epsilon bound.")
@click.option("--workers", type=int, default=1, show_default=True)
@out_option
@guarded
def moo(scenario_dir, coefficients, samples, relaxation, workers, out):
    """Sweep epsilon-constraint problems over Sobol-sampled weights."""
    if samples < 1:
        raise MooError("n_samples must be at least 1")
    coeff_path = _coeff_path(scenario_dir, coefficients)
    s = load_scenario(scenario_dir, coefficients=coeff_path)
    store = RunStore(_out_root(out))
    key = _run_key(scenario_dir, coeff_path)
    soo_id = f"soo-{key}"
    if not store.is_complete(soo_id):
        raise MooError(f"single-objective run {soo_id} not found; "
                       "run the soo stage first")
    run_id = f"moo-{key}-n{samples}-r{relaxation:g}"
    if store.is_complete(run_id):
        click.echo(f"reusing completed run {run_id}")
        return

    bounds = read_bounds(store.run_dir(soo_id))
    ep = build_problem(s)
    manifest = {"kind": "moo", "scenario_hash": scenario_hash(scenario_dir),
                "coefficients_hash": file_hash(coeff_path),
                "soo_run": soo_id, "n_samples": samples,
                "relaxation": relaxation, "version": __version__}
    statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
    with store.begin(run_id, manifest) as run_dir:
        with ParetoWriter(run_dir, _available_reporting(s)) as writer:
            def stream(pt):
                statuses[pt.status] += 1
                writer.write(pt)

            run_moo(s, samples, relaxation=relaxation, workers=workers,
                    bounds=bounds, problem=ep, on_result=stream)
    click.echo(f"samples: {samples}, optimal: {statuses['optimal']}, "
               f"infeasible: {statuses['infeasible']}")
    click.echo(f"completed run {run_id}")


def _resolve_run(store: RunStore, run_id, prefix, what):
    if run_id:
        if not store.is_complete(run_id):
            raise StoreError(f"unknown run id {run_id!r}")
        return run_id
    matches = store.list_runs(prefix)
    if not matches:
        raise StoreError(f"no completed {what} run found under {store.root} "
                         f"(expected id starting with {prefix!r})")
    if len(matches) > 1:
        raise StoreError(f"multiple {what} runs match: {matches}; "
                         f"pass --{what}-run")
    return matches[0]


def _check_fresh(store: RunStore, run_id: str, scenario_dir, coeff_path):
    man = store.manifest(run_id)
    if man.get("scenario_hash") != scenario_hash(scenario_dir):
        raise StoreError(
            f"run {run_id} was produced from different scenario contents; "
            "re-run the soo/moo stages for the current scenario")
    if man.get("coefficients_hash") not in (None, file_hash(coeff_path)):
        raise StoreError(
            f"run {run_id} used different impact coefficients; re-run the "
            "soo/moo stages with the current coefficients file")


@main.command()
@scenario_option
@coeff_option
@click.option("--soo-run", default=None, help="Explicit soo run id.")
@click.option("--moo-run", default=None, help="Explicit moo run id.")
@out_option
@guarded
def analyze_cmd(scenario_dir, coefficients, soo_run, moo_run, out):
    """Statistics bundle: correlation, distributions, burden shift, compositions."""
    coeff_path = _coeff_path(scenario_dir, coefficients)
    s = load_scenario(scenario_dir, coefficients=coeff_path)
    store = RunStore(_out_root(out))
    key = _run_key(scenario_dir, coeff_path)
    soo_id = _resolve_run(store, soo_run, f"soo-{key}", "soo")
    moo_id = _resolve_run(store, moo_run, f"moo-{key}", "moo")
    _check_fresh(store, soo_id, scenario_dir, coeff_path)
    _check_fresh(store, moo_id, scenario_dir, coeff_path)

    run_id = f"analyze-{moo_id[len('moo-'):]}"
    if store.is_complete(run_id):
        click.echo(f"reusing completed run {run_id}")
        return
    manifest = {"kind": "analyze", "scenario_hash": scenario_hash(scenario_dir),
                "coefficients_hash": file_hash(coeff_path),
                "soo_run": soo_id, "moo_run": moo_id, "version": __version__}
    with store.begin(run_id, manifest) as run_dir:
        summary = analyze(run_dir, s, store.run_dir(soo_id), store.run_dir(moo_id))
    click.echo(json.dumps(summary, indent=1, sort_keys=True))
    click.echo(f"completed run {run_id}")


main.add_command(analyze_cmd, name="analyze")


@main.command()
@scenario_option
@coeff_option
@click.option("--moo-run", default=None, help="Explicit moo run id.")
@out_option
@guarded
def report(scenario_dir, coefficients, moo_run, out):
    """Scatter-matrix figure over the six objectives from a moo run."""
    coeff_path = _coeff_path(scenario_dir, coefficients)
    store = RunStore(_out_root(out))
    key = _run_key(scenario_dir, coeff_path)
    moo_id = _resolve_run(store, moo_run, f"moo-{key}", "moo")
    _check_fresh(store, moo_id, scenario_dir, coeff_path)

    run_id = f"report-{moo_id[len('moo-'):]}"
    if store.is_complete(run_id):
        click.echo(f"reusing completed run {run_id}")
        return
    points, _ = read_pareto_points(store.run_dir(moo_id))
    optimal = [p for p in points if p["status"] == "optimal"]
    if len(optimal) < 3:
        raise ReportError("need at least 3 optimal samples to draw the matrix")
    data = np.array([[p["values"][o] for o in OPTIMIZABLE_OBJECTIVES]
                     for p in optimal])
    manifest = {"kind": "report", "moo_run": moo_id, "version": __version__,
                "scenario_hash": scenario_hash(scenario_dir)}
    with store.begin(run_id, manifest) as run_dir:
        render_scatter_matrix(run_dir / "scatter_matrix.svg", data,
                              OPTIMIZABLE_OBJECTIVES)
    click.echo(f"completed run {run_id}")


if __name__ == "__main__":
    main()
