"""Single- and multi-objective optimization drives.

The six single-objective runs establish per-indicator bounds: the minimum of
each impact indicator at its own optimum and the maximum of its value across
all six solutions.  The multi-objective sweep then minimizes cost under one
upper bound per impact indicator, with the bound interpolated between those
extremes by a Sobol-sampled weight in [0, 1] (weight 1 = most relaxed).

Every sample is solved cold.  A warm-start chain would be marginally faster
but would make the results depend on worker count and sample order; the sweep
must be bitwise reproducible from (scenario, n_samples, relaxation) alone.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from environom.indicators import (
    COST,
    OPTIMIZABLE_OBJECTIVES,
    PROFILE_INDICATORS,
    REPORTING_CATEGORIES,
)
from environom.lp import LE, Solution, Status, solve
from environom.model import Scenario
from environom.objectives import evaluate_many, lcia_vector, objective_vector
from environom.problem import EnergyProblem, build_problem

EPSILON_TOL = 1e-6  # scaled feasibility allowance on the interpolated bounds


class MooError(Exception):
    pass


@dataclass(frozen=True)
class SooResult:
    objective: str
    solution: Solution
    values: dict            # objective id -> value at this optimum
    reporting: dict         # reporting category -> value

    @property
    def status(self) -> Status:
        return self.solution.status


@dataclass(frozen=True)
class ObjectiveBounds:
    f_min: dict             # indicator -> its own single-objective optimum
    f_max: dict             # indicator -> max across the six optima

    def interpolate(self, omega) -> dict:
        """Upper bound per indicator: w * f_max + (1 - w) * f_min."""
        return {
            ind: float(w) * self.f_max[ind] + (1.0 - float(w)) * self.f_min[ind]
            for ind, w in zip(PROFILE_INDICATORS, omega)
        }


@dataclass(frozen=True)
class ParetoPoint:
    index: int
    omega: tuple            # one weight per impact indicator, in catalog order
    status: str
    values: dict            # six objective values (empty unless optimal)
    reporting: dict         # reporting-category values (empty unless optimal)
    capacities: dict        # tech -> installed capacity
    use: dict               # tech -> annual operation
    use_profile: dict       # tech -> per-period operation rates
    solve_time: float = 0.0  # wall time; informational only, never persisted


def _available_reporting(s: Scenario) -> tuple[str, ...]:
    present: set[str] = set()
    for t in s.technologies:
        present.update(t.lcia_stat)
        present.update(t.lcia_var)
    for r in s.resources:
        present.update(r.lcia_var)
    return tuple(i for i in REPORTING_CATEGORIES if i in present)


def _evaluate_point(ep: EnergyProblem, sol: Solution) -> tuple[dict, dict]:
    view = ep.view(sol)
    values = evaluate_many(ep, view, OPTIMIZABLE_OBJECTIVES)
    reporting = evaluate_many(ep, view, _available_reporting(ep.scenario))
    return values, reporting


def soo(ep: EnergyProblem, objective: str) -> SooResult:
    """Minimize one objective and record every other objective at the optimum."""
    if objective not in OPTIMIZABLE_OBJECTIVES:
        raise MooError(f"{objective!r} is not an optimizable objective")
    c, c0 = objective_vector(ep, objective)
    sol = solve(ep.lp.with_objective(c, c0))
    if sol.status is not Status.OPTIMAL:
        return SooResult(objective=objective, solution=sol, values={}, reporting={})
    values, reporting = _evaluate_point(ep, sol)
    return SooResult(objective=objective, solution=sol, values=values,
                     reporting=reporting)


def run_soo_suite(scenario: Scenario, problem: EnergyProblem | None = None) -> dict:
    """All six single-objective optimizations, in canonical objective order."""
    ep = problem if problem is not None else build_problem(scenario)
    return {obj: soo(ep, obj) for obj in OPTIMIZABLE_OBJECTIVES}


def objective_bounds(results: dict) -> ObjectiveBounds:
    """Bounds from a complete, all-optimal suite of single-objective runs."""
    bad = [obj for obj, r in results.items() if r.status is not Status.OPTIMAL]
    if bad:
        raise MooError(f"single-objective runs not optimal: {bad}")
    f_min, f_max = {}, {}
    for ind in PROFILE_INDICATORS:
        f_min[ind] = results[ind].values[ind]
        f_max[ind] = max(r.values[ind] for r in results.values())
    return ObjectiveBounds(f_min=f_min, f_max=f_max)


def _epsilon_lp(ep: EnergyProblem, bounds: ObjectiveBounds, omega,
                relaxation: float):
    caps = bounds.interpolate(omega)
    cost_c, cost_c0 = objective_vector(ep, COST)
    rows, senses, rhs, names = [], [], [], []
    for ind in PROFILE_INDICATORS:
        c, _ = lcia_vector(ep, ind)
        rows.append(sparse.csr_matrix(c))
        senses.append(LE)
        rhs.append(caps[ind] * (1.0 + relaxation))
        names.append(f"epsilon[{ind}]")
    lp = ep.lp.with_objective(cost_c, cost_c0)
    return lp.with_rows(sparse.vstack(rows), tuple(senses),
                        np.asarray(rhs), tuple(names))


def epsilon_run(ep: EnergyProblem, bounds: ObjectiveBounds, omega,
                *, relaxation: float = 0.0, index: int = 0) -> ParetoPoint:
    """One cost minimization under interpolated impact bounds."""
    omega = tuple(float(w) for w in omega)
    if len(omega) != len(PROFILE_INDICATORS):
        raise MooError(f"expected {len(PROFILE_INDICATORS)} weights, got {len(omega)}")
    t0 = time.perf_counter()
    sol = solve(_epsilon_lp(ep, bounds, omega, relaxation))
    dt = time.perf_counter() - t0
    if sol.status is not Status.OPTIMAL:
        return ParetoPoint(index=index, omega=omega, status=sol.status.value,
                           values={}, reporting={}, capacities={}, use={},
                           use_profile={}, solve_time=dt)
    values, reporting = _evaluate_point(ep, sol)
    view = ep.view(sol)
    return ParetoPoint(
        index=index, omega=omega, status=sol.status.value, values=values,
        reporting=reporting, capacities=dict(view.F),
        use={t: view.annual_use(t) for t in view.Ft},
        use_profile={t: tuple(v) for t, v in view.Ft.items()},
        solve_time=dt)


def check_epsilon_satisfaction(point: ParetoPoint, bounds: ObjectiveBounds,
                               relaxation: float = 0.0) -> list[str]:
    """Violations of the interpolated bounds at an optimal point (scaled 1e-6)."""
    if point.status != Status.OPTIMAL.value:
        return []
    caps = bounds.interpolate(point.omega)
    out = []
    for ind in PROFILE_INDICATORS:
        cap = caps[ind] * (1.0 + relaxation)
        tol = EPSILON_TOL * max(1.0, abs(cap))
        if point.values[ind] > cap + tol:
            out.append(f"{ind}: {point.values[ind]!r} > {cap!r}")
    return out


# -- sweep ------------------------------------------------------------------

_POOL_CTX: dict = {}


def _pool_init(payload):
    _POOL_CTX["payload"] = payload


def _pool_run(task):
    index, omega = task
    ep, bounds, relaxation = _POOL_CTX["payload"]
    return epsilon_run(ep, bounds, omega, relaxation=relaxation, index=index)


def run_moo(scenario: Scenario, n_samples: int, *, relaxation: float = 0.0,
            workers: int = 1, skip: int = 1, bounds: ObjectiveBounds | None = None,
            problem: EnergyProblem | None = None, on_result=None) -> list[ParetoPoint]:
    """Sobol-weighted epsilon-constraint sweep.

    Deterministic in (scenario, n_samples, relaxation, skip): worker count
    only changes wall time.  Infeasible samples are kept in the result list,
    never dropped.  ``on_result`` is called once per point in index order as
    results become available.
    """
    from environom.sobol import sobol_sequence

    if n_samples < 1:
        raise MooError(f"n_samples must be at least 1, got {n_samples}")
    ep = problem if problem is not None else build_problem(scenario)
    if bounds is None:
        bounds = objective_bounds(run_soo_suite(scenario, ep))
    weights = sobol_sequence(len(PROFILE_INDICATORS), n_samples, skip=skip)

    points: list[ParetoPoint] = []
    if workers <= 1:
        for k in range(n_samples):
            pt = epsilon_run(ep, bounds, weights[k], relaxation=relaxation, index=k)
            points.append(pt)
            if on_result is not None:
                on_result(pt)
        return points

    tasks = [(k, tuple(weights[k])) for k in range(n_samples)]
    buffered: dict[int, ParetoPoint] = {}
    next_idx = 0
    with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                             initargs=((ep, bounds, relaxation),)) as pool:
        for pt in pool.map(_pool_run, tasks):
            buffered[pt.index] = pt
            while next_idx in buffered:
                out = buffered.pop(next_idx)
                points.append(out)
                if on_result is not None:
                    on_result(out)
                next_idx += 1
    return points
