"""Economic and life-cycle impact objectives as linear expressions over (F, Ft, R).

The cost objective charges annualized investment on new capacity only
(F - f_ext), maintenance on all installed capacity, and operating cost on
resource draw.  Impact objectives charge the per-capacity score spread over
the technology lifetime plus the per-use score on annual operation; resource
draw carries its own per-unit operation score, mirroring the cost treatment.

Every objective is exactly linear, so scaling a solution scales the scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from environom.indicators import COST, OPTIMIZABLE_OBJECTIVES
from environom.model import N_PERIODS
from environom.problem import EnergyProblem, SolutionView


class ObjectiveError(Exception):
    pass


class UncharacterizedError(ObjectiveError):
    """Raised when entities lack impact coefficients and are not marked exempt.

    Silent zero impacts would make the affected technologies artificially
    attractive to the optimizer, so missing data is a hard error.
    """

    def __init__(self, indicator: str, entities: list[str]):
        self.indicator = indicator
        self.entities = entities
        super().__init__(
            f"indicator {indicator}: no impact coefficients for "
            + ", ".join(entities))


def annualization_factor(rate: float, lifetime: float) -> float:
    """Capital-recovery factor per year; 1/lifetime in the zero-rate limit."""
    if lifetime < 1:
        raise ObjectiveError(f"lifetime must be at least 1 year, got {lifetime}")
    if rate < 0:
        raise ObjectiveError(f"discount rate must be non-negative, got {rate}")
    if rate == 0.0:
        return 1.0 / lifetime
    q = (1.0 + rate) ** lifetime
    return rate * q / (q - 1.0)


@dataclass(frozen=True)
class BreakdownRow:
    entity: str
    kind: str        # "technology" | "resource"
    constant: float  # capacity-driven share
    variable: float  # use-driven share

    @property
    def total(self) -> float:
        return self.constant + self.variable


@dataclass(frozen=True)
class ObjectiveBreakdown:
    objective: str
    rows: tuple[BreakdownRow, ...]

    @property
    def total(self) -> float:
        return float(sum(r.constant for r in self.rows)
                     + sum(r.variable for r in self.rows))


def cost_vector(ep: EnergyProblem) -> tuple[np.ndarray, float]:
    """Total-cost coefficients: investment is charged on F - f_ext only."""
    s = ep.scenario
    t_op = s.t_op()
    c = np.zeros(ep.lp.n_vars)
    c0 = 0.0
    for t in s.technologies:
        tau = annualization_factor(s.discount_rate, t.lifetime)
        c[ep.i_f[t.id]] += t.c_inv * tau + t.c_maint
        c0 -= t.c_inv * tau * t.f_ext
    for r in s.resources:
        for k in range(N_PERIODS):
            c[ep.i_r[r.id][k]] += r.c_op * t_op[k]
    return c, c0


def lcia_vector(ep: EnergyProblem, indicator: str) -> tuple[np.ndarray, float]:
    """Impact coefficients for one indicator; lifetime-divided capacity scores."""
    s = ep.scenario
    t_op = s.t_op()
    missing: list[str] = []
    c = np.zeros(ep.lp.n_vars)
    for t in s.technologies:
        if indicator not in t.lcia_stat or indicator not in t.lcia_var:
            if not t.lcia_exempt:
                missing.append(f"technology {t.id}")
            continue
        c[ep.i_f[t.id]] += t.lcia_stat[indicator] / t.lifetime
        var = t.lcia_var[indicator]
        for k in range(N_PERIODS):
            c[ep.i_ft[t.id][k]] += var * t_op[k]
    for r in s.resources:
        if indicator not in r.lcia_var:
            missing.append(f"resource {r.id}")
            continue
        var = r.lcia_var[indicator]
        for k in range(N_PERIODS):
            c[ep.i_r[r.id][k]] += var * t_op[k]
    if missing:
        raise UncharacterizedError(indicator, missing)
    return c, 0.0


def objective_vector(ep: EnergyProblem, objective: str) -> tuple[np.ndarray, float]:
    if objective == COST:
        return cost_vector(ep)
    return lcia_vector(ep, objective)


def breakdown(ep: EnergyProblem, view: SolutionView, objective: str) -> ObjectiveBreakdown:
    """Per-entity constant/variable split; the parts sum to the objective value."""
    s = ep.scenario
    rows: list[BreakdownRow] = []
    if objective == COST:
        for t in s.technologies:
            tau = annualization_factor(s.discount_rate, t.lifetime)
            const = t.c_inv * tau * (view.F[t.id] - t.f_ext) + t.c_maint * view.F[t.id]
            rows.append(BreakdownRow(t.id, "technology", const, 0.0))
        for r in s.resources:
            rows.append(BreakdownRow(
                r.id, "resource", 0.0, r.c_op * view.annual_resource_use(r.id)))
    else:
        for t in s.technologies:
            stat = t.lcia_stat.get(objective, 0.0)
            var = t.lcia_var.get(objective, 0.0)
            const = stat / t.lifetime * view.F[t.id]
            rows.append(BreakdownRow(
                t.id, "technology", const, var * view.annual_use(t.id)))
        for r in s.resources:
            var = r.lcia_var.get(objective, 0.0)
            rows.append(BreakdownRow(
                r.id, "resource", 0.0, var * view.annual_resource_use(r.id)))
    return ObjectiveBreakdown(objective, tuple(rows))


def evaluate(ep: EnergyProblem, view: SolutionView, objective: str) -> float:
    """Re-account an objective from primal values (independent of the solver)."""
    return breakdown(ep, view, objective).total


def evaluate_many(ep: EnergyProblem, view: SolutionView,
                  objectives=OPTIMIZABLE_OBJECTIVES) -> dict:
    return {obj: evaluate(ep, view, obj) for obj in objectives}
