"""Deterministic LP/MILP solving: bounded-variable revised simplex plus branch and bound.

The solver is self-contained so that identical inputs give bitwise-identical
solutions on any machine with IEEE-754 doubles.  Pricing is Dantzig's rule
with ties broken by lowest variable index; after a long stall without
objective progress the pivot rule permanently switches to Bland's rule, which
guarantees termination.  Rows are scaled by their max-norm before solving.

Integer variables are handled by best-bound branch and bound on top of the
simplex; problems without integer variables never branch.
"""

from __future__ import annotations

import enum
import heapq
import os
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

LE = "<="
EQ = "="
GE = ">="
_SENSES = (LE, EQ, GE)

# Reduced-cost / ratio-test tolerance; feasibility is 1e-7 on max-norm-scaled rows.
_TOL_PIVOT = 1e-9
_TOL_FEAS = 1e-7
_TIE = 1e-12
_REFACTOR_EVERY = 100
_STALL_LIMIT = 300

_MAXITER_ENV = "ENVIRONOM_LP_MAXITER"

# Variable statuses.
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3


class LpError(Exception):
    """Structural problem with an LP definition."""


class NumericalError(LpError):
    """The simplex could not make progress (cycling protection tripped)."""


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Basis:
    """Exportable simplex basis: basic column per row plus variable statuses."""

    basic: np.ndarray          # (m,) column indices into [structural | slacks]
    status: np.ndarray         # (n + m,) entries in {basic 0, lower 1, upper 2, free 3}


@dataclass(frozen=True)
class Solution:
    status: Status
    x: np.ndarray              # structural variable values (empty unless OPTIMAL)
    objective: float
    iterations: int
    basis: Basis | None = None

    def value(self, problem: "LinearProgram", name: str) -> float:
        return float(self.x[problem.var_index(name)])


@dataclass(frozen=True)
class LinearProgram:
    """min c'x + c0  s.t.  A x {<=,=,>=} rhs,  lo <= x <= hi.

    Immutable after construction; the with_* helpers return modified copies
    sharing the untouched arrays.
    """

    c: np.ndarray
    A: sparse.csr_matrix
    senses: tuple[str, ...]
    rhs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    c0: float = 0.0
    integer: np.ndarray | None = None
    var_names: tuple[str, ...] = ()
    row_names: tuple[str, ...] = ()
    _name_map: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m, n = self.A.shape
        if len(self.c) != n or len(self.lo) != n or len(self.hi) != n:
            raise LpError("objective/bound length does not match column count")
        if len(self.rhs) != m or len(self.senses) != m:
            raise LpError("rhs/sense length does not match row count")
        for s in self.senses:
            if s not in _SENSES:
                raise LpError(f"unknown constraint sense {s!r}")
        if np.any(self.lo > self.hi):
            j = int(np.argmax(self.lo > self.hi))
            raise LpError(f"variable {self._vname(j)} has lo > hi")
        if not np.all(np.isfinite(self.rhs)):
            raise LpError("rhs must be finite")
        if self.var_names and len(self.var_names) != n:
            raise LpError("var_names length mismatch")
        if self.row_names and len(self.row_names) != m:
            raise LpError("row_names length mismatch")
        if self.var_names and not self._name_map:
            self._name_map.update({nm: j for j, nm in enumerate(self.var_names)})

    # -- introspection ------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def _vname(self, j: int) -> str:
        return self.var_names[j] if self.var_names else f"x{j}"

    def var_index(self, name: str) -> int:
        try:
            return self._name_map[name]
        except KeyError:
            raise LpError(f"unknown variable {name!r}") from None

    def has_integers(self) -> bool:
        return self.integer is not None and bool(np.any(self.integer))

    # -- derivation ---------------------------------------------------------

    def with_objective(self, c: np.ndarray, c0: float = 0.0) -> "LinearProgram":
        if len(c) != self.n_vars:
            raise LpError("objective length mismatch")
        return replace(self, c=np.asarray(c, dtype=float), c0=float(c0))

    def with_rows(self, A_extra: sparse.spmatrix, senses: tuple[str, ...],
                  rhs: np.ndarray, names: tuple[str, ...] = ()) -> "LinearProgram":
        A2 = sparse.vstack([self.A, sparse.csr_matrix(A_extra)], format="csr")
        new_names = self.row_names + tuple(names) if self.row_names else ()
        return replace(self, A=A2, senses=self.senses + tuple(senses),
                       rhs=np.concatenate([self.rhs, np.asarray(rhs, dtype=float)]),
                       row_names=new_names)

    def with_bounds(self, lo: np.ndarray, hi: np.ndarray) -> "LinearProgram":
        return replace(self, lo=np.asarray(lo, dtype=float),
                       hi=np.asarray(hi, dtype=float))

    # -- text dump (debugging aid) ------------------------------------------

    def dumps(self) -> str:
        out = ["# environom-lp 1", f"vars {self.n_vars}"]
        ints = self.integer if self.integer is not None else np.zeros(self.n_vars, bool)
        for j in range(self.n_vars):
            out.append("v %d %s %s %s %d %s" % (
                j, self._vname(j), _fmt(self.lo[j]), _fmt(self.hi[j]),
                int(ints[j]), _fmt(self.c[j])))
        out.append(f"obj-const {_fmt(self.c0)}")
        out.append(f"rows {self.n_rows}")
        for i in range(self.n_rows):
            name = self.row_names[i] if self.row_names else f"r{i}"
            out.append("r %d %s %s %s" % (i, name, self.senses[i], _fmt(self.rhs[i])))
        coo = self.A.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            out.append("a %d %d %s" % (coo.row[k], coo.col[k], _fmt(coo.data[k])))
        return "\n".join(out) + "\n"

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "LinearProgram":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        it = iter(lines)
        head = next(it).split()
        if head[0] != "vars":
            raise LpError("bad dump: expected 'vars'")
        n = int(head[1])
        lo = np.zeros(n); hi = np.zeros(n); c = np.zeros(n)
        ints = np.zeros(n, bool); vnames = [""] * n
        for _ in range(n):
            tok = next(it).split()
            j = int(tok[1])
            vnames[j] = tok[2]
            lo[j], hi[j] = float(tok[3]), float(tok[4])
            ints[j] = bool(int(tok[5])); c[j] = float(tok[6])
        tok = next(it).split()
        if tok[0] != "obj-const":
            raise LpError("bad dump: expected 'obj-const'")
        c0 = float(tok[1])
        tok = next(it).split()
        m = int(tok[1])
        senses = [""] * m; rhs = np.zeros(m); rnames = [""] * m
        rows, cols, vals = [], [], []
        for ln in it:
            tok = ln.split()
            if tok[0] == "r":
                i = int(tok[1]); rnames[i] = tok[2]; senses[i] = tok[3]; rhs[i] = float(tok[4])
            elif tok[0] == "a":
                rows.append(int(tok[1])); cols.append(int(tok[2])); vals.append(float(tok[3]))
            else:
                raise LpError(f"bad dump line: {ln!r}")
        A = sparse.csr_matrix((vals, (rows, cols)), shape=(m, n))
        return cls(c=c, A=A, senses=tuple(senses), rhs=rhs, lo=lo, hi=hi, c0=c0,
                   integer=ints if ints.any() else None,
                   var_names=tuple(vnames), row_names=tuple(rnames))

    @classmethod
    def load(cls, path) -> "LinearProgram":
        with open(path) as fh:
            return cls.loads(fh.read())


def _fmt(x: float) -> str:
    return "%.17g" % x


class _Simplex:
    """One solve of one LP; instances are single-use."""

    def __init__(self, lp: LinearProgram, max_iterations: int | None = None):
        m, n = lp.A.shape
        self.n_struct = n
        self.m = m
        A = lp.A.tocsr().astype(float)
        norms = np.zeros(m)
        if A.nnz:
            norms = abs(A).max(axis=1).toarray().ravel()
        self.row_scale = np.where(norms > 0, norms, 1.0)
        A = sparse.diags(1.0 / self.row_scale) @ A
        b = lp.rhs / self.row_scale

        # Slack per row: <= gives s in [0, inf), >= gives s in (-inf, 0], = pins s at 0.
        slo = np.zeros(m); shi = np.zeros(m)
        for i, s in enumerate(lp.senses):
            if s == LE:
                shi[i] = np.inf
            elif s == GE:
                slo[i] = -np.inf
        self.A = sparse.hstack([A, sparse.eye(m)], format="csc")
        self.b = b
        self.lo = np.concatenate([lp.lo, slo])
        self.hi = np.concatenate([lp.hi, shi])
        # Objective scaled to unit max-norm so the pivot tolerance is relative.
        cmax = float(np.max(np.abs(lp.c))) if n else 0.0
        self.obj_scale = cmax if cmax > 0 else 1.0
        self.c = np.concatenate([lp.c / self.obj_scale, np.zeros(m)])
        self.n_total = n + m

        cap = max_iterations
        if cap is None:
            env = os.environ.get(_MAXITER_ENV)
            cap = int(env) if env else max(20000, 200 * (m + n))
        self.max_iterations = cap
        self.iterations = 0

        self.status = np.full(self.n_total, _AT_LOWER, dtype=np.int8)
        self.basic = np.arange(n, n + m)
        self.Binv = np.eye(m)
        self.xN = np.zeros(self.n_total)
        self.xB = np.zeros(m)
        self.bland = False
        self._stall = 0
        self._best_obj = np.inf
        self._art_cols: list[int] = []

    # -- setup ---------------------------------------------------------------

    def _default_nonbasic(self, j: int) -> tuple[int, float]:
        lo, hi = self.lo[j], self.hi[j]
        if np.isfinite(lo) and np.isfinite(hi):
            return (_AT_LOWER, lo) if abs(lo) <= abs(hi) else (_AT_UPPER, hi)
        if np.isfinite(lo):
            return _AT_LOWER, lo
        if np.isfinite(hi):
            return _AT_UPPER, hi
        return _FREE, 0.0

    def _init_cold(self):
        for j in range(self.n_total):
            st, val = self._default_nonbasic(j)
            self.status[j] = st
            self.xN[j] = val
        # Slacks start basic; rows whose implied slack value violates its bounds
        # get an artificial column carrying the violation.
        resid = self.b - self._A_times_nonbasic()
        n, m = self.n_struct, self.m
        art_rows, art_signs = [], []
        for i in range(m):
            s = n + i
            if self.lo[s] - _TOL_FEAS <= resid[i] <= self.hi[s] + _TOL_FEAS:
                self.status[s] = _BASIC
                self.basic[i] = s
            else:
                bound = self.lo[s] if resid[i] < self.lo[s] else self.hi[s]
                self.status[s] = _AT_LOWER if bound == self.lo[s] else _AT_UPPER
                self.xN[s] = bound
                art_rows.append(i)
                art_signs.append(1.0 if resid[i] - bound > 0 else -1.0)
        if art_rows:
            self._add_artificials(art_rows, art_signs)
        self._refactorize()

    def _add_artificials(self, rows, signs):
        k = len(rows)
        col = sparse.csc_matrix((np.asarray(signs, float), (rows, range(k))),
                                shape=(self.m, k))
        self.A = sparse.hstack([self.A, col], format="csc")
        base = self.n_total
        self._art_cols = list(range(base, base + k))
        self.n_total += k
        self.lo = np.concatenate([self.lo, np.zeros(k)])
        self.hi = np.concatenate([self.hi, np.full(k, np.inf)])
        self.c = np.concatenate([self.c, np.zeros(k)])
        self.status = np.concatenate([self.status, np.full(k, _BASIC, np.int8)])
        self.xN = np.concatenate([self.xN, np.zeros(k)])
        for r, j in zip(rows, self._art_cols):
            self.basic[r] = j

    def _A_times_nonbasic(self) -> np.ndarray:
        vals = np.where(self.status != _BASIC, self.xN, 0.0)
        nz = np.nonzero(vals)[0]
        if len(nz) == 0:
            return np.zeros(self.m)
        return self.A[:, nz] @ vals[nz]

    def _refactorize(self):
        B = self.A[:, self.basic].toarray()
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise NumericalError("singular basis during refactorization")
        self.xB = self.Binv @ (self.b - self._A_times_nonbasic())

    # -- iteration -----------------------------------------------------------

    def _reduced_costs(self, costs: np.ndarray) -> np.ndarray:
        y = costs[self.basic] @ self.Binv
        return costs - (y @ self.A)

    def _choose_entering(self, d: np.ndarray) -> int:
        stat = self.status
        movable = self.lo < self.hi
        viol = np.zeros(self.n_total)
        sel = movable & (stat == _AT_LOWER) & (d < -_TOL_PIVOT)
        viol[sel] = -d[sel]
        sel = movable & (stat == _AT_UPPER) & (d > _TOL_PIVOT)
        viol[sel] = d[sel]
        sel = movable & (stat == _FREE) & (np.abs(d) > _TOL_PIVOT)
        viol[sel] = np.abs(d[sel])
        cand = np.nonzero(viol > 0)[0]
        if len(cand) == 0:
            return -1
        if self.bland:
            return int(cand[0])
        best = viol[cand].max()
        return int(cand[viol[cand] == best][0])

    def _ratio_test(self, step: np.ndarray, rng: float) -> tuple[float, int]:
        """Returns (step length, leaving row) with leave == -1 meaning bound flip."""
        bi = self.basic
        t = np.full(self.m, np.inf)
        with np.errstate(invalid="ignore"):
            pos = step > _TOL_PIVOT
            if pos.any():
                t[pos] = (self.xB[pos] - self.lo[bi[pos]]) / step[pos]
            neg = step < -_TOL_PIVOT
            if neg.any():
                t[neg] = (self.hi[bi[neg]] - self.xB[neg]) / (-step[neg])
        np.maximum(t, 0.0, out=t)
        t_basic = float(t.min()) if self.m else np.inf
        if rng < t_basic - _TIE:
            return rng, -1
        if not np.isfinite(t_basic):
            return np.inf, -2
        ties = np.nonzero(t <= t_basic + _TIE)[0]
        leave = int(ties[np.argmin(bi[ties])])
        return min(t_basic, rng), leave

    def _pivot(self, e: int, leave: int, t: float, dirn: float, w: np.ndarray):
        lv = self.basic[leave]
        self.xB -= (dirn * t) * w
        new_val = (self.xN[e] if self.status[e] != _FREE else 0.0) + dirn * t
        if dirn * w[leave] > 0:
            self.status[lv] = _AT_LOWER
            self.xN[lv] = self.lo[lv]
        else:
            self.status[lv] = _AT_UPPER
            self.xN[lv] = self.hi[lv]
        self.basic[leave] = e
        self.status[e] = _BASIC
        self.xB[leave] = new_val
        piv = w[leave]
        if abs(piv) < 1e-11:
            self._refactorize()
            return
        self.Binv[leave, :] /= piv
        others = np.arange(self.m) != leave
        self.Binv[others, :] -= np.outer(w[others], self.Binv[leave, :])

    def _objective_of(self, costs: np.ndarray) -> float:
        nb = self.status != _BASIC
        return float(costs[self.basic] @ self.xB + costs[nb] @ self.xN[nb])

    def _iterate(self, costs: np.ndarray) -> Status:
        while True:
            d = self._reduced_costs(costs)
            e = self._choose_entering(d)
            if e < 0:
                return Status.OPTIMAL
            if self.iterations >= self.max_iterations:
                raise NumericalError(
                    f"iteration cap {self.max_iterations} reached "
                    f"(set {_MAXITER_ENV} to raise it)")
            self.iterations += 1

            dirn = -1.0 if (self.status[e] == _AT_UPPER or
                            (self.status[e] == _FREE and d[e] > 0)) else 1.0
            w = self.Binv @ self.A[:, [e]].toarray().ravel()
            rng = self.hi[e] - self.lo[e]
            t, leave = self._ratio_test(dirn * w, rng if np.isfinite(rng) else np.inf)
            if leave == -2:
                return Status.UNBOUNDED
            if leave == -1:
                # Bound flip: entering variable jumps to its other bound.
                self.xB -= (dirn * t) * w
                self.status[e] = _AT_UPPER if dirn > 0 else _AT_LOWER
                self.xN[e] = self.hi[e] if dirn > 0 else self.lo[e]
            else:
                self._pivot(e, leave, t, dirn, w)

            if self.iterations % _REFACTOR_EVERY == 0:
                self._refactorize()

            obj = self._objective_of(costs)
            if obj < self._best_obj - _TIE:
                self._best_obj = obj
                self._stall = 0
            else:
                self._stall += 1
                if self._stall > _STALL_LIMIT:
                    self.bland = True

    # -- phases ---------------------------------------------------------------

    def _phase1(self) -> Status:
        if not self._art_cols:
            return Status.OPTIMAL
        costs = np.zeros(self.n_total)
        costs[self._art_cols] = 1.0
        self._best_obj = np.inf
        self._stall = 0
        st = self._iterate(costs)
        if st is not Status.OPTIMAL:  # phase 1 objective is bounded below by 0
            raise NumericalError("phase 1 reported unbounded")
        if self._objective_of(costs) > _TOL_FEAS:
            return Status.INFEASIBLE
        self._drive_out_artificials()
        return Status.OPTIMAL

    def _drive_out_artificials(self):
        art = set(self._art_cols)
        for i in range(self.m):
            if self.basic[i] not in art:
                continue
            row = self.Binv[i, :] @ self.A
            pivot_j = -1
            for j in range(self.n_total):
                if j in art or self.status[j] == _BASIC:
                    continue
                if abs(row[j]) > 1e-9:
                    pivot_j = j
                    break
            if pivot_j < 0:
                continue  # redundant row; artificial stays pinned at zero
            lv = self.basic[i]
            w = self.Binv @ self.A[:, [pivot_j]].toarray().ravel()
            self.Binv[i, :] /= w[i]
            others = np.arange(self.m) != i
            self.Binv[others, :] -= np.outer(w[others], self.Binv[i, :])
            self.basic[i] = pivot_j
            self.status[pivot_j] = _BASIC
            self.status[lv] = _AT_LOWER
            self.xN[lv] = 0.0
            self.xB[i] = 0.0
        # Artificials can never re-enter.
        for j in self._art_cols:
            self.lo[j] = self.hi[j] = 0.0
            if self.status[j] != _BASIC:
                self.status[j] = _AT_LOWER
                self.xN[j] = 0.0
        self._refactorize()

    # -- public --------------------------------------------------------------

    def run(self, warm: Basis | None = None) -> Status:
        warm_ok = False
        if warm is not None:
            warm_ok = self._try_warm(warm)
            if not warm_ok:
                warnings.warn("invalid or stale basis; falling back to cold solve",
                              stacklevel=4)
        if not warm_ok:
            self._init_cold()
            if self._phase1() is Status.INFEASIBLE:
                return Status.INFEASIBLE
        self._best_obj = np.inf
        self._stall = 0
        self.bland = False
        st = self._iterate(self.c)
        if st is Status.OPTIMAL:
            self._refactorize()
        return st

    def _try_warm(self, warm: Basis) -> bool:
        n, m = self.n_struct, self.m
        if len(warm.basic) != m or len(warm.status) != n + m:
            return False
        if np.any(warm.basic < 0) or np.any(warm.basic >= n + m):
            return False
        if not np.all((warm.status >= _BASIC) & (warm.status <= _FREE)):
            return False
        basic_marked = np.nonzero(warm.status == _BASIC)[0]
        if len(basic_marked) != m or set(basic_marked.tolist()) != set(warm.basic.tolist()):
            return False
        self.basic = warm.basic.astype(int).copy()
        self.status = warm.status.astype(np.int8).copy()
        for j in range(n + m):
            st = self.status[j]
            if st == _AT_LOWER:
                if not np.isfinite(self.lo[j]):
                    return False
                self.xN[j] = self.lo[j]
            elif st == _AT_UPPER:
                if not np.isfinite(self.hi[j]):
                    return False
                self.xN[j] = self.hi[j]
            elif st == _FREE:
                self.xN[j] = 0.0
        try:
            self._refactorize()
        except NumericalError:
            return False
        viol = np.maximum(self.lo[self.basic] - self.xB, self.xB - self.hi[self.basic])
        return bool(np.all(viol <= _TOL_FEAS))

    def full_solution(self) -> np.ndarray:
        x = np.where(self.status != _BASIC, self.xN, 0.0)
        x[self.basic] = self.xB
        return x[: self.n_struct]

    def export_basis(self) -> Basis:
        keep = self.n_struct + self.m
        status = self.status[:keep].copy()
        basic = self.basic.copy()
        # Artificial columns cannot be exported; a sentinel makes warm starts
        # reject the basis and restart cold.
        basic[basic >= keep] = -1
        return Basis(basic=basic, status=status)


def _certify(lp: LinearProgram, sx: _Simplex, x: np.ndarray) -> None:
    """Post-solve checks: primal feasibility (1e-7 scaled) and dual feasibility."""
    resid = (lp.A @ x - lp.rhs) / sx.row_scale
    tol = _TOL_FEAS * np.maximum(1.0, np.abs(lp.rhs / sx.row_scale))
    for i, s in enumerate(lp.senses):
        ok = (s == LE and resid[i] <= tol[i]) or \
             (s == GE and resid[i] >= -tol[i]) or \
             (s == EQ and abs(resid[i]) <= tol[i])
        if not ok:
            raise NumericalError(f"row {i} violated by {resid[i]:.3e} after solve")
    bviol = np.maximum(lp.lo - x, x - lp.hi)
    if np.any(bviol > _TOL_FEAS * np.maximum(1.0, np.abs(x))):
        raise NumericalError("variable bound violated after solve")
    d = sx._reduced_costs(sx.c)
    movable = sx.lo < sx.hi
    bad = (movable & (sx.status == _AT_LOWER) & (d < -1e-6)) | \
          (movable & (sx.status == _AT_UPPER) & (d > 1e-6))
    if np.any(bad):
        raise NumericalError("reduced-cost certificate failed after solve")


def solve_lp(lp: LinearProgram, *, basis: Basis | None = None,
             max_iterations: int | None = None) -> Solution:
    """Solve ignoring integrality; returns a Solution with an exportable basis."""
    sx = _Simplex(lp, max_iterations=max_iterations)
    status = sx.run(warm=basis)
    if status is not Status.OPTIMAL:
        return Solution(status=status, x=np.zeros(0), objective=np.nan,
                        iterations=sx.iterations, basis=None)
    x = sx.full_solution()
    _certify(lp, sx, x)
    return Solution(status=Status.OPTIMAL, x=x, objective=float(lp.c @ x + lp.c0),
                    iterations=sx.iterations, basis=sx.export_basis())


_INT_TOL = 1e-7
_BB_GAP = 1e-6


def solve(lp: LinearProgram, *, basis: Basis | None = None,
          max_iterations: int | None = None) -> Solution:
    """Solve an LP or MILP to proven optimality.

    All-continuous problems go straight to the simplex.  Integer variables are
    resolved by branch and bound with best-bound node order and an absolute
    gap of 1e-6; node creation order is deterministic, so repeated runs give
    identical solutions.
    """
    if not lp.has_integers():
        return solve_lp(lp, basis=basis, max_iterations=max_iterations)

    root = solve_lp(lp, basis=basis, max_iterations=max_iterations)
    if root.status is not Status.OPTIMAL:
        return root
    int_idx = np.nonzero(lp.integer)[0]

    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    counter = 0
    heapq.heappush(heap, (root.objective, counter, lp.lo.copy(), lp.hi.copy()))
    incumbent: Solution | None = None
    total_iters = root.iterations

    while heap:
        bound, _, lo, hi = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent.objective - _BB_GAP:
            break  # best-bound order: no remaining node can improve
        node = solve_lp(lp.with_bounds(lo, hi), max_iterations=max_iterations)
        total_iters += node.iterations
        if node.status is not Status.OPTIMAL:
            continue
        if incumbent is not None and node.objective >= incumbent.objective - _BB_GAP:
            continue
        frac = np.abs(node.x[int_idx] - np.round(node.x[int_idx]))
        if np.all(frac <= _INT_TOL):
            incumbent = node
            continue
        j = int(int_idx[int(np.argmax(frac))])
        xj = node.x[j]
        down = (lo.copy(), hi.copy())
        down[1][j] = np.floor(xj)
        up = (lo.copy(), hi.copy())
        up[0][j] = np.ceil(xj)
        for nlo, nhi in (down, up):
            if np.all(nlo <= nhi):
                counter += 1
                heapq.heappush(heap, (node.objective, counter, nlo, nhi))

    if incumbent is None:
        return Solution(status=Status.INFEASIBLE, x=np.zeros(0), objective=np.nan,
                        iterations=total_iters, basis=None)
    x = incumbent.x.copy()
    x[int_idx] = np.round(x[int_idx])
    return Solution(status=Status.OPTIMAL, x=x,
                    objective=float(lp.c @ x + lp.c0),
                    iterations=total_iters, basis=incumbent.basis)


def warm_start(lp: LinearProgram, basis: Basis, *,
               max_iterations: int | None = None) -> Solution:
    """Solve starting from a previous basis; falls back to a cold solve (with a
    warning) when the basis is invalid or no longer primal feasible."""
    return solve(lp, basis=basis, max_iterations=max_iterations)
