"""Statistics over solution sets: correlation, distributions, dominance, burden shift.

Significance of Pearson coefficients uses the exact two-sided t-test via a
self-contained regularized incomplete beta function (modified Lentz continued
fraction, 1e-12 target accuracy), so the package needs no statistics
dependency and the values are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class AnalysisError(Exception):
    pass


# ---------------------------------------------------------------------------
# Regularized incomplete beta (for two-sided t-test p-values)
# ---------------------------------------------------------------------------

_BETA_EPS = 1e-14
_BETA_TINY = 1e-300
_BETA_MAXITER = 400


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz algorithm."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _BETA_EPS:
            return h
    raise AnalysisError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) to about 1e-12 absolute accuracy for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise AnalysisError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # The continued fraction converges fast only for x below the saddle.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, dof: int) -> float:
    """Two-sided p-value of a Student-t statistic."""
    if dof < 1:
        raise AnalysisError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    x = dof / (dof + t * t)
    return regularized_incomplete_beta(dof / 2.0, 0.5, x)


# ---------------------------------------------------------------------------
# Pearson correlation with significance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple[str, ...]
    r: np.ndarray
    p: np.ndarray
    n_samples: int
    dropped: tuple[str, ...] = ()   # constant variables excluded from the matrix


def pearson(data: np.ndarray, names) -> CorrelationMatrix:
    """Product-moment correlation with exact two-sided significance.

    ``data`` is (n_observations, n_variables).  Variables with zero variance
    cannot be correlated; they are dropped and reported in ``dropped``.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise AnalysisError("data must be 2-D (observations x variables)")
    n, k = data.shape
    names = tuple(names)
    if len(names) != k:
        raise AnalysisError("one name per column required")
    if n < 3:
        raise AnalysisError(f"need at least 3 observations, got {n}")

    spans = data.max(axis=0) - data.min(axis=0)
    keep = spans > 0.0
    dropped = tuple(nm for nm, ok in zip(names, keep) if not ok)
    kept_names = tuple(nm for nm, ok in zip(names, keep) if ok)
    sub = data[:, keep]
    m = sub.shape[1]

    centered = sub - sub.mean(axis=0)
    cov = centered.T @ centered
    d = np.diag(cov)
    # sqrt of the product (not product of sqrts): keeps r at exactly +-1 for
    # exactly collinear columns, since sqrt(c*c) == c in IEEE-754.
    with np.errstate(invalid="ignore", divide="ignore"):
        r = cov / np.sqrt(np.outer(d, d))
    np.clip(r, -1.0, 1.0, out=r)
    np.fill_diagonal(r, 1.0)
    r = (r + r.T) / 2.0  # enforce exact symmetry

    dof = n - 2
    p = np.zeros_like(r)
    for i in range(m):
        for j in range(i + 1, m):
            rij = r[i, j]
            if abs(rij) >= 1.0:
                pij = 0.0
            else:
                t = rij * math.sqrt(dof / (1.0 - rij * rij))
                pij = t_two_sided_p(t, dof)
            p[i, j] = p[j, i] = pij
    return CorrelationMatrix(names=kept_names, r=r, p=p, n_samples=n,
                             dropped=dropped)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistributionSummary:
    name: str
    bin_edges: np.ndarray          # len(frequencies) + 1
    frequencies: np.ndarray        # sums to 1
    modes: tuple                   # ((location, frequency), ...) by location


def _peak_prominences(freq: np.ndarray):
    """Strict local maxima (plateaus collapsed to their center) and their
    prominence: height above the higher of the two bases, each base being the
    lowest bin between the peak and the nearest strictly-higher bin (or the
    histogram edge).  Interior peaks match scipy.signal.peak_prominences."""
    nb = len(freq)
    peaks = []
    i = 0
    while i < nb:
        j = i
        while j + 1 < nb and freq[j + 1] == freq[i]:
            j += 1
        left_ok = i == 0 or freq[i - 1] < freq[i]
        right_ok = j == nb - 1 or freq[j + 1] < freq[i]
        if left_ok and right_ok and freq[i] > 0:
            peaks.append((i + j) // 2)
        i = j + 1
    out = []
    for pk in peaks:
        h = freq[pk]
        bases = []
        for step in (-1, 1):
            q = pk + step
            if not 0 <= q < nb:
                continue  # edge peak: only one side exists
            lowest = h
            while 0 <= q < nb and freq[q] <= h:
                lowest = min(lowest, freq[q])
                q += step
            bases.append(lowest)
        prom = h - max(bases) if bases else h
        out.append((pk, float(prom)))
    return out


def freedman_diaconis_bins(values: np.ndarray, min_bins: int = 10,
                           max_bins: int = 5000) -> np.ndarray:
    """Freedman-Diaconis bin edges with a floor of ``min_bins`` bins."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.array([lo - 0.5, hi + 0.5])
    q75, q25 = np.percentile(values, [75, 25])
    width = 2.0 * (q75 - q25) / len(values) ** (1.0 / 3.0)
    if width <= 0:
        nbins = min_bins
    else:
        nbins = int(np.clip(math.ceil((hi - lo) / width), min_bins, max_bins))
    return np.linspace(lo, hi, nbins + 1)


def distribution(values, name: str, *, bin_edges=None,
                 prominence: float = 0.02) -> DistributionSummary:
    """Normalized histogram plus modes above a prominence threshold."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise AnalysisError(f"{name}: no observations")
    edges = freedman_diaconis_bins(values) if bin_edges is None \
        else np.asarray(bin_edges, dtype=float)
    counts, edges = np.histogram(values, bins=edges)
    freq = counts / counts.sum()
    centers = (edges[:-1] + edges[1:]) / 2.0
    modes = tuple(
        (float(centers[i]), float(freq[i]))
        for i, prom in _peak_prominences(freq) if prom >= prominence)
    return DistributionSummary(name=name, bin_edges=edges, frequencies=freq,
                               modes=modes)


def distributions(data: np.ndarray, names, **kwargs) -> list[DistributionSummary]:
    data = np.asarray(data, dtype=float)
    return [distribution(data[:, j], nm, **kwargs) for j, nm in enumerate(names)]


# ---------------------------------------------------------------------------
# Dominance filtering
# ---------------------------------------------------------------------------

def non_dominated_mask(values: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated under minimization of every column.

    A row is dominated when another row is <= everywhere and < somewhere.
    Duplicate rows do not dominate each other.  Order-stable: the mask refers
    to the input ordering.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        leq = np.all(values <= values[i], axis=1)
        lt = np.any(values < values[i], axis=1)
        dominators = leq & lt
        dominators[i] = False
        if dominators.any():
            keep[i] = False
    return keep


# ---------------------------------------------------------------------------
# Burden shift
# ---------------------------------------------------------------------------

UNDEFINED = "undefined"


@dataclass(frozen=True)
class BurdenShiftTable:
    objectives: tuple[str, ...]
    reference_name: str
    rows: tuple                  # ((run name, (percent or None, ...)), ...)

    def as_records(self):
        recs = []
        for name, values in self.rows:
            rec = {"run": name}
            for obj, v in zip(self.objectives, values):
                rec[obj] = UNDEFINED if v is None else v
            recs.append(rec)
        return recs


def burden_shift(runs: dict, reference: dict, *, objectives=None,
                 reference_name: str = "reference") -> BurdenShiftTable:
    """Relative variation of each run against the reference, in percent.

    Zero reference values give an explicit undefined marker, never infinity.
    The reference itself appears as the first row and is identically zero.
    """
    if objectives is None:
        objectives = tuple(reference)
    objectives = tuple(objectives)
    for obj in objectives:
        if obj not in reference:
            raise AnalysisError(f"reference run lacks objective {obj}")
    rows = [(reference_name, tuple(0.0 for _ in objectives))]
    for name, values in runs.items():
        entries = []
        for obj in objectives:
            if obj not in values:
                raise AnalysisError(f"run {name} lacks objective {obj}")
            ref = reference[obj]
            if ref == 0.0:
                entries.append(None)
            else:
                entries.append((values[obj] - ref) / ref * 100.0)
        rows.append((name, tuple(entries)))
    return BurdenShiftTable(objectives=objectives, reference_name=reference_name,
                            rows=tuple(rows))
