"""Weighted decision stumps: the weak learner and the unit of feature selection.

A stump is (feature, threshold, polarity) predicting `polarity` when
x[feature] > threshold, strictly, else -polarity. Candidate thresholds per
feature are the midpoints of consecutive distinct sorted values plus one
sentinel strictly below the column minimum (a constant predictor).

Tie rule, shared by the fast fitter and the enumeration oracle: among
candidates whose weighted error is within TIE_TOL of the minimum, take the
lowest feature index, then the smallest threshold, then polarity +1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import LabeledFeatureSet

TIE_TOL = 1e-12


class StumpError(ValueError):
    pass


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    polarity: int

    def __post_init__(self):
        if self.polarity not in (+1, -1):
            raise StumpError(f"polarity must be +-1, got {self.polarity}")


@dataclass(frozen=True)
class SortedColumns:
    order: np.ndarray  # (n, d) int; column j sorts feature j ascending, stable


def presort(fset: LabeledFeatureSet) -> SortedColumns:
    return SortedColumns(np.argsort(fset.values, axis=0, kind="stable"))


def stump_predict(stump: Stump, x) -> int:
    x = np.asarray(x)
    if stump.feature >= x.shape[-1]:
        raise StumpError(f"feature {stump.feature} out of range for d={x.shape[-1]}")
    return stump.polarity if float(x[stump.feature]) > stump.threshold else -stump.polarity


def stump_predict_matrix(stump: Stump, values: np.ndarray) -> np.ndarray:
    """Vectorized +-1 predictions for an (n, d) matrix."""
    if stump.feature >= values.shape[1]:
        raise StumpError(f"feature {stump.feature} out of range for d={values.shape[1]}")
    above = values[:, stump.feature].astype(np.float64) > stump.threshold
    return np.where(above, stump.polarity, -stump.polarity).astype(np.int64)


def _check_inputs(fset, targets, weights):
    targets = np.asarray(targets, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    n = fset.n
    if targets.shape != (n,):
        raise StumpError(f"targets length {targets.shape} != n={n}")
    if weights.shape != (n,):
        raise StumpError(f"weights length {weights.shape} != n={n}")
    if not np.isin(targets, (-1, 1)).all():
        raise StumpError("targets must be +-1")
    if (weights < 0).any():
        raise StumpError("weights must be non-negative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise StumpError(f"weights sum to {weights.sum()!r}, expected 1")
    return targets, weights


def fit_stump(fset: LabeledFeatureSet, targets, weights,
              sorted_cols: SortedColumns,
              stats: dict | None = None) -> tuple[Stump, float]:
    """Best stump under sample weights via one presorted scan per feature.

    Work is O(n) per feature given the presort; `stats`, when passed, records
    the candidate/scan counts so tests can assert that.
    """
    targets, weights = _check_inputs(fset, targets, weights)
    n, d = fset.n, fset.d
    order = sorted_cols.order
    if order.shape != (n, d):
        raise StumpError("sorted columns shape mismatch")

    sv = np.take_along_axis(fset.values, order, axis=0).astype(np.float64)  # (n, d)
    wpos = weights * (targets > 0)
    wneg = weights * (targets < 0)
    cum_p = np.zeros((n + 1, d))
    cum_n = np.zeros((n + 1, d))
    np.cumsum(wpos[order], axis=0, out=cum_p[1:])
    np.cumsum(wneg[order], axis=0, out=cum_n[1:])
    p_tot, n_tot = cum_p[-1], cum_n[-1]

    # err_plus[k, j]: split after the k smallest values of feature j,
    # predicting +1 above; k=0 is the sentinel constant +1 predictor.
    err_plus = cum_p + (n_tot - cum_n)
    err_minus = cum_n + (p_tot - cum_p)

    valid = np.zeros((n + 1, d), dtype=bool)
    valid[0] = True
    valid[1:n] = sv[1:] > sv[:-1]
    inf = np.inf
    ep = np.where(valid, err_plus, inf)
    em = np.where(valid, err_minus, inf)

    col_min = np.minimum(ep.min(axis=0), em.min(axis=0))
    lim = col_min + TIE_TOL
    elig_p = ep <= lim
    elig_m = em <= lim
    kp = np.where(elig_p.any(axis=0), elig_p.argmax(axis=0), n + 1)
    km = np.where(elig_m.any(axis=0), elig_m.argmax(axis=0), n + 1)
    use_plus = kp <= km  # equal split point: polarity +1 wins
    kbest = np.where(use_plus, kp, km)
    cols = np.arange(d)
    col_err = np.where(use_plus, err_plus[kbest, cols], err_minus[kbest, cols])

    best = col_err.min()
    j = int(np.argmax(col_err <= best + TIE_TOL))  # lowest eligible feature
    k = int(kbest[j])
    threshold = sv[0, j] - 1.0 if k == 0 else (sv[k - 1, j] + sv[k, j]) / 2.0
    polarity = +1 if use_plus[j] else -1
    if stats is not None:
        stats["features"] = d
        stats["candidates"] = int(valid.sum())
        stats["scan_cells"] = (n + 1) * d
    return Stump(j, float(threshold), polarity), float(col_err[j])


def fit_stump_oracle(fset: LabeledFeatureSet, targets, weights) -> tuple[Stump, float]:
    """Direct enumeration of every (feature, threshold, polarity) candidate.

    Independent of the incremental scan; intended for small instances.
    """
    targets, weights = _check_inputs(fset, targets, weights)
    values = fset.values.astype(np.float64)
    candidates: list[tuple[float, int, float, int]] = []
    for j in range(fset.d):
        col = values[:, j]
        distinct = np.unique(col)
        thresholds = [distinct[0] - 1.0]
        thresholds += [(a + b) / 2.0 for a, b in zip(distinct[:-1], distinct[1:])]
        for th in thresholds:
            for pol in (+1, -1):
                pred = np.where(col > th, pol, -pol)
                err = float(weights[pred != targets].sum())
                candidates.append((err, j, th, pol))
    emin = min(c[0] for c in candidates)
    eligible = [c for c in candidates if c[0] <= emin + TIE_TOL]
    err, j, th, pol = min(eligible, key=lambda c: (c[1], c[2], 0 if c[3] == 1 else 1))
    return Stump(j, float(th), pol), err
