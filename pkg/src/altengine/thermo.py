"""Classical thermomajorization primitives.

Probability vectors are 1-D numpy arrays indexed by energy level, lowest level
first (index 0 is the ground level). All order relations are taken relative to a
reference distribution ``g`` with strictly positive entries, usually a thermal
state produced by :func:`gibbs_state`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import PreconditionError

TOL_SUM = 1e-12
TOL_NEG = 1e-12
TOL_CURVE = 1e-10
TOL_DUP = 1e-10
TOL_SLOPE = 1e-9

# Factorial growth: extremal_achievable enumerates d! relabelings.
MAX_EXTREMAL_DIM = 8


def as_prob_vector(p, *, tol_sum: float = TOL_SUM, tol_neg: float = TOL_NEG) -> np.ndarray:
    """Validate ``p`` as a probability vector and return a cleaned copy.

    Entries in ``[-tol_neg, 0)`` are clamped to zero, anything more negative is
    an error, and the total must match 1 within ``tol_sum`` (the result is then
    renormalized exactly).
    """
    arr = np.asarray(p, dtype=float).copy()
    if arr.ndim != 1 or arr.size < 1:
        raise PreconditionError(f"expected a 1-D probability vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("probability vector has non-finite entries")
    if np.any(arr < -tol_neg):
        raise PreconditionError(f"negative entry {arr.min():.3e} below -{tol_neg:.1e}")
    arr[arr < 0.0] = 0.0
    total = arr.sum()
    if abs(total - 1.0) > tol_sum:
        raise PreconditionError(f"entries sum to {total!r}, not 1 within {tol_sum:.1e}")
    return arr / total


def as_reference(g) -> np.ndarray:
    """Validate a reference distribution: a probability vector with all entries
    strictly positive."""
    arr = as_prob_vector(g)
    if np.any(arr <= 0.0):
        raise PreconditionError("reference distribution must be strictly positive")
    return arr


def check_levels(levels) -> np.ndarray:
    """Validate an energy ladder: finite, non-decreasing, at least two levels."""
    e = np.asarray(levels, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise PreconditionError(f"expected at least two energy levels, got shape {e.shape}")
    if not np.all(np.isfinite(e)):
        raise PreconditionError("energy levels must be finite")
    if np.any(np.diff(e) < 0):
        raise PreconditionError("energy levels must be non-decreasing")
    return e


def gibbs_state(levels, beta: float) -> np.ndarray:
    """Thermal distribution exp(-beta*E_k)/Z over the given energy ladder.

    ``beta`` is a non-negative inverse temperature; ``beta = 0`` gives the
    uniform distribution. Weights are computed relative to the lowest level so
    large ladders do not underflow.
    """
    e = check_levels(levels)
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"inverse temperature must be finite and >= 0, got {beta!r}")
    w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


def beta_order(p, g) -> np.ndarray:
    """Permutation of level indices sorting the ratios p_k/g_k non-increasingly.

    Ties keep ascending level index (stable sort), so the result is a
    deterministic function of the inputs.
    """
    pv = as_prob_vector(p)
    gv = as_reference(g)
    if pv.shape != gv.shape:
        raise ValueError("p and g must have the same length")
    return np.argsort(-pv / gv, kind="stable")


@dataclass(frozen=True)
class ThermoCurve:
    """Piecewise-linear concave curve of cumulative probability against
    cumulative reference weight, in the order produced by :func:`beta_order`.

    ``xs`` and ``ys`` hold the d+1 elbow coordinates from (0, 0) to (1, 1);
    ``order`` is the level permutation that generated them.
    """

    xs: np.ndarray
    ys: np.ndarray
    order: np.ndarray

    def value(self, x):
        """Curve height at abscissa ``x`` (scalar or array), exact at elbows."""
        xq = np.asarray(x, dtype=float)
        if np.any(xq < -1e-12) or np.any(xq > 1.0 + 1e-12):
            raise PreconditionError(f"curve queried outside [0, 1]: {x!r}")
        out = np.interp(np.clip(xq, 0.0, 1.0), self.xs, self.ys)
        return float(out) if np.isscalar(x) else out


def thermo_curve(p, g) -> ThermoCurve:
    """Build the cumulative curve of ``p`` relative to ``g``."""
    pv = as_prob_vector(p)
    gv = as_reference(g)
    if pv.shape != gv.shape:
        raise ValueError("p and g must have the same length")
    order = np.argsort(-pv / gv, kind="stable")
    xs = np.concatenate(([0.0], np.cumsum(gv[order])))
    ys = np.concatenate(([0.0], np.cumsum(pv[order])))
    xs[-1] = 1.0
    ys[-1] = 1.0
    return ThermoCurve(xs=xs, ys=ys, order=order)


def curve_value(curve: ThermoCurve, x):
    """Height of ``curve`` at ``x``; see :meth:`ThermoCurve.value`."""
    return curve.value(x)


def thermomajorizes(p, q, g, *, tol: float = TOL_CURVE) -> bool:
    """True when the curve of ``p`` lies on or above the curve of ``q`` at every
    elbow abscissa of ``q`` (which suffices for domination everywhere, both
    curves being concave and piecewise linear)."""
    cp = thermo_curve(p, g)
    cq = thermo_curve(q, g)
    return bool(np.all(cp.value(cq.xs) >= cq.ys - tol))


def extremal_achievable(p, g, *, dedup_tol: float = TOL_DUP) -> np.ndarray:
    """Vertices of the set of states reachable from ``p`` by stochastic maps
    preserving ``g``.

    One candidate is built per level relabeling: the curve of ``p`` is sampled
    at that relabeling's cumulative reference weights and the increments become
    the candidate's entries. Duplicates within ``dedup_tol`` (max-norm) are
    merged and rows are returned in lexicographic order. The input ``p`` itself
    is always among the results.
    """
    pv = as_prob_vector(p)
    gv = as_reference(g)
    if pv.shape != gv.shape:
        raise ValueError("p and g must have the same length")
    d = pv.size
    if d > MAX_EXTREMAL_DIM:
        raise PreconditionError(
            f"extremal_achievable enumerates d! relabelings; d={d} exceeds {MAX_EXTREMAL_DIM}"
        )
    curve = thermo_curve(pv, gv)
    rows = []
    for sigma in permutations(range(d)):
        idx = np.asarray(sigma)
        xs = np.minimum(np.cumsum(gv[idx]), 1.0)
        vals = curve.value(xs)
        q = np.empty(d)
        q[idx] = np.diff(np.concatenate(([0.0], vals)))
        q[q < 0.0] = 0.0
        rows.append(q / q.sum())
    return dedup_rows(np.asarray(rows), dedup_tol)


def dedup_rows(rows: np.ndarray, tol: float = TOL_DUP) -> np.ndarray:
    """Merge rows equal within ``tol`` in max-norm; result is lexicographically
    sorted. Rows are scanned in lexicographic order so a cluster of near-equal
    rows keeps its first representative."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D row array, got shape {arr.shape}")
    if arr.shape[0] <= 1:
        return arr.copy()
    order = np.lexsort(arr.T[::-1])
    pts = arr[order]
    kept: list[np.ndarray] = []
    for row in pts:
        dup = False
        for prev in reversed(kept):
            if row[0] - prev[0] > tol:
                break
            if np.max(np.abs(row - prev)) <= tol:
                dup = True
                break
        if not dup:
            kept.append(row)
    return np.asarray(kept)


def thermalize_subset(p, g, subset) -> np.ndarray:
    """Redistribute the probability held by ``subset`` proportionally to ``g``
    inside that subset, leaving all other levels untouched."""
    pv = as_prob_vector(p)
    gv = as_reference(g)
    if pv.shape != gv.shape:
        raise ValueError("p and g must have the same length")
    items = [int(i) for i in subset]
    if not items:
        raise PreconditionError("subset must be non-empty")
    idx = np.asarray(sorted(set(items)), dtype=int)
    if idx.size != len(items):
        raise PreconditionError("subset indices must be distinct")
    if idx.min() < 0 or idx.max() >= pv.size:
        raise PreconditionError(f"subset indices out of range for d={pv.size}")
    out = pv.copy()
    out[idx] = pv[idx].sum() * gv[idx] / gv[idx].sum()
    return out


def two_level_transfer(p, g, i: int, j: int, a: float) -> np.ndarray:
    """Move probability ``a`` from occupied level ``j`` onto empty level ``i``.

    Preconditions: ``p_i = 0``, ``p_j > 0``, ``g_i >= g_j`` (the receiving level
    is not above the donor on the ladder) and ``0 <= a <= p_j``. The move is
    realized by a stochastic map that fixes ``g`` and acts only on the (i, j)
    block, so the output is reachable from ``p``.
    """
    pv = as_prob_vector(p)
    gv = as_reference(g)
    if pv.shape != gv.shape:
        raise ValueError("p and g must have the same length")
    d = pv.size
    if not (0 <= i < d and 0 <= j < d) or i == j:
        raise PreconditionError(f"need two distinct valid level indices, got {(i, j)}")
    if pv[i] > TOL_NEG:
        raise PreconditionError(f"receiving level {i} must be empty, has {pv[i]:.3e}")
    if pv[j] <= 0.0:
        raise PreconditionError(f"donor level {j} must be occupied")
    if gv[i] < gv[j] - 1e-15:
        raise PreconditionError("receiving level must sit at or below the donor level")
    if a < -TOL_NEG or a > pv[j] + TOL_NEG:
        raise PreconditionError(f"transfer amount {a!r} outside [0, p_j={pv[j]!r}]")
    amount = float(np.clip(a, 0.0, pv[j]))
    out = pv.copy()
    out[i] = amount
    out[j] = pv[j] - amount
    return out


def bar_state(p) -> np.ndarray:
    """Concentrate everything except the top level's weight onto the
    next-to-top level: (0, ..., 0, 1 - p_top, p_top)."""
    pv = as_prob_vector(p)
    if pv.size < 2:
        raise ValueError("need at least two levels")
    out = np.zeros_like(pv)
    out[-1] = pv[-1]
    out[-2] = 1.0 - pv[-1]
    return out


def total_variation(p, q) -> float:
    """Total variation distance, half the L1 distance."""
    pv = np.asarray(p, dtype=float)
    qv = np.asarray(q, dtype=float)
    return 0.5 * float(np.abs(pv - qv).sum())
