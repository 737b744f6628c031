"""Vertex-list convex hull bookkeeping.

Reachable sets are stored as arrays of vertices, one state per row. Pruning and
membership queries go through small linear programs instead of facet
enumeration, which stays robust for the low dimensions used here.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import cdist

from .thermo import dedup_rows, TOL_DUP

LP_TOL = 1e-9

_FAST_ACCEPT_GAP = 1e-12
_SUPPORT_SEED = 1905


def hull_distance(x, vertices) -> float:
    """Max-norm distance from point ``x`` to the convex hull of ``vertices``.

    Solves min t subject to |V^T lam - x|_inf <= t, lam >= 0, sum lam = 1.
    Returns 0 (up to solver tolerance) when ``x`` lies inside the hull.
    """
    xv = np.asarray(x, dtype=float)
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.shape[0] == 0:
        raise ValueError("hull needs at least one vertex")
    if V.shape[1] != xv.size:
        raise ValueError("point and vertices have mismatched dimension")
    n, d = V.shape
    if n == 1:
        return float(np.max(np.abs(V[0] - xv)))
    c = np.zeros(n + 1)
    c[-1] = 1.0
    ones_col = np.ones((d, 1))
    A_ub = np.vstack([
        np.hstack([V.T, -ones_col]),
        np.hstack([-V.T, -ones_col]),
    ])
    b_ub = np.concatenate([xv, -xv])
    A_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0.0, None)] * (n + 1), method="highs")
    if not res.success:
        raise RuntimeError(f"hull membership LP failed: {res.message}")
    return float(res.fun)


def in_hull(x, vertices, tol: float = LP_TOL) -> bool:
    """True when ``x`` lies in the convex hull of ``vertices`` within ``tol``."""
    return hull_distance(x, vertices) <= tol


def _certify_extreme(pts: np.ndarray) -> np.ndarray:
    """Boolean mask of points that are provably extreme: unique maximizers of
    some probe direction (coordinate axes plus a fixed batch of seeded random
    directions). Never certifies an interior point; may miss extreme ones."""
    n, d = pts.shape
    rng = np.random.default_rng(_SUPPORT_SEED)
    dirs = np.vstack([np.eye(d), -np.eye(d),
                      rng.standard_normal((max(32, 4 * d), d))])
    certified = np.zeros(n, dtype=bool)
    dots = pts @ dirs.T
    for col in dots.T:
        best = np.argmax(col)
        runner_up = np.partition(col, -2)[-2] if n > 1 else -np.inf
        if col[best] > runner_up + _FAST_ACCEPT_GAP:
            certified[best] = True
    return certified


def _extreme_candidates(pts: np.ndarray) -> np.ndarray:
    """Indices of points that can possibly be extreme, via an exact convex
    hull taken in the point set's own affine span (the sets handled here are
    flat, e.g. probability vectors). Falls back to keeping everything when the
    span is trivial or the hull computation balks."""
    n = pts.shape[0]
    centre = pts.mean(axis=0)
    X = pts - centre
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    scale = float(s[0]) if s.size else 0.0
    if scale <= 0.0:
        return np.arange(n)
    rank = int(np.sum(s > 1e-12 * scale))
    Y = X @ Vt[:rank].T
    if rank < 2:
        return np.unique([int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))])
    try:
        hull = ConvexHull(Y)
    except QhullError:
        return np.arange(n)
    return np.sort(hull.vertices)


def prune_hull(points, tol: float = LP_TOL) -> np.ndarray:
    """Drop every point lying in the convex hull of the others.

    Near-duplicates (within max-norm ``TOL_DUP``) are merged first. Points are
    scanned in lexicographic order; each non-certified point is removed when its
    hull distance to the remaining points is at most ``tol``. The operation is
    idempotent: a second pass leaves the output unchanged.
    """
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, arr.shape[1] if arr.ndim == 2 else 0)
    pts = dedup_rows(np.atleast_2d(arr), TOL_DUP)
    n = pts.shape[0]
    if n <= 1:
        return pts
    if n > 8:
        pts = pts[_extreme_candidates(pts)]
        n = pts.shape[0]
        if n <= 1:
            return pts
    certified = _certify_extreme(pts)
    alive = np.ones(n, dtype=bool)
    for idx in range(n):
        if certified[idx]:
            continue
        mask = alive.copy()
        mask[idx] = False
        if not mask.any():
            continue
        if hull_distance(pts[idx], pts[mask]) <= tol:
            alive[idx] = False
    return pts[alive]


def hausdorff_tv(a, b) -> float:
    """Hausdorff distance between two vertex sets in total variation (half L1)."""
    A = np.atleast_2d(np.asarray(a, dtype=float))
    B = np.atleast_2d(np.asarray(b, dtype=float))
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("vertex sets must be non-empty")
    D = 0.5 * cdist(A, B, metric="cityblock")
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
