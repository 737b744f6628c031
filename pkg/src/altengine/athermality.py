"""Reachable-state engine for a d-level system alternately coupled to two baths.

The machine alternates full thermalization strokes against a cold bath (inverse
temperature ``cold_beta``) and a hot bath (``hot_beta``, with ``hot_beta <=
cold_beta``). Each stroke maps the current reachable set to the union of
everything reachable under stochastic maps preserving that stroke's thermal
state; convexity makes the vertex list a complete description.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import thermo
from .errors import DegenerateEngineError, PreconditionError
from .hull import hausdorff_tv, prune_hull

CONV_TOL = 1e-8

_DENOM_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class EngineParams:
    """Energy ladder plus the two bath inverse temperatures.

    ``cold_beta`` is the working (colder) bath, ``hot_beta`` the hotter one;
    ``hot_beta <= cold_beta`` is required. Equal temperatures are accepted here
    (single-bath degenerate machine) but rejected by the fixed-point
    constructions, which need a genuine temperature difference.
    """

    levels: np.ndarray
    cold_beta: float
    hot_beta: float
    cold_gibbs: np.ndarray = field(init=False, repr=False)
    hot_gibbs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        e = thermo.check_levels(self.levels)
        cold = float(self.cold_beta)
        hot = float(self.hot_beta)
        for name, b in (("cold_beta", cold), ("hot_beta", hot)):
            if not np.isfinite(b) or b < 0:
                raise PreconditionError(f"{name} must be finite and >= 0, got {b!r}")
        if hot > cold:
            raise PreconditionError(
                f"hot bath must not be colder than the cold bath: hot_beta={hot!r} > cold_beta={cold!r}"
            )
        object.__setattr__(self, "levels", e)
        object.__setattr__(self, "cold_beta", cold)
        object.__setattr__(self, "hot_beta", hot)
        object.__setattr__(self, "cold_gibbs", thermo.gibbs_state(e, cold))
        object.__setattr__(self, "hot_gibbs", thermo.gibbs_state(e, hot))

    @property
    def dim(self) -> int:
        return self.levels.size

    @property
    def is_degenerate(self) -> bool:
        """True when the fixed-point formulas break down: equal bath
        temperatures, or a ladder so degenerate both thermal states coincide at
        the extreme levels."""
        if self.cold_beta == self.hot_beta:
            return True
        g, G = self.cold_gibbs, self.hot_gibbs
        den = G[0] * (1.0 - g[-1]) - G[-1] * (1.0 - g[0])
        return abs(den) < _DENOM_TOL

    def bath_state(self, bath: str) -> np.ndarray:
        if bath == "cold":
            return self.cold_gibbs
        if bath == "hot":
            return self.hot_gibbs
        raise ValueError(f"bath must be 'cold' or 'hot', got {bath!r}")


@dataclass(frozen=True)
class ReachableSet:
    """Snapshot of the reachable set after a given stroke.

    ``stroke`` counts from 1, with stroke 1 preparing the start state; ``bath``
    names the thermalization applied to produce this snapshot (None for the
    preparation stroke). ``hausdorff_delta`` is the total-variation Hausdorff
    distance between this vertex set and the previous one.
    """

    stroke: int
    bath: str | None
    vertices: np.ndarray
    hausdorff_delta: float
    converged: bool


def _sort_rows(arr: np.ndarray) -> np.ndarray:
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def simulate(params: EngineParams, start="cold", max_strokes: int = 20,
             conv_tol: float = CONV_TOL, first_bath: str | None = None,
             prune_tol: float = 1e-9) -> list[ReachableSet]:
    """Evolve the reachable set stroke by stroke and return its history.

    ``start`` is ``"cold"`` (the cold thermal state), ``"hot"``, or an explicit
    probability vector. Stroke 1 prepares the start state; stroke 2 applies the
    first bath, which defaults to the opposite bath for thermal starts (hot
    after a cold start, cold after a hot start) and to the hot bath for custom
    starts. ``max_strokes`` counts all strokes including the preparation one.

    The run stops early once the Hausdorff delta between successive vertex sets
    stays below ``conv_tol`` for two consecutive strokes; the last snapshot is
    then flagged ``converged``.
    """
    if isinstance(start, str):
        if start not in ("cold", "hot"):
            raise ValueError(f"start must be 'cold', 'hot', or a probability vector, got {start!r}")
        p0 = params.bath_state(start)
        default_first = "hot" if start == "cold" else "cold"
    else:
        p0 = thermo.as_prob_vector(start)
        if p0.size != params.dim:
            raise ValueError(f"start state has {p0.size} entries, engine has {params.dim} levels")
        default_first = "hot"
    bath = first_bath if first_bath is not None else default_first
    if bath not in ("cold", "hot"):
        raise ValueError(f"first_bath must be 'cold' or 'hot', got {bath!r}")
    if int(max_strokes) != max_strokes or max_strokes < 1:
        raise ValueError(f"max_strokes must be a positive integer, got {max_strokes!r}")

    history = [ReachableSet(stroke=1, bath=None, vertices=p0[None, :].copy(),
                            hausdorff_delta=float("inf"), converged=False)]
    prev_delta = float("inf")
    for stroke in range(2, int(max_strokes) + 1):
        g = params.bath_state(bath)
        prev = history[-1].vertices
        candidates = np.vstack([thermo.extremal_achievable(v, g) for v in prev])
        verts = _sort_rows(prune_hull(candidates, tol=prune_tol))
        delta = hausdorff_tv(verts, prev)
        converged = bool(delta < conv_tol and prev_delta < conv_tol)
        history.append(ReachableSet(stroke=stroke, bath=bath, vertices=verts,
                                    hausdorff_delta=delta, converged=converged))
        if converged:
            break
        prev_delta = delta
        bath = "cold" if bath == "hot" else "hot"
    return history


def top_bound_threshold(params: EngineParams) -> float:
    """Ceiling on the top-level weight of anything the machine can ever reach
    from a thermal start: the hot-bath weight ratio of the two highest levels."""
    G = params.hot_gibbs
    return float(G[-1] / G[-2])


def top_occupation_ceiling(p, params: EngineParams) -> float:
    """Largest top-level weight reachable from ``p`` in any number of strokes:
    the current weight or the engine threshold, whichever is bigger."""
    pv = thermo.as_prob_vector(p)
    if pv.size != params.dim:
        raise ValueError("state dimension does not match the engine")
    return max(float(pv[-1]), top_bound_threshold(params))


def respects_top_bound(vertices, params: EngineParams, tol: float = thermo.TOL_CURVE) -> bool:
    """Check every vertex against the top-level ceiling (with additive ``tol``)."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    return bool(np.all(V[:, -1] <= top_bound_threshold(params) + tol))


@dataclass(frozen=True)
class AttractorStates:
    """The two asymptotic extreme states of the alternating machine.

    ``ground`` maximizes the ground-level weight (reached by ending on a cold
    stroke), ``excited`` maximizes the top-level weight (ending on a hot
    stroke); the pair is a 2-cycle of the extremal single-stroke maps.
    """

    ground: np.ndarray
    excited: np.ndarray


def attractor_states(params: EngineParams) -> AttractorStates:
    """Fixed points of the double-stroke extremal dynamics."""
    if params.is_degenerate:
        raise DegenerateEngineError("attractor states need two distinct bath temperatures")
    g, G = params.cold_gibbs, params.hot_gibbs
    den = G[0] * (1.0 - g[-1]) - G[-1] * (1.0 - g[0])
    ground = g * (1.0 - G[0] * (g[0] - g[-1]) / den) / (1.0 - g[0])
    ground[0] = G[0] * (g[0] - g[-1]) / den
    excited = G * (1.0 - G[-1] * (g[0] - g[-1]) / den) / (1.0 - G[-1])
    excited[-1] = G[-1] * (g[0] - g[-1]) / den
    return AttractorStates(ground=thermo.as_prob_vector(ground),
                           excited=thermo.as_prob_vector(excited))


def inner_polytope(params: EngineParams) -> np.ndarray:
    """Vertices of a polytope guaranteed to lie inside the asymptotic reachable
    set, one vertex per binary choice string over levels 1..d-1.

    For each level above the ground one there are two extreme weights (a
    cold-flavored and a hot-flavored one); a vertex fixes one choice per level,
    assigns the top level its chosen weight, then walks down assigning each
    level its chosen fraction of the weight still unassigned, leaving the rest
    to the ground level. Rows are ordered by the choice string read as a binary
    number (top level = least significant bit).
    """
    if params.is_degenerate:
        raise DegenerateEngineError("inner polytope needs two distinct bath temperatures")
    g, G = params.cold_gibbs, params.hot_gibbs
    d = params.dim
    w = np.zeros((d, 2))
    for k in range(1, d):
        den = G[0] * (1.0 - g[k]) - G[k] * (1.0 - g[0])
        if abs(den) < _DENOM_TOL:
            raise DegenerateEngineError(
                f"level {k} is thermally indistinguishable from the ground level"
            )
        w[k, 0] = g[k] * (G[0] - G[k]) / den
        w[k, 1] = G[k] * (g[0] - g[k]) / den
    rows = []
    for bits in product((0, 1), repeat=d - 1):
        f = np.zeros(d)
        remaining = 1.0
        for k in range(d - 1, 0, -1):
            f[k] = remaining * w[k, bits[k - 1]]
            remaining -= f[k]
        f[0] = remaining
        rows.append(thermo.as_prob_vector(f))
    return np.asarray(rows)


def ground_state_criterion(params: EngineParams) -> bool:
    """Sufficient condition for the machine to asymptotically concentrate all
    weight on the ground level: the cold thermal state already favors the
    ground level by majority, and the hot bath keeps the ground weight below
    the combined weight of the two highest levels. ``False`` is inconclusive.
    """
    g, G = params.cold_gibbs, params.hot_gibbs
    return bool(g[0] > 0.5 and G[0] < G[-1] + G[-2])


def extreme_occupation_step(x, params: EngineParams, side: str) -> np.ndarray:
    """One double stroke of the extremal dynamics, in closed form.

    ``side="top"`` follows the branch maximizing the top-level weight (cold
    stroke then hot stroke) for states whose top weight lies between the hot
    thermal weight and the excited attractor's; ``side="ground"`` is the mirror
    branch maximizing the ground-level weight (hot then cold). Both branches
    are affine in the tracked weight and contract toward the attractors.
    """
    if params.is_degenerate:
        raise DegenerateEngineError("extremal double strokes need two distinct bath temperatures")
    xv = thermo.as_prob_vector(x)
    if xv.size != params.dim:
        raise ValueError("state dimension does not match the engine")
    g, G = params.cold_gibbs, params.hot_gibbs
    att = attractor_states(params)
    slope = ((1.0 - g[0]) * G[-1]) / ((1.0 - g[-1]) * G[0])
    eps = 1e-12
    out = np.empty_like(xv)
    if side == "top":
        lo, hi = G[-1], att.excited[-1]
        if not (lo - eps <= xv[-1] <= hi + eps):
            raise PreconditionError(
                f"top weight {xv[-1]!r} outside [{lo!r}, {hi!r}] for the top branch"
            )
        out[-1] = slope * xv[-1] + (g[0] - g[-1]) * G[-1] / ((1.0 - g[-1]) * G[0])
        out[:-1] = G[:-1] * (1.0 - out[-1]) / (1.0 - G[-1])
    elif side == "ground":
        lo, hi = g[0], att.ground[0]
        if not (lo - eps <= xv[0] <= hi + eps):
            raise PreconditionError(
                f"ground weight {xv[0]!r} outside [{lo!r}, {hi!r}] for the ground branch"
            )
        out[0] = slope * xv[0] + (g[0] - g[-1]) / (1.0 - g[-1])
        out[1:] = g[1:] * (1.0 - out[0]) / (1.0 - g[0])
    else:
        raise ValueError(f"side must be 'top' or 'ground', got {side!r}")
    return thermo.as_prob_vector(out)


def ground_state_round(p, params: EngineParams) -> np.ndarray:
    """One hot-cold round of the ground-pumping schedule.

    Requires the sufficient criterion of :func:`ground_state_criterion` and an
    input whose weight-to-cold-weight ratios are non-increasing in the level
    index. The hot stroke lifts the two highest weights into the ground level,
    the cold stroke then redistributes; iterating drives the state to the
    ground corner geometrically.
    """
    if not ground_state_criterion(params):
        raise PreconditionError("ground pumping requires the sufficient reachability criterion")
    pv = thermo.as_prob_vector(p)
    if pv.size != params.dim:
        raise ValueError("state dimension does not match the engine")
    g, G = params.cold_gibbs, params.hot_gibbs
    ratios = pv / g
    if np.any(np.diff(ratios) > 1e-12):
        raise PreconditionError("input weights must already be ordered against the cold state")
    q1 = pv[-1] + (G[0] - G[-1]) / G[-2] * pv[-2]
    r = np.empty_like(pv)
    r[0] = 1.0 - (1.0 - g[0]) / g[0] * q1
    r[1:] = g[1:] * q1 / g[0]
    return thermo.as_prob_vector(r)


def qubit_extremal_matrix(gibbs_vec) -> np.ndarray:
    """Stochastic matrix of the extremal two-level stroke against a bath with
    thermal state ``gibbs_vec``: it fixes the thermal state and maximally
    inverts everything sharper than it."""
    gv = thermo.as_reference(gibbs_vec)
    if gv.size != 2:
        raise PreconditionError("extremal stroke matrix is specific to two levels")
    k = (1.0 - gv[0]) / gv[0]
    return np.array([[1.0 - k, 1.0], [k, 0.0]])


@dataclass(frozen=True)
class QubitInterval:
    """Reachable interval for a two-level machine, as states ordered by ground
    weight (``lo`` has the smaller ground weight). ``kind`` is ``"finite"`` for
    stroke-limited sets, ``"full_segment"`` when the asymptotic set is the
    attractor segment, ``"one_sided"`` when the start is sharper than both
    attractors and contributes its own endpoint."""

    lo: np.ndarray
    hi: np.ndarray
    kind: str

    @property
    def bounds(self) -> tuple[float, float]:
        """Ground-weight interval endpoints (min, max)."""
        return float(self.lo[0]), float(self.hi[0])


def qubit_reachable_interval(p, params: EngineParams,
                             n_strokes: int | None = None) -> QubitInterval:
    """Exact reachable set of a two-level machine started from ``p``.

    With ``n_strokes = N`` (transformation strokes applied after preparing
    ``p``), the set is an interval whose endpoints come from running the two
    alternating stroke orders; both parities are taken so the result does not
    depend on which bath acts first. With ``n_strokes = None`` the asymptotic
    set is returned: the attractor segment when ``p`` lies inside it, else the
    interval between ``p`` and its image under the single stroke pulling away
    from the nearer attractor.
    """
    if params.dim != 2:
        raise PreconditionError("qubit reachable sets are specific to two levels")
    pv = thermo.as_prob_vector(p)
    if pv.size != 2:
        raise ValueError("state must have two entries")
    k_cold = (1.0 - params.cold_gibbs[0]) / params.cold_gibbs[0]
    k_hot = (1.0 - params.hot_gibbs[0]) / params.hot_gibbs[0]

    def cold(x: float) -> float:
        return 1.0 - k_cold * x

    def hot(x: float) -> float:
        return 1.0 - k_hot * x

    def state(x: float) -> np.ndarray:
        return np.array([x, 1.0 - x])

    if n_strokes is not None:
        if int(n_strokes) != n_strokes or n_strokes < 0:
            raise ValueError(f"n_strokes must be a non-negative integer, got {n_strokes!r}")
        seen = [pv[0]]
        for first in (hot, cold):
            second = cold if first is hot else hot
            x = pv[0]
            for m in range(int(n_strokes)):
                x = first(x) if m % 2 == 0 else second(x)
                seen.append(x)
        return QubitInterval(lo=state(min(seen)), hi=state(max(seen)), kind="finite")

    att = attractor_states(params)
    lo_x, hi_x = att.excited[0], att.ground[0]
    if lo_x - 1e-12 <= pv[0] <= hi_x + 1e-12:
        return QubitInterval(lo=att.excited, hi=att.ground, kind="full_segment")
    if abs(pv[0] - hi_x) < abs(pv[0] - lo_x):
        other = hot(pv[0])
    else:
        other = cold(pv[0])
    xs = sorted([pv[0], other])
    return QubitInterval(lo=state(xs[0]), hi=state(xs[1]), kind="one_sided")
