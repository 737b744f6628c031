"""States with flat weight profiles in two bases linked by a fixed unitary.

A state is maximally mutually coherent for ``U`` when every computational
amplitude and every amplitude of ``U @ psi`` has modulus 1/sqrt(d). Such states
always exist; what is hard is reaching one with few strokes. The short-stroke
route needs some column of U†DU (or UDU†) to become flat for a diagonal D; this
module provides the necessary conditions, the cheap blockers, the numerical
phase search, and the final phase-fitting step that turns a flat column into an
actual mutually coherent state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .coherence import check_unitary

TOL_FLAT = 1e-8

_CONVENTIONS = ("u_dag_d_u", "u_d_u_dag")


@dataclass(frozen=True)
class FlatNecessity:
    """Outcome of the flat-column necessary condition.

    ``column_margins[l]`` is the column's worst-case slack against the
    -1/(2*sqrt(d)) threshold; the condition holds when the best column has
    non-negative margin. A negative margin for a column rules that column out
    exactly, not merely heuristically.
    """

    holds: bool
    best_column: int
    margin: float
    column_margins: np.ndarray


def flat_column_necessary(U) -> FlatNecessity:
    """Evaluate, for every column l, the worst over m of
    (sum_j |u_jm u_jl| / 2 - max_i |u_im u_il|), and compare the best column
    against -1/(2*sqrt(d)). No diagonal can flatten a column that fails this."""
    A = check_unitary(U)
    d = A.shape[0]
    X = np.abs(A)
    W = X.T @ X
    B = np.max(X[:, :, None] * X[:, None, :], axis=0)
    values = (W / 2.0 - B).min(axis=0)
    threshold = -1.0 / (2.0 * np.sqrt(d))
    margins = values - threshold
    best = int(np.argmax(margins))
    return FlatNecessity(holds=bool(margins[best] >= 0.0), best_column=best,
                         margin=float(margins[best]), column_margins=margins)


def dominant_entry_blocker(U) -> bool:
    """True when every row has a dominant entry so large that no column can be
    flattened: min over rows of the largest |u|^2 exceeds
    sqrt((1 + 1/sqrt(d))/2)."""
    A = check_unitary(U)
    d = A.shape[0]
    row_peaks = (np.abs(A) ** 2).max(axis=1)
    return bool(row_peaks.min() > np.sqrt((1.0 + 1.0 / np.sqrt(d)) / 2.0))


@dataclass(frozen=True)
class ProximityVerdict:
    """Squared Frobenius distance from ``U`` to the nearest product of a
    diagonal unitary and a permutation, against the blocking threshold."""

    blocked: bool
    distance_sq: float
    threshold: float


def permutation_proximity_blocker(U) -> ProximityVerdict:
    """Matrices too close to a permutation (times phases) cannot generate
    mutually coherent states in three strokes; the distance has the closed
    form 2d - 2*sum_k max_j |u_kj|."""
    A = check_unitary(U)
    d = A.shape[0]
    distance_sq = float(2.0 * d - 2.0 * np.abs(A).max(axis=1).sum())
    threshold = float(2.0 - 2.0 * np.sqrt((1.0 + 1.0 / np.sqrt(d)) / 2.0))
    return ProximityVerdict(blocked=bool(distance_sq < threshold),
                            distance_sq=distance_sq, threshold=threshold)


@dataclass(frozen=True)
class FlatColumnSolution:
    """Phases that flatten one column.

    With ``convention = "u_dag_d_u"`` the column ``column`` of U† diag(e^{i
    phases}) U has all moduli 1/sqrt(d) up to ``residual``; with
    ``"u_d_u_dag"`` the same holds for U diag(e^{i phases}) U†.
    """

    column: int
    phases: np.ndarray
    convention: str
    residual: float


def _conjugated_column(A: np.ndarray, phases: np.ndarray, col: int) -> np.ndarray:
    return A.conj().T @ (np.exp(1j * phases) * A[:, col])


def flat_column_residual(U, solution: FlatColumnSolution) -> float:
    """Max deviation of the solution's column moduli from 1/sqrt(d)."""
    A = check_unitary(U)
    B = A if solution.convention == "u_dag_d_u" else A.conj().T
    col = _conjugated_column(B, solution.phases, solution.column)
    return float(np.max(np.abs(np.abs(col) - 1.0 / np.sqrt(A.shape[0]))))


def search_flat_column(U, budget: int | None = None, seed: int = 0,
                       tol_flat: float = TOL_FLAT) -> FlatColumnSolution | None:
    """Multi-start phase search for a flat column of U†DU or UDU†.

    Columns that fail the per-column necessary condition are skipped outright.
    For each remaining column, ``budget`` restarts (default 8*d) of Nelder-Mead
    run over the d-1 free phases (the first phase is pinned to 0, removing the
    global-phase direction), each restart seeded from (seed, convention,
    column, restart) so results are reproducible and order-independent. The
    search stops at the first excellent solution (residual below tol_flat/100)
    and otherwise returns the best solution below ``tol_flat``, or None.
    """
    A = check_unitary(U)
    d = A.shape[0]
    if budget is None:
        budget = 8 * d
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget!r}")
    target = 1.0 / np.sqrt(d)
    best: FlatColumnSolution | None = None
    for conv_idx, name in enumerate(_CONVENTIONS):
        B = A if name == "u_dag_d_u" else A.conj().T
        margins = flat_column_necessary(B).column_margins
        for col in range(d):
            if margins[col] < -1e-12:
                continue

            def objective(free: np.ndarray) -> float:
                phases = np.concatenate(([0.0], free))
                out = _conjugated_column(B, phases, col)
                dev = np.abs(out) - target
                return float(dev @ dev)

            for restart in range(budget):
                rng = np.random.default_rng([seed, conv_idx, col, restart])
                x0 = rng.uniform(0.0, 2.0 * np.pi, d - 1)
                res = minimize(objective, x0, method="Nelder-Mead",
                               options={"xatol": 1e-12, "fatol": 1e-18,
                                        "maxiter": 800 * max(1, d - 1)})
                phases = np.concatenate(([0.0], res.x)) % (2.0 * np.pi)
                out = _conjugated_column(B, phases, col)
                resid = float(np.max(np.abs(np.abs(out) - target)))
                cand = FlatColumnSolution(column=col, phases=phases,
                                          convention=name, residual=resid)
                if best is None or cand.residual < best.residual:
                    best = cand
                if best.residual < tol_flat / 100.0:
                    return best
    if best is not None and best.residual < tol_flat:
        return best
    return None


def search_unbiased_state(U, budget: int | None = None, seed: int = 0,
                          tol: float = 1e-8) -> np.ndarray | None:
    """Direct multi-start search for a state flat in the computational basis
    whose image under ``U`` is flat as well. Such states exist for every
    unitary; this searches the d-1 free phases of psi directly."""
    A = check_unitary(U)
    d = A.shape[0]
    if budget is None:
        budget = 8 * d
    target = 1.0 / np.sqrt(d)

    def make_state(free: np.ndarray) -> np.ndarray:
        return np.exp(1j * np.concatenate(([0.0], free))) / np.sqrt(d)

    def objective(free: np.ndarray) -> float:
        dev = np.abs(A @ make_state(free)) - target
        return float(dev @ dev)

    best_state = None
    best_resid = np.inf
    for restart in range(budget):
        rng = np.random.default_rng([seed, 7, restart])
        x0 = rng.uniform(0.0, 2.0 * np.pi, d - 1)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-18,
                                "maxiter": 800 * max(1, d - 1)})
        psi = make_state(np.asarray(res.x))
        resid = float(np.max(np.abs(np.abs(A @ psi) - target)))
        if resid < best_resid:
            best_resid, best_state = resid, psi
        if best_resid < tol / 100.0:
            break
    if best_state is not None and best_resid < tol:
        return best_state
    return None


@dataclass(frozen=True)
class RealizedState:
    """A mutually coherent state assembled from a flat-column solution.

    ``psi`` is the final state (still a product of engine strokes applied to a
    basis state); ``second_phases`` is the extra diagonal that aligned the flat
    column's phases with the reference unbiased state ``reference``.
    """

    psi: np.ndarray
    second_phases: np.ndarray
    reference: np.ndarray


def realize_state(U, solution: FlatColumnSolution, seed: int = 0,
                  budget: int | None = None, state_tol: float = 1e-10) -> RealizedState | None:
    """Turn a flat-column certificate into an actual mutually coherent state.

    A flat column only fixes moduli; a further diagonal stroke must fit the
    phases. The target phases come from a reference state unbiased in both
    bases (found by direct search; one always exists). Returns None when the
    reference search fails within its budget.
    """
    A = check_unitary(U)
    reference = search_unbiased_state(A, budget=budget, seed=seed, tol=state_tol)
    if reference is None:
        return None
    B = A if solution.convention == "u_dag_d_u" else A.conj().T
    flat_vec = _conjugated_column(B, solution.phases, solution.column)
    second = (np.angle(reference) - np.angle(flat_vec)) % (2.0 * np.pi)
    psi = np.exp(1j * second) * flat_vec
    psi = psi / np.linalg.norm(psi)
    return RealizedState(psi=psi, second_phases=second, reference=reference)


def verify_mutually_coherent(U, psi, tol: float) -> bool:
    """Check flatness of the state in both bases: every modulus of ``psi`` and
    of ``U @ psi`` within ``tol`` of 1/sqrt(d)."""
    A = check_unitary(U)
    d = A.shape[0]
    p = np.asarray(psi, dtype=complex).reshape(-1)
    if p.size != d:
        raise ValueError(f"state has {p.size} entries, matrix is {d}x{d}")
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    target = 1.0 / np.sqrt(d)
    dev_in = np.max(np.abs(np.abs(p) - target))
    dev_out = np.max(np.abs(np.abs(A @ p) - target))
    return bool(max(dev_in, dev_out) <= tol)
