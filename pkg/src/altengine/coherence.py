"""Analysis of coherence generation by alternating one fixed unitary with
diagonal phase strokes.

The machine can apply arbitrary diagonal unitaries (free strokes in the
computational basis) and one fixed basis change ``U`` or its inverse. Whether
products of such strokes can reach everything is controlled by the sparsity
pattern of ``U``: the key object is the Boolean overlap pattern of pairs of
columns, and the key question is whether some Boolean power of it is all-true.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import PreconditionError, RetryExhaustedError, StructuralImpossibilityError

TOL_UNITARY = 1e-10
TOL_ZERO = 1e-12
TOL_DENSE = 1e-8
RETRY_MAX = 64


def unitarity_defect(U) -> float:
    """Frobenius norm of U†U minus the identity."""
    A = np.asarray(U, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    d = A.shape[0]
    return float(np.linalg.norm(A.conj().T @ A - np.eye(d)))


def is_unitary(U, tol: float = TOL_UNITARY) -> bool:
    return unitarity_defect(U) <= tol


def check_unitary(U, tol: float = TOL_UNITARY) -> np.ndarray:
    """Validate and return ``U`` as a complex array; raises with the Frobenius
    defect when it is not unitary within ``tol``."""
    A = np.asarray(U, dtype=complex)
    defect = unitarity_defect(A)
    if defect > tol:
        raise PreconditionError(
            f"matrix is not unitary: Frobenius defect {defect:.3e} > {tol:.1e}")
    return A


def fourier_matrix(d: int) -> np.ndarray:
    """Discrete Fourier matrix F_jk = exp(-2*pi*i*j*k/d)/sqrt(d)."""
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(-2j * np.pi * j * k / d) / np.sqrt(d)


def fractional_fourier(d: int, exponent: float) -> np.ndarray:
    """Fractional power of the Fourier matrix via its spectral decomposition.

    Eigenphases are taken in [-pi, pi): the Fourier matrix has eigenvalues
    among the fourth roots of unity, and the -1 eigenvalue is assigned phase
    -pi rather than +pi. That choice makes the family deterministic (floating
    point puts the -1 eigenvalue a hair off the axis on either side) and keeps
    the d=3 stroke lower bound monotone in the exponent and above the d=5
    curve, as it should be. ``exponent = 1`` returns the Fourier matrix itself
    and ``exponent = 0`` the identity. The Schur form is used for the
    eigenbasis because the Fourier matrix is normal with highly degenerate
    eigenvalues, where a plain eigendecomposition need not return an
    orthonormal basis.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    if exponent == 1.0:
        return fourier_matrix(d)
    if exponent == 0.0:
        return np.eye(d, dtype=complex)
    T, Q = scipy.linalg.schur(fourier_matrix(d), output="complex")
    theta = np.angle(np.diag(T))
    theta = np.where(np.abs(theta) >= np.pi - 1e-9, -np.pi, theta)
    return Q @ np.diag(np.exp(1j * exponent * theta)) @ Q.conj().T


def pattern_matrix(U, tol_zero: float = TOL_ZERO) -> np.ndarray:
    """Boolean indicator of entries with modulus above ``tol_zero``."""
    A = check_unitary(U)
    return np.abs(A) > tol_zero


def overlap_pattern(U, tol_zero: float = TOL_ZERO) -> np.ndarray:
    """Boolean pattern of column-support overlaps: entry (a, b) is true when
    columns a and b of ``U`` share a row with nonzero entries. The diagonal is
    always true for a unitary (columns have unit norm), so Boolean powers of
    this matrix grow monotonically."""
    P = pattern_matrix(U, tol_zero).astype(np.int64)
    return (P.T @ P) > 0


@dataclass(frozen=True)
class PrimitivityVerdict:
    """Result of the all-true Boolean power search. ``minimal_power`` is the
    least power of the overlap pattern with no false entries, or None when no
    power up to the Wielandt horizon (d-1)^2 + 1 achieves it (in which case no
    power ever will)."""

    satisfied: bool
    minimal_power: int | None
    horizon: int


def pattern_primitivity(U, tol_zero: float = TOL_ZERO) -> PrimitivityVerdict:
    """Decide whether some Boolean power of the column-overlap pattern is
    all-true, and find the least such power."""
    B = overlap_pattern(U, tol_zero)
    d = B.shape[0]
    horizon = (d - 1) ** 2 + 1
    cur = B.copy()
    for m in range(1, horizon + 1):
        if cur.all():
            return PrimitivityVerdict(satisfied=True, minimal_power=m, horizon=horizon)
        cur = (cur.astype(np.int64) @ B.astype(np.int64)) > 0
    return PrimitivityVerdict(satisfied=False, minimal_power=None, horizon=horizon)


@dataclass(frozen=True)
class GraphDiagnosis:
    """Directed-graph view of a Boolean pattern: strong connectivity,
    aperiodicity (via self-loops), and an upper bound on the all-true power
    valid for symmetric patterns."""

    irreducible: bool
    aperiodic: bool
    power_upper_bound: int | None


def graph_diagnosis(pattern) -> GraphDiagnosis:
    """Diagnose the directed graph of a Boolean pattern matrix.

    Intended for symmetric patterns with self-loops (column-overlap patterns
    are such): there, strong connectivity plus any loop forces aperiodicity,
    and ``2 * max_i alpha_i`` bounds the first all-true power, where ``alpha_i``
    is the least number of steps from vertex i to a fixed loop vertex (taken as
    1 at the loop vertex itself). The loop vertex is chosen to minimize the
    bound.
    """
    B = np.asarray(pattern, dtype=bool)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square Boolean pattern, got shape {B.shape}")
    d = B.shape[0]
    adj = csr_matrix(B)
    n_comp, _ = connected_components(adj, directed=True, connection="strong")
    irreducible = bool(n_comp == 1)
    loops = np.flatnonzero(np.diag(B))
    aperiodic = irreducible and loops.size > 0
    bound: int | None = None
    if aperiodic:
        rev = csr_matrix(B.T)
        best = None
        for i0 in loops:
            dist = shortest_path(rev, method="D", unweighted=True, indices=int(i0))
            alpha = np.maximum(dist, 1.0)
            if not np.all(np.isfinite(alpha)):
                continue
            cand = int(2 * alpha.max())
            if best is None or cand < best:
                best = cand
        bound = best
    return GraphDiagnosis(irreducible=irreducible, aperiodic=aperiodic,
                          power_upper_bound=bound)


def column_overlap(U) -> float:
    """Largest off-diagonal entry of X^T X where X holds the entry moduli of
    ``U``: the maximal overlap between two different columns' amplitude
    profiles. Lies in [0, 1] by Cauchy-Schwarz. Defined for d >= 3, where the
    stroke lower bound built on it applies."""
    A = check_unitary(U)
    d = A.shape[0]
    if d < 3:
        raise PreconditionError(f"column overlap is defined for d >= 3, got d={d}")
    X = np.abs(A)
    S = X.T @ X
    np.fill_diagonal(S, -np.inf)
    return float(S.max())


def lower_bound_strokes(U) -> float:
    """Lower bound on the number of basis-change strokes needed before a
    product of diagonal and ``U`` strokes can become fully dense: the bound
    grows as the column overlap shrinks and diverges when column supports are
    disjoint."""
    A = check_unitary(U)
    d = A.shape[0]
    c = column_overlap(A)
    if c <= 0.0:
        return math.inf
    return 2.0 * math.log(d - 1) / math.log((d - 2) * c + 1.0)


def upper_bound_strokes(d: int, n_fourier: int) -> int:
    """Upper bound on the strokes needed to realize an arbitrary unitary when
    the fixed basis change can itself be compiled from ``n_fourier`` Fourier
    stages; even dimension at least 4 required."""
    if int(d) != d or d < 4 or d % 2 != 0:
        raise ValueError(f"dimension must be an even integer >= 4, got {d!r}")
    if int(n_fourier) != n_fourier or n_fourier < 1:
        raise ValueError(f"n_fourier must be an integer >= 1, got {n_fourier!r}")
    return 6 * int(d) * (int(n_fourier) + 1) + 1


def diagonal_unitary(phases) -> np.ndarray:
    """Diagonal unitary diag(exp(i*theta_k)) from a real phase vector."""
    th = np.asarray(phases, dtype=float)
    if th.ndim != 1:
        raise ValueError(f"expected a 1-D phase vector, got shape {th.shape}")
    return np.diag(np.exp(1j * th))


def alternating_product(U, phases) -> np.ndarray:
    """Product D_1 U† D_2 U D_3 U† D_4 U ... for 2M phase rows: row 2m is the
    diagonal applied before U†, row 2m+1 the one before U, leftmost factor
    first."""
    A = check_unitary(U)
    th = np.asarray(phases, dtype=float)
    if th.ndim != 2 or th.shape[0] % 2 != 0 or th.shape[1] != A.shape[0]:
        raise ValueError(f"expected (2M, d) phase rows, got shape {th.shape}")
    W = np.eye(A.shape[0], dtype=complex)
    for m in range(th.shape[0] // 2):
        W = W @ diagonal_unitary(th[2 * m]) @ A.conj().T @ diagonal_unitary(th[2 * m + 1]) @ A
    return W


@dataclass(frozen=True)
class DenseProduct:
    """A verified dense alternating product: the phase rows, the resulting
    matrix, and how many random attempts were consumed."""

    phases: np.ndarray
    product: np.ndarray
    attempts: int


def synthesize_dense_product(U, M: int, seed: int = 0, tol_dense: float = TOL_DENSE,
                             retry_max: int = RETRY_MAX) -> DenseProduct:
    """Find 2M diagonal strokes making the alternating product fully dense.

    Phases are drawn uniformly; the zero sets of the product entries are finite
    phase varieties, so random draws succeed almost surely once the overlap
    pattern admits an all-true power at most ``M``. Each attempt reseeds
    deterministically from (seed, attempt).
    """
    A = check_unitary(U)
    verdict = pattern_primitivity(A)
    if not verdict.satisfied:
        raise StructuralImpossibilityError(
            "no Boolean power of the column-overlap pattern is all-true; "
            "no diagonal strokes can make the product dense"
        )
    if M < verdict.minimal_power:
        raise PreconditionError(
            f"M={M} is below the minimal all-true power {verdict.minimal_power}"
        )
    d = A.shape[0]
    for attempt in range(retry_max):
        rng = np.random.default_rng([seed, attempt])
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(2 * M, d))
        W = alternating_product(A, phases)
        if np.abs(W).min() > tol_dense:
            return DenseProduct(phases=phases, product=W, attempts=attempt + 1)
    raise RetryExhaustedError(
        f"no dense product found in {retry_max} attempts (seed {seed})"
    )


def amplitude_bound(U, M: int) -> np.ndarray:
    """Entrywise ceiling on alternating products with M basis-change pairs:
    the M-th power of X^T X, X holding the entry moduli of ``U``."""
    A = check_unitary(U)
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    X = np.abs(A)
    return np.linalg.matrix_power(X.T @ X, int(M))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R)
    return Q * (diag / np.abs(diag))
