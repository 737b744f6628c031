"""Constructive single-qubit control from rotations about two fixed axes.

Conventions used throughout:

- ``Rotation(axis, angle)`` is the unitary exp(i*angle*(axis . sigma)), i.e.
  cos(angle)*I + i*sin(angle)*(axis . sigma). On the Bloch sphere it rotates
  vectors by ``-2*angle`` about ``axis`` (right-hand rule), so a Bloch rotation
  of ``rho`` needs a matrix angle of ``-rho/2``.
- The two available axes are the z-axis and an axis tilted from it by
  ``alpha_axis`` in the x-z plane: (sin(alpha_axis), 0, cos(alpha_axis)).
- Plans list rotations in application order: the first entry acts first on the
  state. The corresponding matrix multiplies in reverse.
- Plans realize their target up to an irrelevant global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import check_unitary
from .errors import PreconditionError

Z_AXIS = (0.0, 0.0, 1.0)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_AXIS_TOL = 1e-12
_ZERO_ANGLE = 1e-14


def tilted_axis(alpha_axis: float) -> tuple[float, float, float]:
    """Unit axis tilted by ``alpha_axis`` from z toward x."""
    return (math.sin(alpha_axis), 0.0, math.cos(alpha_axis))


@dataclass(frozen=True)
class Rotation:
    """A rotation stroke: unit axis (3-vector) and matrix angle in radians."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        ax = tuple(float(c) for c in self.axis)
        if len(ax) != 3:
            raise ValueError(f"axis must have three components, got {self.axis!r}")
        norm = math.sqrt(sum(c * c for c in ax))
        if abs(norm - 1.0) > _AXIS_TOL:
            raise ValueError(f"axis must be a unit vector, got norm {norm!r}")
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "angle", float(self.angle))


def rotation_matrix(rot: Rotation) -> np.ndarray:
    """2x2 unitary cos(angle)*I + i*sin(angle)*(axis . sigma)."""
    nx, ny, nz = rot.axis
    c, s = math.cos(rot.angle), math.sin(rot.angle)
    return np.array([
        [c + 1j * s * nz, 1j * s * (nx - 1j * ny)],
        [1j * s * (nx + 1j * ny), c - 1j * s * nz],
    ])


def _is_identity_angle(angle: float) -> bool:
    # angle = k*pi gives +/- identity, which is a pure global phase
    return abs(math.sin(angle)) < _ZERO_ANGLE


def canonical_rotations(rotations) -> tuple[Rotation, ...]:
    """Drop strokes that are global phases and merge consecutive strokes about
    the same axis, so consecutive surviving strokes always alternate axes."""
    out: list[Rotation] = []
    for r in rotations:
        if _is_identity_angle(r.angle):
            continue
        if out and out[-1].axis == r.axis:
            merged = Rotation(r.axis, out[-1].angle + r.angle)
            out.pop()
            if not _is_identity_angle(merged.angle):
                out.append(merged)
        else:
            out.append(r)
    return tuple(out)


@dataclass(frozen=True)
class StrokePlan:
    """A finite program of rotations about the two engine axes.

    ``rotations`` are in application order and alternate between the z-axis
    and the tilted axis. ``guaranteed_bound`` is the construction's worst-case
    length; ``meets_reference_bound`` records whether the plan also fits the
    sharper ceil(pi/alpha)+1 count (measured, never promised). For state plans
    ``start_state`` is the pole the plan must be applied to.
    """

    rotations: tuple[Rotation, ...]
    alpha_axis: float
    kind: str
    start_state: np.ndarray | None
    guaranteed_bound: int
    meets_reference_bound: bool

    def __len__(self) -> int:
        return len(self.rotations)


def plan_matrix(plan: StrokePlan) -> np.ndarray:
    """Product of the plan's rotations (first-applied rightmost)."""
    W = np.eye(2, dtype=complex)
    for r in plan.rotations:
        W = rotation_matrix(r) @ W
    return W


def apply_plan(plan: StrokePlan, psi=None) -> np.ndarray:
    """Run the plan on ``psi`` (defaults to the plan's start state)."""
    if psi is None:
        if plan.start_state is None:
            raise ValueError("this plan has no start state; pass psi explicitly")
        psi = plan.start_state
    return plan_matrix(plan) @ np.asarray(psi, dtype=complex)


def operator_distance(U, V) -> float:
    """Global-phase-invariant Frobenius distance between unitaries.

    Computed as the Frobenius norm of the explicitly phase-aligned difference
    rather than via sqrt(2d - 2|tr(U†V)|): the two agree in exact arithmetic,
    but the trace form loses half the significant digits to cancellation and
    cannot resolve distances below ~1e-8 in double precision.
    """
    A = np.asarray(U, dtype=complex)
    B = np.asarray(V, dtype=complex)
    t = np.trace(A.conj().T @ B)
    phase = t / abs(t) if abs(t) > 0.0 else 1.0
    return float(np.linalg.norm(A * phase - B))


@dataclass(frozen=True)
class EulerZXZ:
    """Decomposition V = exp(i*phase) * Rz(z_after) * Rx(x_tilt) * Rz(z_before),
    where Rx rotates about the x-axis; ``z_before`` is applied first."""

    z_after: float
    x_tilt: float
    z_before: float
    phase: float


def _wrap_2pi(x: float) -> float:
    return float(x % (2.0 * math.pi))


def _wrap_pi(x: float) -> float:
    return float((x + math.pi) % (2.0 * math.pi) - math.pi)


def euler_zxz(V) -> EulerZXZ:
    """Euler angles of a 2x2 unitary in z-x-z form.

    The tilt comes out in [0, pi/2] and the z-angles in [0, 2*pi); when the
    matrix is diagonal or antidiagonal one z-angle is redundant and is set so
    the other carries everything.
    """
    A = check_unitary(V)
    if A.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {A.shape}")
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    phase = float(np.angle(det) / 2.0)
    V0 = A * np.exp(-1j * phase)
    a, b = V0[0, 0], V0[0, 1]
    tilt = math.atan2(abs(b), abs(a))
    s = float(np.angle(a)) if abs(a) > 1e-12 else None
    t = float(np.angle(b)) - math.pi / 2.0 if abs(b) > 1e-12 else None
    if s is None:
        s = t
    if t is None:
        t = s
    return EulerZXZ(z_after=_wrap_2pi((s + t) / 2.0), x_tilt=tilt,
                    z_before=_wrap_2pi((s - t) / 2.0), phase=phase)


def euler_matrix(e: EulerZXZ) -> np.ndarray:
    """Rebuild the unitary from its z-x-z angles."""
    rz_a = rotation_matrix(Rotation(Z_AXIS, e.z_after))
    rx = rotation_matrix(Rotation((1.0, 0.0, 0.0), e.x_tilt))
    rz_b = rotation_matrix(Rotation(Z_AXIS, e.z_before))
    return np.exp(1j * e.phase) * rz_a @ rx @ rz_b


def _check_alpha(alpha_axis: float) -> float:
    a = float(alpha_axis)
    if not (0.0 < a <= math.pi / 2.0 + 1e-15):
        raise ValueError(f"axis tilt must lie in (0, pi/2], got {alpha_axis!r}")
    return min(a, math.pi / 2.0)


def synthesize_unitary(V, alpha_axis: float) -> StrokePlan:
    """Compile a 2x2 unitary into alternating z-axis and tilted-axis strokes.

    The Euler tilt is cut into pieces of at most ``alpha_axis`` (remainder
    last); each piece is realized as one tilted-axis stroke conjugated by two
    half-phase z-strokes, and adjacent z-strokes merge. The plan length is at
    most 2*ceil(pi/(2*alpha_axis)) + 1 and the product matches ``V`` up to
    global phase.
    """
    alpha = _check_alpha(alpha_axis)
    eu = euler_zxz(V)
    n_axis = tilted_axis(alpha)
    if eu.x_tilt < _ZERO_ANGLE:
        chain = [Rotation(Z_AXIS, eu.z_after + eu.z_before)]
    else:
        k = max(1, math.ceil(eu.x_tilt / alpha - 1e-12))
        pieces = [alpha] * (k - 1) + [eu.x_tilt - (k - 1) * alpha]
        thetas = [math.asin(min(1.0, math.sin(g) / math.sin(alpha))) for g in pieces]
        psis = [math.atan2(math.sin(th) * math.cos(alpha), math.cos(th)) for th in thetas]
        chain = [Rotation(Z_AXIS, eu.z_after - psis[0] / 2.0)]
        for i in range(k):
            chain.append(Rotation(n_axis, thetas[i]))
            if i < k - 1:
                chain.append(Rotation(Z_AXIS, -(psis[i] + psis[i + 1]) / 2.0))
        chain.append(Rotation(Z_AXIS, eu.z_before - psis[-1] / 2.0))
    rots = canonical_rotations(reversed(chain))
    bound = 2 * math.ceil(math.pi / (2.0 * alpha)) + 1
    reference = math.ceil(math.pi / alpha) + 1
    return StrokePlan(rotations=rots, alpha_axis=alpha, kind="unitary",
                      start_state=None, guaranteed_bound=bound,
                      meets_reference_bound=len(rots) <= reference)


def _rodrigues(v: np.ndarray, axis, angle: float) -> np.ndarray:
    k = np.asarray(axis, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(k, v) * s + k * np.dot(k, v) * (1.0 - c)


def synthesize_state(target, alpha_axis: float) -> StrokePlan:
    """Compile a target pure state into strokes from the nearer z-pole.

    The polar distance from the chosen pole (at most pi/2) is covered in
    tilted-axis strokes worth up to ``2*alpha_axis`` of polar angle each, with
    z-strokes in between to set up each bite and one final z-stroke for the
    azimuth. Plan length is at most ceil(pi/(2*alpha_axis)) + 1 and the result
    matches the target up to global phase.
    """
    alpha = _check_alpha(alpha_axis)
    t = np.asarray(target, dtype=complex).reshape(-1)
    if t.size != 2:
        raise ValueError(f"target must be a 2-component state, got size {t.size}")
    nrm = float(np.linalg.norm(t))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"target must be normalized, got norm {nrm!r}")
    theta_t = 2.0 * math.atan2(abs(t[1]), abs(t[0]))
    phi_t = float(np.angle(t[1]) - np.angle(t[0]))
    north = theta_t <= math.pi / 2.0
    pole = np.array([1.0, 0.0], dtype=complex) if north else np.array([0.0, 1.0], dtype=complex)
    theta0 = theta_t if north else math.pi - theta_t
    n_axis = tilted_axis(alpha)
    rots: list[Rotation] = []
    if theta0 >= _ZERO_ANGLE:
        k = max(1, math.ceil(theta0 / (2.0 * alpha) - 1e-12))
        increments = [2.0 * alpha] * (k - 1) + [theta0 - (k - 1) * 2.0 * alpha]
        theta_cur = 0.0 if north else math.pi
        v = np.array([0.0, 0.0, 1.0 if north else -1.0])
        az_setup = math.pi if north else 0.0
        for i, inc in enumerate(increments):
            theta_next = theta_cur + inc if north else theta_cur - inc
            if i > 0:
                az_cur = math.atan2(v[1], v[0])
                dphi = _wrap_pi(az_setup - az_cur)
                if abs(dphi) > _ZERO_ANGLE:
                    rots.append(Rotation(Z_AXIS, -dphi / 2.0))
                v = np.array([math.sin(theta_cur) * math.cos(az_setup),
                              math.sin(theta_cur) * math.sin(az_setup),
                              math.cos(theta_cur)])
            c = theta_cur + alpha if north else theta_cur - alpha
            arg = (math.cos(theta_next) - math.cos(c) * math.cos(alpha)) / (
                math.sin(c) * math.sin(alpha))
            w = math.acos(max(-1.0, min(1.0, arg)))
            rho = w if north else w - math.pi
            rots.append(Rotation(n_axis, -rho / 2.0))
            v = _rodrigues(v, n_axis, rho)
            theta_cur = theta_next
        if math.sin(theta_t) > _ZERO_ANGLE:
            az_cur = math.atan2(v[1], v[0])
            dphi = _wrap_pi(phi_t - az_cur)
            if abs(dphi) > _ZERO_ANGLE:
                rots.append(Rotation(Z_AXIS, -dphi / 2.0))
    bound = math.ceil(math.pi / (2.0 * alpha)) + 1
    reference = math.ceil(math.pi / alpha) + 1
    plan_rots = canonical_rotations(rots)
    return StrokePlan(rotations=plan_rots, alpha_axis=alpha, kind="state",
                      start_state=pole, guaranteed_bound=bound,
                      meets_reference_bound=len(plan_rots) <= reference)


def three_stroke_feasible(phi: float) -> bool:
    """Whether a maximally mutually coherent state is reachable with a single
    tilted-axis stroke between two z-strokes, for the two-level engine family
    parameterized by ``phi`` (axis tilt = 2*phi): feasible exactly on the
    closed interval [pi/8, 3*pi/8]."""
    p = float(phi)
    if not (0.0 <= p <= math.pi / 2.0):
        raise ValueError(f"phi must lie in [0, pi/2], got {phi!r}")
    return math.pi / 8.0 <= p <= 3.0 * math.pi / 8.0


def max_mutual_bloch(axis_a, axis_b) -> np.ndarray:
    """Bloch direction of the states with flat weights in both rotation-axis
    eigenbases: the normalized cross product of the two axes."""
    a = np.asarray(axis_a, dtype=float)
    b = np.asarray(axis_b, dtype=float)
    for name, vec in (("axis_a", a), ("axis_b", b)):
        if vec.shape != (3,) or abs(np.linalg.norm(vec) - 1.0) > 1e-9:
            raise ValueError(f"{name} must be a 3D unit vector")
    cross = np.cross(a, b)
    n = float(np.linalg.norm(cross))
    if n < 1e-12:
        raise PreconditionError("axes are parallel; no preferred direction exists")
    return cross / n


def bloch_state(direction) -> np.ndarray:
    """Pure state with the given unit Bloch vector."""
    r = np.asarray(direction, dtype=float)
    if r.shape != (3,) or abs(np.linalg.norm(r) - 1.0) > 1e-9:
        raise ValueError("direction must be a 3D unit vector")
    theta = math.acos(max(-1.0, min(1.0, r[2])))
    phi = math.atan2(r[1], r[0])
    return np.array([math.cos(theta / 2.0),
                     np.exp(1j * phi) * math.sin(theta / 2.0)])


def bloch_vector(psi) -> np.ndarray:
    """Bloch vector of a pure state."""
    p = np.asarray(psi, dtype=complex).reshape(-1)
    if p.size != 2:
        raise ValueError("state must have two components")
    p = p / np.linalg.norm(p)
    cross = np.conj(p[0]) * p[1]
    return np.array([2.0 * cross.real, 2.0 * cross.imag,
                     abs(p[0]) ** 2 - abs(p[1]) ** 2])


def axis_basis_unitary(axis) -> np.ndarray:
    """Basis change whose rows are the (bra) eigenvectors of axis . sigma, so
    applying it expresses a state in that axis's eigenbasis."""
    r = np.asarray(axis, dtype=float)
    if r.shape != (3,) or abs(np.linalg.norm(r) - 1.0) > 1e-9:
        raise ValueError("axis must be a 3D unit vector")
    theta = math.acos(max(-1.0, min(1.0, r[2])))
    phi = math.atan2(r[1], r[0])
    plus = np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)])
    minus = np.array([-np.exp(-1j * phi) * math.sin(theta / 2.0), math.cos(theta / 2.0)])
    return np.vstack([plus.conj(), minus.conj()])
