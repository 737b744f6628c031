from __future__ import annotations

import math

import numpy as np
import pytest

from altengine.coherence import fourier_matrix, random_unitary
from altengine.matrices import qubit_engine_unitary
from altengine.mutual import (
    TOL_FLAT,
    FlatColumnSolution,
    flat_column_necessary,
    flat_column_residual,
    dominant_entry_blocker,
    permutation_proximity_blocker,
    realize_state,
    search_flat_column,
    search_unbiased_state,
    verify_mutually_coherent,
)
from altengine.qubit_control import Rotation, rotation_matrix, three_stroke_feasible

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def test_hadamard_hand_built_flat_column():
    # H† diag(1, i) H has every entry of modulus 1/sqrt(2)
    sol = FlatColumnSolution(column=0, phases=np.array([0.0, math.pi / 2]),
                             convention="u_dag_d_u", residual=0.0)
    assert flat_column_residual(HADAMARD, sol) < 1e-15
    sol_other = FlatColumnSolution(column=1, phases=np.array([0.0, math.pi / 2]),
                                   convention="u_d_u_dag", residual=0.0)
    assert flat_column_residual(HADAMARD, sol_other) < 1e-15


def test_necessity_holds_for_hadamard_and_fourier():
    for U in (HADAMARD, fourier_matrix(3), fourier_matrix(5)):
        verdict = flat_column_necessary(U)
        assert verdict.holds
        assert verdict.margin >= 0.0
        assert verdict.column_margins.shape == (U.shape[0],)


def test_identity_fails_necessity_and_all_blockers_fire():
    for d in (2, 3, 5):
        I = np.eye(d)
        assert not flat_column_necessary(I).holds
        assert dominant_entry_blocker(I)
        prox = permutation_proximity_blocker(I)
        assert prox.blocked
        assert prox.distance_sq == pytest.approx(0.0, abs=1e-12)
        assert search_flat_column(I, budget=2) is None


def test_hadamard_proximity_values():
    prox = permutation_proximity_blocker(HADAMARD)
    assert prox.distance_sq == pytest.approx(4.0 - 2.0 * math.sqrt(2.0), abs=1e-12)
    assert prox.threshold == pytest.approx(
        2.0 - 2.0 * math.sqrt((1.0 + 1.0 / math.sqrt(2.0)) / 2.0), abs=1e-12)
    assert not prox.blocked


def test_small_rotation_is_blocked():
    U = rotation_matrix(Rotation((1.0, 0.0, 0.0), 0.05))
    assert permutation_proximity_blocker(U).blocked
    assert dominant_entry_blocker(U)
    assert not flat_column_necessary(U).holds
    assert search_flat_column(U, budget=2) is None


def _near_permutation(d: int, eps: float, rng) -> np.ndarray:
    P = np.eye(d)[rng.permutation(d)]
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (G + G.conj().T) / 2.0
    H *= eps / np.linalg.norm(H)
    w, V = np.linalg.eigh(H)
    return P @ (V * np.exp(1j * w)) @ V.conj().T


def test_blocker_chain_on_random_matrices():
    # proximity blocking implies the dominant-entry blocker, which implies the
    # flat-column necessary condition fails
    rng = np.random.default_rng(301)
    cases = []
    for _ in range(60):
        d = int(rng.integers(2, 6))
        cases.append(random_unitary(d, rng))
        cases.append(_near_permutation(d, float(rng.uniform(0.01, 0.3)), rng))
    n_blocked = 0
    for U in cases:
        prox = permutation_proximity_blocker(U)
        if prox.blocked:
            n_blocked += 1
            assert dominant_entry_blocker(U)
        if dominant_entry_blocker(U):
            assert not flat_column_necessary(U).holds
    assert n_blocked >= 40  # the near-permutation half must actually exercise it


def test_engine_family_margin_closed_form():
    # for the rotation family the best-column margin is 1/(2*sqrt(2)) minus
    # |cos(2*phi)|/2, so the necessary condition holds exactly on the
    # three-stroke feasibility window
    for phi in np.linspace(0.0, math.pi / 2, 91):
        U = qubit_engine_unitary(float(phi))
        verdict = flat_column_necessary(U)
        expected = (1.0 / math.sqrt(2.0) - abs(math.cos(2.0 * phi))) / 2.0
        assert verdict.margin == pytest.approx(expected, abs=1e-12)
        if abs(phi - math.pi / 8) > 1e-6 and abs(phi - 3 * math.pi / 8) > 1e-6:
            assert verdict.holds == three_stroke_feasible(float(phi))


def test_search_finds_flat_column_for_fourier():
    for d in (2, 3):
        U = fourier_matrix(d)
        sol = search_flat_column(U, seed=0)
        assert sol is not None
        assert sol.residual < TOL_FLAT
        assert flat_column_residual(U, sol) == pytest.approx(sol.residual, abs=1e-14)


def test_search_finds_solution_for_feasible_engine_angle():
    U = qubit_engine_unitary(math.pi / 4)
    sol = search_flat_column(U, seed=0)
    assert sol is not None
    assert sol.residual < TOL_FLAT


def test_search_returns_none_for_infeasible_engine_angle():
    U = qubit_engine_unitary(0.2)  # below pi/8, necessity fails in both forms
    assert search_flat_column(U, seed=0) is None


def test_search_is_deterministic():
    U = fourier_matrix(3)
    a = search_flat_column(U, seed=5)
    b = search_flat_column(U, seed=5)
    assert a is not None and b is not None
    assert a.column == b.column
    assert a.convention == b.convention
    assert np.array_equal(a.phases, b.phases)


def test_search_budget_validation():
    with pytest.raises(ValueError):
        search_flat_column(fourier_matrix(3), budget=0)


def test_unbiased_state_exists_for_randoms():
    rng = np.random.default_rng(303)
    for d in (2, 3, 4):
        U = random_unitary(d, rng)
        psi = search_unbiased_state(U, seed=1)
        assert psi is not None
        target = 1.0 / math.sqrt(d)
        np.testing.assert_allclose(np.abs(psi), target, atol=1e-12)
        assert np.max(np.abs(np.abs(U @ psi) - target)) < 1e-8


def test_realize_state_full_pipeline():
    for U in (HADAMARD, fourier_matrix(3)):
        sol = search_flat_column(U, seed=0)
        assert sol is not None
        realized = realize_state(U, sol, seed=0)
        assert realized is not None
        assert verify_mutually_coherent(U, realized.psi, 10 * TOL_FLAT)
        assert realized.second_phases.shape == (U.shape[0],)
        d = U.shape[0]
        np.testing.assert_allclose(np.abs(realized.reference),
                                   1.0 / math.sqrt(d), atol=1e-12)


def test_verify_rejects_bad_states():
    U = fourier_matrix(3)
    with pytest.raises(ValueError):
        verify_mutually_coherent(U, np.array([1.0, 0.0]), 1e-8)
    with pytest.raises(ValueError):
        verify_mutually_coherent(U, np.array([1.0, 1.0, 1.0]), 1e-8)
    flat = np.ones(3) / math.sqrt(3)
    # existence is about the state, not reachability: for the identity both
    # bases coincide and the flat state passes
    assert verify_mutually_coherent(np.eye(3), flat, 1e-8)


def test_verify_accepts_known_mutually_coherent_state():
    # for the Fourier matrix the all-ones flat state maps to a basis vector,
    # which is not flat; a chirp state is flat in both bases
    d = 3
    F = fourier_matrix(d)
    chirp = np.exp(2j * np.pi * np.arange(d) ** 2 / d) / math.sqrt(d)
    assert verify_mutually_coherent(F, chirp, 1e-9)
    ones = np.ones(d) / math.sqrt(d)
    assert not verify_mutually_coherent(F, ones, 1e-9)
