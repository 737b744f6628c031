from __future__ import annotations

import math

import numpy as np
import pytest

from altengine.athermality import (
    CONV_TOL,
    AttractorStates,
    EngineParams,
    attractor_states,
    extreme_occupation_step,
    ground_state_criterion,
    ground_state_round,
    inner_polytope,
    qubit_extremal_matrix,
    qubit_reachable_interval,
    respects_top_bound,
    simulate,
    top_bound_threshold,
    top_occupation_ceiling,
)
from altengine.errors import DegenerateEngineError, PreconditionError
from altengine.hull import in_hull
from altengine.thermo import gibbs_state, total_variation
from oracles import gibbs_stochastic_reachable


def qubit_params() -> EngineParams:
    # cold (0.8, 0.2), hot (0.6, 0.4)
    return EngineParams(levels=(0.0, 1.0), cold_beta=math.log(4.0),
                        hot_beta=math.log(1.5))


def fig2a_params() -> EngineParams:
    return EngineParams(levels=(1.0, 2.0, 3.0), cold_beta=1 / 3, hot_beta=1 / 5)


def ladder_params() -> EngineParams:
    return EngineParams(levels=(1.0, 2.0, 3.0, 4.0), cold_beta=1.0, hot_beta=0.25)


def test_engine_params_gibbs_states():
    params = qubit_params()
    np.testing.assert_allclose(params.cold_gibbs, [0.8, 0.2], atol=1e-14)
    np.testing.assert_allclose(params.hot_gibbs, [0.6, 0.4], atol=1e-14)


def test_engine_params_rejects_hot_colder_than_cold():
    with pytest.raises(PreconditionError):
        EngineParams(levels=(0.0, 1.0), cold_beta=0.5, hot_beta=0.9)


def test_engine_params_degenerate_flags():
    equal = EngineParams(levels=(0.0, 1.0), cold_beta=0.7, hot_beta=0.7)
    assert equal.is_degenerate
    flat = EngineParams(levels=(1.0, 1.0, 1.0), cold_beta=1.0, hot_beta=0.5)
    assert flat.is_degenerate  # degenerate ladder: both baths are uniform
    assert not qubit_params().is_degenerate


def test_qubit_attractors_match_period_two_orbit():
    # independent oracle: the pair (x_g, x_e) with hot(x_g) = x_e and
    # cold(x_e) = x_g, solved by hand from the two affine stroke maps
    params = qubit_params()
    k_cold = (1.0 - params.cold_gibbs[0]) / params.cold_gibbs[0]
    k_hot = (1.0 - params.hot_gibbs[0]) / params.hot_gibbs[0]
    x_g = (1.0 - k_cold) / (1.0 - k_cold * k_hot)
    x_e = 1.0 - k_hot * x_g
    att = attractor_states(params)
    assert att.ground[0] == pytest.approx(x_g, abs=1e-12)
    assert att.excited[0] == pytest.approx(x_e, abs=1e-12)
    np.testing.assert_allclose(att.ground, [0.9, 0.1], atol=1e-12)
    np.testing.assert_allclose(att.excited, [0.4, 0.6], atol=1e-12)


def test_qubit_attractors_are_a_two_cycle_of_stroke_maps():
    params = qubit_params()
    att = attractor_states(params)
    hot_map = qubit_extremal_matrix(params.hot_gibbs)
    cold_map = qubit_extremal_matrix(params.cold_gibbs)
    np.testing.assert_allclose(hot_map @ att.ground, att.excited, atol=1e-12)
    np.testing.assert_allclose(cold_map @ att.excited, att.ground, atol=1e-12)


def test_attractors_from_affine_branch_fixed_points():
    # second independent route: each attractor is the fixed point x = A x + b
    # of its double-stroke boundary branch, solved directly here
    for params in (qubit_params(), fig2a_params(), ladder_params()):
        c, h = params.cold_gibbs, params.hot_gibbs
        A = ((1.0 - c[0]) * h[-1]) / ((1.0 - c[-1]) * h[0])
        b_top = (c[0] - c[-1]) * h[-1] / ((1.0 - c[-1]) * h[0])
        b_ground = (c[0] - c[-1]) / (1.0 - c[-1])
        att = attractor_states(params)
        assert att.excited[-1] == pytest.approx(b_top / (1.0 - A), abs=1e-12)
        assert att.ground[0] == pytest.approx(b_ground / (1.0 - A), abs=1e-12)
        # off-component entries are proportional to the opposite bath
        np.testing.assert_allclose(att.excited[:-1] / att.excited[:-1].sum(),
                                   h[:-1] / h[:-1].sum(), atol=1e-12)
        np.testing.assert_allclose(att.ground[1:] / att.ground[1:].sum(),
                                   c[1:] / c[1:].sum(), atol=1e-12)


def test_attractors_at_infinite_hot_temperature_are_sharp():
    params = EngineParams(levels=(0.0, 1.0, 2.0), cold_beta=1.3, hot_beta=0.0)
    att = attractor_states(params)
    np.testing.assert_allclose(att.ground, [1.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(att.excited, [0.0, 0.0, 1.0], atol=1e-12)


def test_attractor_states_degenerate_raises():
    with pytest.raises(DegenerateEngineError):
        attractor_states(EngineParams(levels=(0.0, 1.0), cold_beta=0.7, hot_beta=0.7))


def test_qubit_worked_trajectory():
    # hand-iterated extreme ground weights: 0.8 -> 0.4667 -> 0.8833 -> ...
    params = qubit_params()
    p0 = params.cold_gibbs
    expected_min_max = {
        1: (0.8, 0.8),
        2: (1.0 - (2 / 3) * 0.8, 0.8),
        3: (1.0 - (2 / 3) * 0.8, 1.0 - 0.25 * (1.0 - (2 / 3) * 0.8)),
    }
    hist = simulate(params, max_strokes=3)
    for snap in hist:
        lo, hi = expected_min_max[snap.stroke]
        assert snap.vertices[:, 0].min() == pytest.approx(lo, abs=1e-12)
        assert snap.vertices[:, 0].max() == pytest.approx(hi, abs=1e-12)
    assert expected_min_max[3][1] == pytest.approx(0.8833333333333333, abs=1e-12)


def test_qubit_simulation_converges_to_attractors():
    params = qubit_params()
    hist = simulate(params, max_strokes=60)
    final = hist[-1]
    assert final.converged
    att = attractor_states(params)
    got = final.vertices[np.argsort(final.vertices[:, 0])]
    np.testing.assert_allclose(got[0], att.excited, atol=1e-7)
    np.testing.assert_allclose(got[-1], att.ground, atol=1e-7)


def test_qubit_contraction_ratio():
    # gap to the attractor shrinks by ((1-c)(1-h))/(c h) per full round
    params = qubit_params()
    lam = (0.2 * 0.4) / (0.8 * 0.6)
    assert lam == pytest.approx(1 / 6, abs=1e-15)
    hist = simulate(params, max_strokes=20, conv_tol=0.0)
    att = attractor_states(params)
    tops = [snap.vertices[:, 0].max() for snap in hist]
    gaps = [abs(t - att.ground[0]) for t in tops[2::2]]
    ratios = [b / a for a, b in zip(gaps, gaps[1:]) if a > 1e-13]
    for r in ratios:
        assert r == pytest.approx(lam, abs=1e-6)


def test_simulate_sets_grow_monotonically():
    for params in (qubit_params(), fig2a_params()):
        hist = simulate(params, max_strokes=12, conv_tol=0.0)
        for prev, cur in zip(hist, hist[1:]):
            for v in prev.vertices:
                assert in_hull(v, cur.vertices, tol=1e-8)


def test_simulate_hull_contains_both_gibbs_states_after_two_baths():
    params = fig2a_params()
    hist = simulate(params, max_strokes=10)
    for snap in hist[2:]:
        assert in_hull(params.cold_gibbs, snap.vertices, tol=1e-8)
        assert in_hull(params.hot_gibbs, snap.vertices, tol=1e-8)


def test_simulate_custom_start_and_first_bath():
    params = fig2a_params()
    start = np.array([0.2, 0.2, 0.6])
    hist = simulate(params, start=start, max_strokes=4, first_bath="cold")
    np.testing.assert_allclose(hist[0].vertices[0], start, atol=1e-12)
    assert hist[0].bath is None
    assert hist[1].bath == "cold"
    assert hist[2].bath == "hot"


def test_simulate_respects_top_bound_every_stroke():
    params = fig2a_params()
    hist = simulate(params, max_strokes=25)
    thr = top_bound_threshold(params)
    assert thr == pytest.approx(math.exp(-1 / 5), abs=1e-12)
    for snap in hist:
        assert respects_top_bound(snap.vertices, params)
        assert snap.vertices[:, -1].max() <= thr + 1e-10


def test_top_occupation_ceiling_for_sharp_top_start():
    params = fig2a_params()
    thr = top_bound_threshold(params)
    sharp_top = np.array([0.0, 0.0, 1.0])
    assert top_occupation_ceiling(sharp_top, params) == pytest.approx(1.0)
    assert top_occupation_ceiling(params.cold_gibbs, params) == pytest.approx(thr)


def test_inner_polytope_qubit_is_attractor_pair():
    params = qubit_params()
    att = attractor_states(params)
    P = inner_polytope(params)
    assert P.shape == (2, 2)
    np.testing.assert_allclose(P[0], att.ground, atol=1e-12)
    np.testing.assert_allclose(P[1], att.excited, atol=1e-12)


def test_inner_polytope_row_count_and_membership():
    for params in (fig2a_params(), ladder_params()):
        d = params.dim
        P = inner_polytope(params)
        assert P.shape == (2 ** (d - 1), d)
        hist = simulate(params, max_strokes=30)
        for row in P:
            assert in_hull(row, hist[-1].vertices, tol=1e-6)


def test_inner_polytope_infinite_hot_temperature_hits_corners():
    params = EngineParams(levels=(0.0, 1.0, 2.0), cold_beta=0.9, hot_beta=0.0)
    P = inner_polytope(params)
    assert P.shape == (4, 3)
    for row in P:
        assert min(total_variation(row, np.eye(3)[k]) for k in range(3)) < 1e-12


def test_extreme_occupation_step_fixed_points():
    params = ladder_params()
    att = attractor_states(params)
    np.testing.assert_allclose(
        extreme_occupation_step(att.excited, params, side="top"), att.excited,
        atol=1e-12)
    np.testing.assert_allclose(
        extreme_occupation_step(att.ground, params, side="ground"), att.ground,
        atol=1e-12)


def test_extreme_occupation_step_moves_toward_fixed_point():
    params = ladder_params()
    att = attractor_states(params)
    h = params.hot_gibbs
    x = h.copy()  # hot Gibbs: bottom of the top-side domain
    for _ in range(40):
        nxt = extreme_occupation_step(x, params, side="top")
        assert nxt[-1] >= x[-1] - 1e-15
        x = nxt
    assert x[-1] == pytest.approx(att.excited[-1], abs=1e-10)


def test_extreme_occupation_step_rejects_out_of_range():
    params = ladder_params()
    too_high = np.array([0.0, 0.0, 0.0, 1.0])
    with pytest.raises(PreconditionError):
        extreme_occupation_step(too_high, params, side="top")
    with pytest.raises(PreconditionError):
        extreme_occupation_step(params.hot_gibbs, params, side="ground")


def test_ground_state_criterion_cases():
    assert ground_state_criterion(ladder_params()) is True
    assert ground_state_criterion(fig2a_params()) is False  # cold top weight < 1/2
    beta_zero = EngineParams(levels=(0.0, 1.0, 2.0), cold_beta=2.0, hot_beta=0.0)
    assert ground_state_criterion(beta_zero) is True


def test_ground_state_round_is_two_stroke_reachable():
    # the round output must lie in the simulated hot-then-cold reachable hull
    params = ladder_params()
    p = params.cold_gibbs
    for _ in range(3):
        r = ground_state_round(p, params)
        hist = simulate(params, start=p, max_strokes=3, first_bath="hot")
        assert hist[-1].bath == "cold"
        assert in_hull(r, hist[-1].vertices, tol=1e-8)
        p = r


def test_ground_state_round_contraction():
    params = ladder_params()
    c = params.cold_gibbs
    rate = (c[-1] + c[-2]) / c[0]
    p = params.cold_gibbs
    gaps = []
    for _ in range(6):
        p = ground_state_round(p, params)
        gaps.append(1.0 - p[0])
    ratios = [b / a for a, b in zip(gaps, gaps[1:])]
    for r in ratios:
        assert r <= rate + 1e-9


def test_ground_state_round_qubit_equals_stroke_composition():
    params = qubit_params()
    cold_map = qubit_extremal_matrix(params.cold_gibbs)
    hot_map = qubit_extremal_matrix(params.hot_gibbs)
    p = params.cold_gibbs
    expected = cold_map @ (hot_map @ p)
    np.testing.assert_allclose(ground_state_round(p, params), expected, atol=1e-12)


def test_ground_state_round_requires_ladder_ordering():
    params = ladder_params()
    inverted = np.array([0.1, 0.1, 0.2, 0.6])
    with pytest.raises(PreconditionError):
        ground_state_round(inverted, params)


def test_qubit_interval_matches_simulation():
    params = qubit_params()
    hist = simulate(params, max_strokes=8, conv_tol=0.0)
    for snap in hist:
        iv = qubit_reachable_interval(params.cold_gibbs, params,
                                      n_strokes=snap.stroke - 1)
        assert snap.vertices[:, 0].min() == pytest.approx(iv.bounds[0], abs=1e-12)
        assert snap.vertices[:, 0].max() == pytest.approx(iv.bounds[1], abs=1e-12)


def test_qubit_interval_asymptotic_kinds():
    params = qubit_params()
    inside = qubit_reachable_interval([0.5, 0.5], params)
    assert inside.kind == "full_segment"
    np.testing.assert_allclose(inside.bounds, (0.4, 0.9), atol=1e-12)

    sharp = qubit_reachable_interval([0.99, 0.01], params)
    assert sharp.kind == "one_sided"
    lo, hi = sharp.bounds
    assert hi == pytest.approx(0.99, abs=1e-12)
    assert lo == pytest.approx(1.0 - (2 / 3) * 0.99, abs=1e-12)
    assert lo < 0.4  # the single stroke overshoots the far attractor


def test_infinite_temperature_reaches_all_corners():
    # hot bath at infinite temperature: every corner of the simplex
    for levels, alpha in (((0.0, 1.0), 1.0), ((0.0, 1.0, 2.0), 0.7)):
        params = EngineParams(levels=levels, cold_beta=alpha, hot_beta=0.0)
        hist = simulate(params, max_strokes=50)
        d = params.dim
        for k in range(d):
            corner = np.eye(d)[k]
            assert min(total_variation(corner, v) for v in hist[-1].vertices) < 1e-6


def test_simulate_is_deterministic():
    params = fig2a_params()
    a = simulate(params, max_strokes=12)
    b = simulate(params, max_strokes=12)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert np.array_equal(x.vertices, y.vertices)
