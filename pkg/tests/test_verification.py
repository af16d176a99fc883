import random
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import STRIP, random_data
from hystfront.errors import DegenerateJump, NonAdmissiblePair, UnboundedSupport
from hystfront.play import HysteresisStrip, PlayState
from hystfront.profile import PiecewiseConstantProfile as P
from hystfront.riemann import HystFront, RiemannData, solve_riemann_hyst
from hystfront.tracking import run
from hystfront.verification import (EntropyTestPoint, FrontClass, TestBump, classify_front, contraction_check,
                                    entropy_grid_check, entropy_pointwise, hysteresis_energy_check, rh_speed,
                                    spacetime_l1_distance, spacetime_l1_distance_exact, time_modulus_check,
                                    verify_trajectory, w_fubini_mass, w_sweep_mass, weak_residual_geometric,
                                    weak_residual_quadrature)

HALF = F(1, 2)


def S(u, w):
    return PlayState(F(u), F(w))


def front(speed, left, right):
    return HystFront(F(speed), left, right)


def dense_entropy_minimum(fr, strip, n=24):
    """Brute-force scan of (k, k_hat) on a fine grid covering the data range."""
    coords = [fr.left.u, fr.right.u, fr.left.w, fr.right.w]
    lo, hi = min(coords) - 2 * strip.a - 1, max(coords) + 2 * strip.a + 1
    best = None
    for i in range(n * 4 + 1):
        k = lo + (hi - lo) * F(i, n * 4)
        for j in range(-n, n + 1):
            kh = k + strip.a * F(j, n)
            val = entropy_pointwise(fr, EntropyTestPoint(k, kh))
            best = val if best is None else min(best, val)
    return best


# --- jump conditions ---------------------------------------------------------------------

def test_rh_speed_examples():
    assert rh_speed(S(0, 0), S(0, 1)) == 0
    assert rh_speed(S(0, 1), S(1, 2)) == HALF
    assert rh_speed(S(0, F(1, 2)), S(1, F(1, 2))) == 1


def test_rh_speed_errors():
    with pytest.raises(DegenerateJump):
        rh_speed(S(1, 1), S(1, 1))
    with pytest.raises(NonAdmissiblePair):
        rh_speed(S(0, 1), S(1, 0))


def test_classification_of_each_front_type():
    assert classify_front(front(0, S(0, 0), S(0, 1)), STRIP) is FrontClass.W_STANDING
    assert classify_front(front(1, S(0, 0), S(1, 0)), STRIP) is FrontClass.U_INTERIOR
    assert classify_front(front(HALF, S(0, 1), S(1, 2)), STRIP) is FrontClass.JOINT_UPPER
    assert classify_front(front(HALF, S(2, 1), S(0, -1)), STRIP) is FrontClass.JOINT_LOWER
    # joint jump off the boundary
    assert classify_front(front(HALF, S(0, 0), S(1, 1)), STRIP) is FrontClass.NOT_ENTROPY
    # opposite-sign jump whose generalized speed is negative
    assert classify_front(front(-1, S(0, 1), S(1, -1)), STRIP) is FrontClass.NOT_ENTROPY


def test_grid_check_witness_is_negative():
    bad = front(HALF, S(0, 0), S(1, 1))
    report = entropy_grid_check(bad, STRIP)
    assert not report.holds
    assert report.value < 0 and entropy_pointwise(bad, report.witness) == report.value


@st.composite
def riemann_fronts(draw):
    a = draw(st.sampled_from([HALF, F(1), F(2)]))
    strip = HysteresisStrip(a)
    q4 = st.integers(-12, 12).map(lambda k: F(k, 4))
    off = st.integers(-4, 4).map(lambda k: a * F(k, 4))
    ul, ur = draw(q4), draw(q4)
    left, right = PlayState(ul, ul + draw(off)), PlayState(ur, ur + draw(off))
    fan = solve_riemann_hyst(RiemannData(strip, left, right))
    return strip, fan


@settings(max_examples=60, deadline=None)
@given(riemann_fronts())
def test_fan_fronts_pass_grid_and_dense_scan(case):
    strip, fan = case
    for fr in fan.fronts:
        assert entropy_grid_check(fr, strip).holds
        assert dense_entropy_minimum(fr, strip, n=8) >= 0


@settings(max_examples=60, deadline=None)
@given(st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8),
       st.sampled_from([F(0), HALF, F(1)]))
def test_grid_agrees_with_dense_scan(ul, wl, ur, wr, speed):
    """The finite grid finds a violation whenever a fine scan does."""
    left, right = S(F(ul, 4), F(wl, 4)), S(F(ur, 4), F(wr, 4))
    if left == right or not (STRIP.contains(*left) and STRIP.contains(*right)):
        return
    fr = front(speed, left, right)
    dense = dense_entropy_minimum(fr, STRIP, n=8)
    grid = entropy_grid_check(fr, STRIP)
    if dense < 0:
        assert not grid.holds
    if not grid.holds:
        assert entropy_pointwise(fr, grid.witness) < 0


# --- weak form -----------------------------------------------------------------------------

def a2_trajectory(T=4):
    return run(P((0,), (0, 2)), P((0,), (0, F(3, 2))), STRIP, T)


def test_geometric_residual_is_exactly_zero():
    report = weak_residual_geometric(a2_trajectory(), TestBump(1.0, 2.0, 1.5, 1.0))
    assert report.value == 0 and isinstance(report.value, F)
    assert all(b == 0 for b in report.brackets.values())


def test_geometric_residual_flags_corrupted_front():
    traj = a2_trajectory()
    rec = next(r for r in traj.history.values() if r.front.speed == 1)
    rec.front = replace(rec.front, speed=HALF)
    report = weak_residual_geometric(traj, TestBump(1.0, 2.0, 1.5, 1.0))
    assert report.value != 0 and rec.front.id in report.offenders


def test_quadrature_residual_shrinks_under_refinement():
    traj = a2_trajectory()
    bump = TestBump(0.7, 1.3, 0.6, 0.5)
    r = [abs(weak_residual_quadrature(traj, bump, n)) for n in (32, 64, 128)]
    assert r[0] > 1.5 * r[1] > 2.25 * r[2]
    with pytest.raises(ValueError):
        weak_residual_quadrature(traj, bump, 4)


def test_bump_support():
    bump = TestBump(0.0, 1.0, 1.0, 0.5)
    assert bump.phi(0.0, 1.0) > 0 and bump.phi(1.0, 1.0) == 0 and bump.phi(0.0, 1.6) == 0
    assert bump.fits(a2_trajectory()) and not TestBump(0.0, 0.2, 1.0, 0.5).fits(a2_trajectory())


# --- energy ---------------------------------------------------------------------------------------

def test_energy_balance_hand_computed():
    # a = 1/2, u0 = 1 and w0 = 1/2 on [0, 1): at t = 1 the speed-1/2 front has
    # swept a w-jump of 1/2 over length 1/2, so the mass is 1/4 and lhs = -1/8
    strip = HysteresisStrip(HALF)
    traj = run(P((0, 1), (0, 1, 0)), P((0, 1), (0, HALF, 0)), strip, 3)
    report = hysteresis_energy_check(traj, 1)
    assert report.mass == F(1, 4) and report.mass_fubini == F(1, 4)
    assert report.lhs == F(-1, 8) == report.rhs
    assert report


def test_energy_masses_agree_on_random_data():
    rng = random.Random(4)
    for _ in range(5):
        traj = run(*random_data(rng, pieces=6), STRIP, 20)
        for t in (F(3, 2), F(7), F(20)):
            assert w_sweep_mass(traj, t) == w_fubini_mass(traj, t)
            assert hysteresis_energy_check(traj, t, cross_validate=False).holds


def test_energy_requires_compact_support():
    traj = a2_trajectory()
    with pytest.raises(UnboundedSupport):
        hysteresis_energy_check(traj, 1)


# --- stability -------------------------------------------------------------------------------------

def test_contraction_on_random_pairs():
    rng = random.Random(9)
    for _ in range(5):
        t1 = run(*random_data(rng, pieces=6), STRIP, 20)
        t2 = run(*random_data(rng, pieces=6), STRIP, 20)
        report = contraction_check(t1, t2, [F(k, 2) for k in range(1, 41, 4)])
        assert report.holds and all(d <= report.initial for d in report.distances)


def test_time_modulus_equality_for_single_fronts():
    window = (F(-10), F(10))
    u_front = run(P((0,), (0, 1)), P.constant(0), STRIP, 4)
    rows = time_modulus_check(u_front, [(F(1), F(3))], window).rows
    (_, _, du, bu, dw, bw), = rows
    assert du == bu == 2 and dw == bw == 0
    joint = run(P((0,), (0, 1)), P((0,), (1, 2)), STRIP, 4)
    (_, _, du, bu, dw, bw), = time_modulus_check(joint, [(F(1), F(3))], window).rows
    assert dw == bw == 1 and du == 1 < bu


def test_spacetime_distance_float_matches_exact():
    rng = random.Random(6)
    for _ in range(4):
        t1 = run(*random_data(rng, pieces=5), STRIP, 8)
        t2 = run(*random_data(rng, pieces=5), STRIP, 8)
        assert spacetime_l1_distance(t1, t2) == pytest.approx(float(spacetime_l1_distance_exact(t1, t2)),
                                                              rel=1e-9)


def test_spacetime_distance_needs_equal_far_states():
    with pytest.raises(UnboundedSupport):
        spacetime_l1_distance(a2_trajectory(), a2_trajectory())


def test_verify_trajectory_reports_ok():
    rng = random.Random(2)
    traj = run(*random_data(rng), STRIP, 30)
    report = verify_trajectory(traj, times=[F(10), F(30)], bumps=[TestBump(3.0, 5.0, 2.0, 2.0)],
                               pairs=[(F(0), F(10))])
    assert report["ok"] and report["entropy"]["ok"] and report["compact_support"]
