import itertools
from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hystfront.errors import DegenerateData, DomainError, InfeasibleState
from hystfront.play import HysteresisStrip, PiecewiseConstantSignal, PlayState, play_pc
from hystfront.riemann import (HALF, SPEEDS, HystFront, HystWaveFan, PiecewiseLinearFlux, RiemannData,
                               concave_majorant, convex_minorant, effective_flux, fan_to_profiles,
                               solve_riemann_hyst, solve_riemann_plf)
from hystfront.verification import classify_front, rh_speed

quarters = st.integers(-16, 16).map(lambda k: F(k, 4))


# --- oracles ---------------------------------------------------------------------------

def brute_lower_hull(points):
    """Keep a point iff it lies strictly below every chord spanning it."""
    kept = []
    for i, (u, f) in enumerate(points):
        ok = True
        for j, k in itertools.combinations(range(len(points)), 2):
            (u0, f0), (u1, f1) = points[j], points[k]
            if u0 < u < u1 and f >= f0 + (f1 - f0) * (u - u0) / (u1 - u0):
                ok = False
                break
        if ok:
            kept.append((u, f))
    return kept


def enumerate_entropy_fans(flux, u_l, u_r):
    """All monotone vertex chains from u_l to u_r with increasing chord speeds and
    every chord on the admissible side of the graph."""
    lo, hi = min(u_l, u_r), max(u_l, u_r)
    inner = [u for u, _ in flux.vertices if lo < u < hi]
    below = u_l < u_r
    fans = []
    for r in range(len(inner) + 1):
        for subset in itertools.combinations(inner, r):
            chain = [u_l] + (list(subset) if below else list(reversed(subset))) + [u_r]
            speeds = [(flux(b) - flux(a)) / (b - a) for a, b in zip(chain, chain[1:])]
            if any(s2 <= s1 for s1, s2 in zip(speeds, speeds[1:])):
                continue
            ok = True
            for (a, b), s in zip(zip(chain, chain[1:]), speeds):
                for v in inner:
                    if min(a, b) < v < max(a, b):
                        chord = flux(a) + s * (v - a)
                        if (below and flux(v) < chord) or (not below and flux(v) > chord):
                            ok = False
            if ok:
                fans.append((tuple(speeds), tuple(chain)))
    return fans


@st.composite
def fluxes(draw, n=6):
    steps = draw(st.lists(st.integers(1, 4), min_size=n - 1, max_size=n - 1))
    fs = draw(st.lists(st.integers(-12, 12), min_size=n, max_size=n))
    us = [F(0)]
    for s in steps:
        us.append(us[-1] + s)
    return PiecewiseLinearFlux(tuple(zip(us, map(F, fs))))


@st.composite
def feasible_states(draw, a=F(1)):
    u = draw(quarters)
    off = draw(st.integers(-4, 4).map(lambda k: F(k, 4) * a))
    return PlayState(u, u + off)


# --- hulls -----------------------------------------------------------------------------------

CONVEX_FLUX = PiecewiseLinearFlux(((F(1, 2), 4), (F(3, 2), 2), (F(5, 2), 1), (F(7, 2), F(3, 2)), (F(9, 2), 3)))


def test_convex_chain_is_its_own_minorant():
    assert convex_minorant(CONVEX_FLUX, F(1, 2), F(9, 2)) == CONVEX_FLUX


def test_minorant_skips_concave_kink():
    kinked = PiecewiseLinearFlux(CONVEX_FLUX.vertices[:3] + ((F(3), 2),) + CONVEX_FLUX.vertices[3:])
    assert convex_minorant(kinked, F(1, 2), F(9, 2)) == CONVEX_FLUX


def test_convex_flux_fan_has_four_waves():
    fan = solve_riemann_plf(CONVEX_FLUX, F(1, 2), F(9, 2))
    assert fan.values == (F(1, 2), F(3, 2), F(5, 2), F(7, 2), F(9, 2))
    assert fan.speeds == (-2, -1, F(1, 2), F(3, 2))


def test_affine_flux():
    flux = PiecewiseLinearFlux(((0, 0), (1, 2), (3, 6)))
    assert concave_majorant(flux, 0, 3).vertices == ((0, 0), (3, 6))
    assert solve_riemann_plf(flux, 3, 0).speeds == (2,)


def test_hull_errors():
    with pytest.raises(DomainError):
        convex_minorant(CONVEX_FLUX, 0, 1)
    with pytest.raises(DomainError):
        convex_minorant(CONVEX_FLUX, 2, 2)
    with pytest.raises(DegenerateData):
        solve_riemann_plf(CONVEX_FLUX, 1, 1)
    with pytest.raises(ValueError):
        PiecewiseLinearFlux(((0, 0), (0, 1)))


@given(fluxes())
def test_minorant_matches_brute_force(flux):
    lo, hi = flux.domain
    assert list(convex_minorant(flux, lo, hi).vertices) == brute_lower_hull(list(flux.vertices))


@given(fluxes())
def test_majorant_matches_negated_brute_force(flux):
    lo, hi = flux.domain
    upper = brute_lower_hull([(u, -f) for u, f in flux.vertices])
    assert list(concave_majorant(flux, lo, hi).vertices) == [(u, -f) for u, f in upper]
    assert concave_majorant(flux, lo, hi) == convex_minorant(flux.negated(), lo, hi).negated()


@given(fluxes(), st.data())
def test_hull_is_idempotent_and_below(flux, data):
    lo, hi = flux.domain
    a = data.draw(st.integers(int(lo), int(hi) - 1))
    b = data.draw(st.integers(a + 1, int(hi)))
    hull = convex_minorant(flux, a, b)
    assert convex_minorant(hull, a, b) == hull
    for u, _ in flux.vertices:
        if a <= u <= b:
            assert hull(u) <= flux(u)
    assert hull(a) == flux(a) and hull(b) == flux(b)


@given(fluxes(n=4), st.data())
def test_plf_fan_equals_exhaustive_enumeration(flux, data):
    lo, hi = flux.domain
    u_l = data.draw(st.integers(int(lo), int(hi)))
    u_r = data.draw(st.integers(int(lo), int(hi)))
    assume(u_l != u_r)
    fan = solve_riemann_plf(flux, u_l, u_r)
    admissible = enumerate_entropy_fans(flux, F(u_l), F(u_r))
    assert admissible == [(fan.speeds, fan.values)]


# --- effective flux -----------------------------------------------------------------------------

def test_effective_flux_interior_start_switches_to_half():
    g = effective_flux(RiemannData.of(1, 0, 0, 2, F(3, 2)))
    assert g.slopes() == [HALF, 1]
    assert g.vertices[1][0] == F(1, 2)  # w_r - a


def test_effective_flux_upper_boundary_is_half():
    assert effective_flux(RiemannData.of(1, 0, 1, 1, 2)).slopes() == [HALF]


def test_effective_flux_no_boundary_hit_is_one():
    assert effective_flux(RiemannData.of(1, 0, F(1, 2), 1, F(1, 2))).slopes() == [1]


def test_effective_flux_degenerate():
    with pytest.raises(DegenerateData):
        effective_flux(RiemannData.of(1, 0, 0, 0, 1))


# --- hysteresis Riemann fans -----------------------------------------------------------------

def S(u, w):
    return PlayState(F(u), F(w))


def fronts_of(a, left, right):
    fan = solve_riemann_hyst(RiemannData(HysteresisStrip(a), left, right))
    return [(f.speed, f.left, f.right) for f in fan.fronts]


def test_case_a2_three_fronts():
    # u: u_l | w_r - a | u_r at speeds 1/2 and 1; w: w_l | u_l + a | w_r with a standing jump
    assert fronts_of(1, S(0, 0), S(2, F(3, 2))) == [
        (0, S(0, 0), S(0, 1)),
        (HALF, S(0, 1), S(F(1, 2), F(3, 2))),
        (1, S(F(1, 2), F(3, 2)), S(2, F(3, 2))),
    ]


def test_case_a1_rigid_translation():
    assert fronts_of(1, S(0, F(1, 2)), S(1, F(1, 2))) == [(1, S(0, F(1, 2)), S(1, F(1, 2)))]


def test_case_b1_single_joint_front():
    assert fronts_of(1, S(0, 1), S(1, 2)) == [(HALF, S(0, 1), S(1, 2))]


def test_case_b2i_translation_and_standing_w():
    assert fronts_of(1, S(0, F(1, 2)), S(2, 1)) == [(0, S(0, F(1, 2)), S(0, 1)), (1, S(0, 1), S(2, 1))]


def test_case_b2ii_uses_u_r_on_the_right():
    # the displayed solution writes u_l for x/t > 1; the construction gives u_r
    assert fronts_of(1, S(0, 0), S(3, 2)) == [
        (0, S(0, 0), S(0, 1)),
        (HALF, S(0, 1), S(1, 2)),
        (1, S(1, 2), S(3, 2)),
    ]


def test_mirrored_case_uses_concave_majorant():
    assert fronts_of(1, S(2, F(3, 2)), S(0, 0)) == [
        (0, S(2, F(3, 2)), S(2, 1)),
        (HALF, S(2, 1), S(1, 0)),
        (1, S(1, 0), S(0, 0)),
    ]


def test_equal_u_gives_standing_front_or_nothing():
    assert fronts_of(1, S(0, 0), S(0, 1)) == [(0, S(0, 0), S(0, 1))]
    assert fronts_of(1, S(0, 0), S(0, 0)) == []


def test_infeasible_riemann_data():
    with pytest.raises(InfeasibleState):
        RiemannData.of(1, 0, 2, 0, 0)


def test_fan_profiles_at_t2():
    fan = solve_riemann_hyst(RiemannData.of(1, 0, 0, 2, F(3, 2)))
    u, w = fan_to_profiles(fan, 2)
    assert u.breakpoints == (1, 2) and w.breakpoints == (0, 1)
    assert sorted(set(u.breakpoints) | set(w.breakpoints)) == [0, 1, 2]
    with pytest.raises(ValueError):
        fan_to_profiles(fan, 0)


def test_fan_validation():
    with pytest.raises(ValueError):
        HystWaveFan(S(0, 0), S(1, 0), (HystFront(F(1), S(0, 0), S(2, 0)),))


@st.composite
def riemann_data(draw):
    a = draw(st.sampled_from([F(1, 2), F(1), F(2)]))
    return RiemannData(HysteresisStrip(a), draw(feasible_states(a)), draw(feasible_states(a)))


@given(riemann_data())
def test_fan_structure_and_invariants(data):
    fan = solve_riemann_hyst(data)
    assert len(fan.fronts) <= 3
    speeds = [f.speed for f in fan.fronts]
    assert all(s in SPEEDS for s in speeds) and speeds == sorted(set(speeds))
    for f in fan.fronts:
        assert f.invariant_violations(data.strip) == []
        assert rh_speed(f.left, f.right) == f.speed
        assert classify_front(f, data.strip).admissible


@given(riemann_data())
def test_fan_total_variation_equals_data_jumps(data):
    fan = solve_riemann_hyst(data)
    u, w = fan_to_profiles(fan, 1)
    assert u.total_variation() == abs(data.left.u - data.right.u)
    assert w.total_variation() == abs(data.left.w - data.right.w)


@given(riemann_data())
def test_fan_is_odd_symmetric(data):
    neg = lambda s: PlayState(-s.u, -s.w)
    flipped = solve_riemann_hyst(RiemannData(data.strip, neg(data.left), neg(data.right)))
    fan = solve_riemann_hyst(data)
    assert [(f.speed, neg(f.left), neg(f.right)) for f in fan.fronts] == \
           [(f.speed, f.left, f.right) for f in flipped.fronts]


@given(riemann_data(), st.integers(1, 12).map(lambda k: F(k, 4)))
def test_fan_time_sections_follow_play(data, x):
    """At fixed x > 0 the states pass right to left as time grows; replaying the
    input from w_r reproduces the output."""
    fan = solve_riemann_hyst(data)
    moving = [f for f in fan.fronts if f.speed > 0]
    if not moving:
        return
    crossings = sorted({x / f.speed for f in moving})
    times = [F(0)] + crossings + [crossings[-1] + 1]
    us, ws = [], []
    for a, b in zip(times, times[1:]):
        u, w = fan_to_profiles(fan, (a + b) / 2)
        us.append(u.value_at(x))
        ws.append(w.value_at(x))
    u_sig = PiecewiseConstantSignal(tuple(times), tuple(us))
    w_sig = PiecewiseConstantSignal(tuple(times), tuple(ws))
    assert play_pc(data.strip, u_sig, data.right.w).same_as(w_sig)
