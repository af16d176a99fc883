"""Riemann solvers: piecewise-linear flux via convex envelopes, and the
hysteresis problem via the effective flux traced along the play path."""
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateData, DomainError, InfeasibleState
from .play import HysteresisStrip, PlayState, play_jump
from .profile import PiecewiseConstantProfile
from .rational import q

HALF = Fraction(1, 2)
SPEEDS = (Fraction(0), HALF, Fraction(1))


@dataclass(frozen=True)
class PiecewiseLinearFlux:
    vertices: tuple

    def __post_init__(self):
        verts = tuple((q(u), q(f)) for u, f in self.vertices)
        if len(verts) < 2:
            raise ValueError("a flux needs at least two vertices")
        if any(b[0] <= a[0] for a, b in zip(verts, verts[1:])):
            raise ValueError("vertex u-coordinates must be strictly increasing")
        object.__setattr__(self, "vertices", verts)

    @property
    def domain(self):
        return self.vertices[0][0], self.vertices[-1][0]

    def __call__(self, u) -> Fraction:
        u = q(u)
        lo, hi = self.domain
        if u < lo or u > hi:
            raise DomainError(f"u={u} outside flux domain [{lo}, {hi}]")
        for (u0, f0), (u1, f1) in zip(self.vertices, self.vertices[1:]):
            if u <= u1:
                return f0 + (f1 - f0) * (u - u0) / (u1 - u0)
        return self.vertices[-1][1]

    def slopes(self):
        return [(f1 - f0) / (u1 - u0) for (u0, f0), (u1, f1) in zip(self.vertices, self.vertices[1:])]

    def negated(self) -> "PiecewiseLinearFlux":
        return PiecewiseLinearFlux(tuple((u, -f) for u, f in self.vertices))


def _restricted_points(flux, u_lo, u_hi):
    u_lo, u_hi = q(u_lo), q(u_hi)
    lo, hi = flux.domain
    if u_lo < lo or u_hi > hi:
        raise DomainError(f"[{u_lo}, {u_hi}] exceeds flux domain [{lo}, {hi}]")
    if u_lo >= u_hi:
        raise DomainError(f"empty interval [{u_lo}, {u_hi}]")
    pts = [(u_lo, flux(u_lo))]
    pts += [(u, f) for u, f in flux.vertices if u_lo < u < u_hi]
    pts.append((u_hi, flux(u_hi)))
    return pts


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_minorant(flux: PiecewiseLinearFlux, u_lo, u_hi) -> PiecewiseLinearFlux:
    """Greatest convex function below ``flux`` on ``[u_lo, u_hi]`` (lower hull).
    Collinear vertices are dropped, so every kept vertex is a strict kink."""
    hull = []
    for p in _restricted_points(flux, u_lo, u_hi):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return PiecewiseLinearFlux(tuple(hull))


def concave_majorant(flux: PiecewiseLinearFlux, u_lo, u_hi) -> PiecewiseLinearFlux:
    hull = []
    for p in _restricted_points(flux, u_lo, u_hi):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return PiecewiseLinearFlux(tuple(hull))


@dataclass(frozen=True)
class WaveFan:
    left_value: Fraction
    waves: tuple  # ((speed, right_value), ...)

    @property
    def values(self):
        return (self.left_value,) + tuple(v for _, v in self.waves)

    @property
    def speeds(self):
        return tuple(s for s, _ in self.waves)


def solve_riemann_plf(flux: PiecewiseLinearFlux, u_l, u_r) -> WaveFan:
    """Entropy fan of ``u_t + f(u)_x = 0`` for piecewise-linear ``f``: the
    vertices of the convex minorant (``u_l < u_r``) or concave majorant
    (``u_l > u_r``) separated by shocks at the chord slopes."""
    u_l, u_r = q(u_l), q(u_r)
    if u_l == u_r:
        raise DegenerateData("Riemann data with u_l == u_r")
    if u_l < u_r:
        hull = convex_minorant(flux, u_l, u_r).vertices
    else:
        hull = concave_majorant(flux, u_r, u_l).vertices[::-1]
    waves = []
    for (ua, fa), (ub, fb) in zip(hull, hull[1:]):
        waves.append(((fb - fa) / (ub - ua), ub))
    return WaveFan(u_l, tuple(waves))


@dataclass(frozen=True)
class RiemannData:
    strip: HysteresisStrip
    left: PlayState
    right: PlayState

    def __post_init__(self):
        for side in (self.left, self.right):
            if not self.strip.contains(side.u, side.w):
                raise InfeasibleState(f"state ({side.u}, {side.w}) outside the strip a={self.strip.a}")

    @classmethod
    def of(cls, a, u_l, w_l, u_r, w_r) -> "RiemannData":
        return cls(HysteresisStrip(q(a)), PlayState(u_l, w_l), PlayState(u_r, w_r))


@dataclass(frozen=True)
class HystFront:
    speed: Fraction
    left: PlayState
    right: PlayState

    def invariant_violations(self, strip: HysteresisStrip):
        (ul, wl), (ur, wr) = self.left, self.right
        out = []
        if self.speed not in SPEEDS:
            out.append(f"speed {self.speed} not in {{0, 1/2, 1}}")
        if self.speed == 0 and not (ul == ur and wl != wr):
            out.append("speed-0 front must be a pure w-jump")
        if self.speed == 1 and not (wl == wr and ul != ur):
            out.append("speed-1 front must be a pure u-jump")
        if self.speed == HALF:
            upper = strip.on_upper(ul, wl) and strip.on_upper(ur, wr)
            lower = strip.on_lower(ul, wl) and strip.on_lower(ur, wr)
            if not (upper or lower) or ul == ur:
                out.append("speed-1/2 front must jump along a single boundary")
        if (ul - ur) != self.speed * (ul - ur + wl - wr):
            out.append("generalized Rankine-Hugoniot fails")
        return out


@dataclass(frozen=True)
class HystWaveFan:
    left: PlayState
    right: PlayState
    fronts: tuple

    def __post_init__(self):
        states = [self.left]
        for f in self.fronts:
            if f.left != states[-1]:
                raise ValueError("fan fronts are not adjacent")
            states.append(f.right)
        if states[-1] != self.right:
            raise ValueError("fan does not end at its right state")
        speeds = [f.speed for f in self.fronts]
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise ValueError("fan speeds must be strictly increasing")

    @property
    def states(self):
        return (self.left,) + tuple(f.right for f in self.fronts)


def effective_flux(data: RiemannData) -> PiecewiseLinearFlux:
    """Flux whose derivative is the propagation speed along the play path that
    starts at the right state and moves ``u`` toward ``u_l``: speed 1 while the
    pair is interior, 1/2 once it rides a boundary.  Normalized by
    ``g(min) = min / 2``."""
    a = data.strip.a
    u_l, u_r, w_r = data.left.u, data.right.u, data.right.w
    if u_l == u_r:
        raise DegenerateData("effective flux needs u_l != u_r")
    lo, hi = min(u_l, u_r), max(u_l, u_r)
    if u_l < u_r:
        # u decreases from u_r; upper boundary reached at u = w_r - a
        switch = w_r - a
        pieces = [(lo, switch, HALF), (switch, hi, Fraction(1))]
    else:
        # u increases from u_r; lower boundary reached at u = w_r + a
        switch = w_r + a
        pieces = [(lo, switch, Fraction(1)), (switch, hi, HALF)]
    verts = [(lo, lo / 2)]
    for start, end, slope in pieces:
        start, end = max(start, lo), min(end, hi)
        if end <= start:
            continue
        u0, f0 = verts[-1]
        verts.append((end, f0 + slope * (end - u0)))
    return PiecewiseLinearFlux(tuple(verts))


def solve_riemann_hyst(data: RiemannData) -> HystWaveFan:
    """Self-similar solution of ``u_t + w_t + u_x = 0`` with ``w`` the play output.

    One path covers every configuration: build the effective flux, take its
    entropy fan, recover ``w`` on each constant state by replaying the input
    seen at a fixed ``x > 0`` (the fan values right to left), and close the gap
    to ``w_l`` with a standing front at the origin.
    """
    strip, left, right = data.strip, data.left, data.right
    if left.u == right.u:
        if left.w == right.w:
            return HystWaveFan(left, right, ())
        return HystWaveFan(left, right, (HystFront(Fraction(0), left, right),))
    fan = solve_riemann_plf(effective_flux(data), left.u, right.u)
    values = fan.values
    ws = [right.w]
    for u in reversed(values[:-1]):
        ws.append(play_jump(strip, ws[-1], u))
    ws.reverse()
    states = [PlayState(u, w) for u, w in zip(values, ws)]
    fronts = [HystFront(s, states[i], states[i + 1]) for i, s in enumerate(fan.speeds)]
    if states[0].w != left.w:
        fronts.insert(0, HystFront(Fraction(0), left, states[0]))
    return HystWaveFan(left, right, tuple(fronts))


def fan_to_profiles(fan: HystWaveFan, t, window=None):
    """Sample the self-similar solution at time ``t > 0`` as ``(u, w)`` profiles,
    optionally restricted to ``window = (x_min, x_max)``."""
    t = q(t)
    if t <= 0:
        raise ValueError("t must be positive")
    jumps = [(f.speed * t, f.right) for f in fan.fronts]
    u = PiecewiseConstantProfile.from_jumps(fan.left.u, [(x, s.u) for x, s in jumps])
    w = PiecewiseConstantProfile.from_jumps(fan.left.w, [(x, s.w) for x, s in jumps])
    if window is not None:
        u, w = u.restrict(*window), w.restrict(*window)
    return u, w
