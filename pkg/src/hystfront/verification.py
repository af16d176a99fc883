"""Independent checks of weak, entropy and stability properties of tracked solutions."""
import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DegenerateJump, NonAdmissiblePair, UnboundedSupport
from .play import HysteresisStrip, PiecewiseConstantSignal, PlayState, play_pc, verify_play_variational
from .profile import l1_distance
from .rational import q
from .riemann import HALF, HystFront
from .tracking import Trajectory, sample


class FrontClass(enum.Enum):
    W_STANDING = "w-standing"      # u continuous, w jumps, speed 0
    U_INTERIOR = "u-interior"      # w continuous, u jumps, speed 1
    JOINT_UPPER = "joint-upper"    # both jump along w = u + a, speed 1/2
    JOINT_LOWER = "joint-lower"    # both jump along w = u - a, speed 1/2
    NOT_ENTROPY = "not-entropy"

    @property
    def admissible(self) -> bool:
        return self is not FrontClass.NOT_ENTROPY


@dataclass(frozen=True)
class EntropyTestPoint:
    k: Fraction
    k_hat: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k", q(self.k))
        object.__setattr__(self, "k_hat", q(self.k_hat))


def rh_speed(left: PlayState, right: PlayState) -> Fraction:
    du = left.u - right.u
    denom = du + left.w - right.w
    if left == right:
        raise DegenerateJump("no jump between identical states")
    if denom == 0:
        raise NonAdmissiblePair(f"u- and w-jumps cancel: {left} | {right}")
    return du / denom


def classify_front(front, strip: HysteresisStrip) -> FrontClass:
    """Entropy classification of a single discontinuity; ``front`` needs
    ``speed``, ``left`` and ``right``."""
    (ul, wl), (ur, wr) = front.left, front.right
    if front.left == front.right:
        return FrontClass.NOT_ENTROPY
    if not (strip.contains(ul, wl) and strip.contains(ur, wr)):
        return FrontClass.NOT_ENTROPY
    try:
        lam = rh_speed(front.left, front.right)
    except NonAdmissiblePair:
        return FrontClass.NOT_ENTROPY
    if front.speed != lam:
        return FrontClass.NOT_ENTROPY
    if ul == ur:
        return FrontClass.W_STANDING
    if wl == wr:
        return FrontClass.U_INTERIOR
    if lam != HALF:
        return FrontClass.NOT_ENTROPY
    if ur > ul and strip.on_upper(ul, wl) and strip.on_upper(ur, wr):
        return FrontClass.JOINT_UPPER
    if ur < ul and strip.on_lower(ul, wl) and strip.on_lower(ur, wr):
        return FrontClass.JOINT_LOWER
    return FrontClass.NOT_ENTROPY


def entropy_pointwise(front, test: EntropyTestPoint) -> Fraction:
    """Jump form of the entropy inequality at one ``(k, k_hat)``; admissible
    fronts give a non-negative value."""
    (ul, wl), (ur, wr) = front.left, front.right
    k, kh = test.k, test.k_hat
    eta_jump = (abs(ur - k) + abs(wr - kh)) - (abs(ul - k) + abs(wl - kh))
    flux_jump = abs(ur - k) - abs(ul - k)
    return front.speed * eta_jump - flux_jump


def entropy_grid(front, strip: HysteresisStrip):
    """Test points making the check exhaustive over the strip.

    The jump expression is affine on each cell cut out by the lines
    ``k = u_l, u_r`` and ``k_hat = w_l, w_r`` inside the strip, and constant on
    the unbounded corner cells, so its minimum over the strip is attained at a
    cell vertex or in a corner.  All such vertices are on this grid.
    """
    a = strip.a
    coords = {front.left.u, front.right.u, front.left.w, front.right.w}
    cands = set()
    for c in coords:
        cands |= {c - a, c, c + a}
    lo, hi = min(cands) - 2 * a - 1, max(cands) + 2 * a + 1
    cands |= {lo, hi}
    axis = sorted(cands)
    return [EntropyTestPoint(k, kh) for k in axis for kh in axis if abs(k - kh) <= a]


@dataclass
class GridReport:
    holds: bool
    witness: EntropyTestPoint = None
    value: Fraction = None
    points: int = 0

    def __bool__(self):
        return self.holds


def entropy_grid_check(front, strip: HysteresisStrip, grid=None) -> GridReport:
    if front.left == front.right:
        return GridReport(True)
    grid = entropy_grid(front, strip) if grid is None else grid
    worst = None
    for pt in grid:
        val = entropy_pointwise(front, pt)
        if val < 0 and (worst is None or val < worst[1]):
            worst = (pt, val)
    if worst is None:
        return GridReport(True, points=len(grid))
    return GridReport(False, witness=worst[0], value=worst[1], points=len(grid))


@dataclass(frozen=True)
class TestBump:
    """Product of standard exponential bumps centred at ``(x0, t0)``."""

    x0: float
    t0: float
    rx: float
    rt: float

    __test__ = False  # keep pytest from collecting this class

    @staticmethod
    def _beta(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    @staticmethod
    def _dbeta(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1
        si = s[inside]
        out[inside] = np.exp(-1.0 / (1.0 - si ** 2)) * (-2.0 * si / (1.0 - si ** 2) ** 2)
        return out

    def phi(self, x, t):
        return self._beta((x - self.x0) / self.rx) * self._beta((t - self.t0) / self.rt)

    def phi_x(self, x, t):
        return self._dbeta((x - self.x0) / self.rx) / self.rx * self._beta((t - self.t0) / self.rt)

    def phi_t(self, x, t):
        return self._beta((x - self.x0) / self.rx) * self._dbeta((t - self.t0) / self.rt) / self.rt

    def fits(self, traj: Trajectory) -> bool:
        return 0 < self.t0 - self.rt and self.t0 + self.rt < float(traj.T)


@dataclass
class ResidualReport:
    value: object  # Fraction(0) when every bracket vanishes, float otherwise
    brackets: dict = field(default_factory=dict)
    offenders: dict = field(default_factory=dict)  # front id -> contribution


def front_segments(traj: Trajectory):
    """``(front, t_start, t_end)`` for every front over ``[0, T]``."""
    for rec in traj.history.values():
        end = traj.T if rec.t_death is None else min(rec.t_death, traj.T)
        if end > rec.front.t_birth:
            yield rec.front, rec.front.t_birth, end


def weak_residual_geometric(traj: Trajectory, bump: TestBump) -> ResidualReport:
    """Weak-form residual integrated by parts onto the fronts.

    Each front contributes ``[speed (du + dw) - du] * integral of phi along the
    front``, with jumps taken right minus left.
    """
    report = ResidualReport(Fraction(0))
    total = Fraction(0)
    for front, t_a, t_b in front_segments(traj):
        du = front.right.u - front.left.u
        dw = front.right.w - front.left.w
        bracket = front.speed * (du + dw) - du
        report.brackets[front.id] = bracket
        if bracket == 0:
            continue
        lo = max(float(t_a), bump.t0 - bump.rt)
        hi = min(float(t_b), bump.t0 + bump.rt)
        if hi <= lo:
            continue
        x_b, t_birth, s = float(front.x_birth), float(front.t_birth), float(front.speed)
        line, _ = integrate.quad(lambda tau: float(bump.phi(x_b + s * (tau - t_birth), tau)),
                                 lo, hi, limit=200)
        contribution = float(bracket) * line
        if contribution != 0.0:
            report.offenders[front.id] = contribution
            total = float(total) + contribution
    report.value = total
    return report


def weak_residual_quadrature(traj: Trajectory, bump: TestBump, mesh_n: int) -> float:
    """Midpoint rule for the weak form over the bump's support box."""
    if mesh_n < 8:
        raise ValueError("mesh_n must be at least 8")
    hx = 2 * bump.rx / mesh_n
    ht = 2 * bump.rt / mesh_n
    xs = bump.x0 - bump.rx + hx * (np.arange(mesh_n) + 0.5)
    total = 0.0
    for j in range(mesh_n):
        t = bump.t0 - bump.rt + ht * (j + 0.5)
        u, w = sample(traj, Fraction(t))
        uv, wv = u.evaluate(xs), w.evaluate(xs)
        total += np.sum((uv + wv) * bump.phi_t(xs, t) + uv * bump.phi_x(xs, t))
    return float(total * hx * ht)


def _require_compact(traj: Trajectory):
    far_l, far_r = traj.initial.far_left, traj.initial.far_right
    if any(v != 0 for v in (far_l.u, far_l.w, far_r.u, far_r.w)):
        raise UnboundedSupport("energy and L1 checks need data vanishing outside a compact set")


def w_sweep_mass(traj: Trajectory, t) -> Fraction:
    """Total variation of the measure ``dw/dt`` on ``R x (0, t)`` from front
    sweeps: each w-carrying front covers ``speed * active time`` of space."""
    t = q(t)
    mass = Fraction(0)
    for front, t_a, t_b in front_segments(traj):
        active = min(t_b, t) - t_a
        if active > 0:
            mass += abs(front.right.w - front.left.w) * front.speed * active
    return mass


def crossing_times(traj: Trajectory, x, t):
    """Times in ``(0, t)`` at which some moving front passes ``x``."""
    x, t = q(x), q(t)
    out = set()
    for front, t_a, t_b in front_segments(traj):
        if front.speed == 0:
            continue
        tau = front.t_birth + (x - front.x_birth) / front.speed
        if t_a <= tau < t_b and 0 < tau < t:
            out.add(tau)
    return sorted(out)


def w_fubini_mass(traj: Trajectory, t) -> Fraction:
    """Same mass by integrating the per-x time variation of ``w`` over ``x``.

    The per-x variation is constant between the x-coordinates where fronts are
    born, die, or sit at time ``t``, so a midpoint per cell is exact.
    """
    t = q(t)
    crit = set()
    for front, t_a, t_b in front_segments(traj):
        end = min(t_b, t)
        if end > t_a:
            crit.add(front.position(t_a))
            crit.add(front.position(end))
    crit = sorted(crit)
    mass = Fraction(0)
    for x_lo, x_hi in zip(crit, crit[1:]):
        x = (x_lo + x_hi) / 2
        taus = [Fraction(0)] + crossing_times(traj, x, t) + [t]
        ws = [sample(traj, (a + b) / 2)[1].value_at(x) for a, b in zip(taus, taus[1:])]
        var = sum((abs(b - a) for a, b in zip(ws, ws[1:])), Fraction(0))
        mass += var * (x_hi - x_lo)
    return mass


@dataclass
class EnergyReport:
    t: Fraction
    lhs: Fraction
    rhs: Fraction
    mass: Fraction
    mass_fubini: Fraction
    holds: bool
    masses_agree: bool

    def __bool__(self):
        return self.holds and self.masses_agree


def hysteresis_energy_check(traj: Trajectory, t, cross_validate=True) -> EnergyReport:
    t = q(t)
    _require_compact(traj)
    u, w = sample(traj, t)
    sq = lambda v: v * v
    lhs = (u.integral(sq) - traj.u0.integral(sq)) / 2 + (w.integral(sq) - traj.w0.integral(sq)) / 2
    mass = w_sweep_mass(traj, t)
    mass_f = w_fubini_mass(traj, t) if cross_validate else mass
    rhs = -traj.strip.a * mass
    return EnergyReport(t, lhs, rhs, mass, mass_f, lhs <= rhs, mass == mass_f)


@dataclass
class ContractionReport:
    initial: Fraction
    times: list
    distances: list
    holds: bool

    def __bool__(self):
        return self.holds


def combined_distance(traj1: Trajectory, traj2: Trajectory, t, window=None) -> Fraction:
    u1, w1 = sample(traj1, t)
    u2, w2 = sample(traj2, t)
    return l1_distance(u1, u2, window) + l1_distance(w1, w2, window)


def contraction_check(traj1: Trajectory, traj2: Trajectory, times, window=None) -> ContractionReport:
    d0 = l1_distance(traj1.u0, traj2.u0, window) + l1_distance(traj1.w0, traj2.w0, window)
    times = [q(t) for t in times]
    dists = [combined_distance(traj1, traj2, t, window) for t in times]
    return ContractionReport(d0, times, dists, all(d <= d0 for d in dists))


@dataclass
class ModulusReport:
    rows: list  # (t, t', du, bound_u, dw, bound_w)
    holds: bool

    def __bool__(self):
        return self.holds


def time_modulus_check(traj: Trajectory, pairs, window=None) -> ModulusReport:
    """L1-in-time Lipschitz bounds with constants ``TV(u0)`` and ``TV(w0)/2``."""
    if window is None:
        _require_compact(traj)
    tv_u, tv_w = traj.u0.total_variation(), traj.w0.total_variation()
    rows, ok = [], True
    for t, s in pairs:
        t, s = q(t), q(s)
        u_t, w_t = sample(traj, t)
        u_s, w_s = sample(traj, s)
        du = l1_distance(u_t, u_s, window)
        dw = l1_distance(w_t, w_s, window)
        bu, bw = tv_u * abs(t - s), tv_w * abs(t - s) / 2
        rows.append((t, s, du, bu, dw, bw))
        ok = ok and du <= bu and dw <= bw
    return ModulusReport(rows, ok)


def time_section(traj: Trajectory, x, t_end=None):
    """``(u(x, .), w(x, .))`` on ``[0, t_end]`` as piecewise-constant signals."""
    x = q(x)
    t_end = traj.T if t_end is None else q(t_end)
    taus = [Fraction(0)] + crossing_times(traj, x, t_end) + [t_end]
    us, ws = [], []
    for a, b in zip(taus, taus[1:]):
        u, w = sample(traj, (a + b) / 2)
        us.append(u.value_at(x))
        ws.append(w.value_at(x))
    return PiecewiseConstantSignal(taus, us), PiecewiseConstantSignal(taus, ws)


def per_x_hysteresis(traj: Trajectory, x, t_end=None):
    """Check ``w(x, .) = F[u(x, .), w0(x)]`` both by direct replay and by the
    integral characterization.  Returns ``(replay_ok, variational_report)``."""
    u_sig, w_sig = time_section(traj, x, t_end)
    w0 = traj.w0.value_at(q(x))
    replay = play_pc(traj.strip, u_sig, w0)
    return replay.same_as(w_sig), verify_play_variational(traj.strip, u_sig, w_sig, w0)


def verify_trajectory(traj: Trajectory, times=None, bumps=(), pairs=()):
    """Run the exact checks on one trajectory and return a JSON-friendly dict."""
    strip = traj.strip
    out = {"fronts": len(traj.history), "events": len(traj.events)}
    bad = []
    for front in traj.fronts:
        cls = classify_front(front, strip)
        grid = entropy_grid_check(front, strip)
        viol = HystFront(front.speed, front.left, front.right).invariant_violations(strip)
        if not cls.admissible or not grid.holds or viol:
            bad.append({"id": front.id, "class": cls.value, "grid": grid.holds, "violations": viol})
    out["entropy"] = {"ok": not bad, "failures": bad}
    tv_ok = all(e.tv_u_after <= e.tv_u_before and e.tv_w_after <= e.tv_w_before for e in traj.events)
    out["tv_monotone"] = tv_ok
    out["weak_geometric"] = []
    for bump in bumps:
        res = weak_residual_geometric(traj, bump)
        out["weak_geometric"].append({"bump": [bump.x0, bump.t0, bump.rx, bump.rt],
                                      "value": float(res.value), "offenders": sorted(res.offenders)})
    compact = all(v == 0 for v in (*traj.initial.far_left, *traj.initial.far_right))
    out["compact_support"] = compact
    checks = [tv_ok, not bad] + [r["value"] == 0 for r in out["weak_geometric"]]
    if compact:
        energy = []
        for t in times or ():
            rep = hysteresis_energy_check(traj, t)
            energy.append({"t": t, "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds,
                           "mass_agree": rep.masses_agree})
            checks.append(bool(rep))
        out["energy"] = energy
        if pairs:
            mod = time_modulus_check(traj, pairs)
            out["time_modulus"] = {"holds": mod.holds}
            checks.append(mod.holds)
    out["ok"] = all(checks)
    return out



def spacetime_l1_distance_exact(traj1: Trajectory, traj2: Trajectory, T=None) -> Fraction:
    """Exact ``||u1 - u2|| + ||w1 - w2||`` in ``L1(R x (0, T))``.

    Between collision times of either trajectory and crossing times of a front
    of one with a front of the other, every cell of the merged partition has
    a width affine in ``t`` and a fixed value, so the spatial distance is affine
    there and the midpoint rule is exact.
    """
    T = min(traj1.T, traj2.T) if T is None else q(T)
    cuts = {Fraction(0), T}
    cuts |= {e.t for e in traj1.events if e.t < T} | {e.t for e in traj2.events if e.t < T}
    segs2 = list(front_segments(traj2))
    for f, a1, b1 in front_segments(traj1):
        for g, a2, b2 in segs2:
            if f.speed == g.speed:
                continue
            # f.x_birth + f.speed (t - f.t_birth) == g.x_birth + g.speed (t - g.t_birth)
            t = ((g.x_birth - g.speed * g.t_birth) - (f.x_birth - f.speed * f.t_birth)) / (f.speed - g.speed)
            if 0 < t < T and max(a1, a2) <= t <= min(b1, b2):
                cuts.add(t)
    cuts = sorted(cuts)
    total = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        total += (hi - lo) * combined_distance(traj1, traj2, (lo + hi) / 2)
    return total


class FrontTable:
    """Float arrays of a trajectory's front history for fast sampling."""

    def __init__(self, traj: Trajectory):
        recs = list(traj.history.values())
        self.t_birth = np.array([float(r.front.t_birth) for r in recs])
        self.t_death = np.array([np.inf if r.t_death is None else float(r.t_death) for r in recs])
        self.x_birth = np.array([float(r.front.x_birth) for r in recs])
        self.speed = np.array([float(r.front.speed) for r in recs])
        self.jump_u = np.array([float(r.front.right.u - r.front.left.u) for r in recs])
        self.jump_w = np.array([float(r.front.right.w - r.front.left.w) for r in recs])
        self.far = (float(traj.initial.far_left.u), float(traj.initial.far_left.w))
        self.far_right = (float(traj.initial.far_right.u), float(traj.initial.far_right.w))

    def profile(self, t: float):
        """Sorted jump positions and the ``u + w``-style jumps (``du``, ``dw``) at ``t``."""
        alive = (self.t_birth <= t) & (t < self.t_death)
        x = self.x_birth[alive] + self.speed[alive] * (t - self.t_birth[alive])
        order = np.argsort(x, kind="stable")
        return x[order], self.jump_u[alive][order], self.jump_w[alive][order]


def _profile_distance(pa, pb, far_a, far_b) -> float:
    xa, dua, dwa = pa
    xb, dub, dwb = pb
    # jumps of the difference u_a - u_b (and w) at merged positions
    x = np.concatenate([xa, xb])
    du = np.concatenate([dua, -dub])
    dw = np.concatenate([dwa, -dwb])
    order = np.argsort(x, kind="stable")
    x, du, dw = x[order], du[order], dw[order]
    diff_u = (far_a[0] - far_b[0]) + np.cumsum(du)
    diff_w = (far_a[1] - far_b[1]) + np.cumsum(dw)
    widths = np.diff(x)
    return float(np.sum(widths * (np.abs(diff_u[:-1]) + np.abs(diff_w[:-1]))))


def spacetime_l1_distance(traj1: Trajectory, traj2: Trajectory, T=None, min_samples=2048) -> float:
    """Float ``||u1 - u2|| + ||w1 - w2||`` in ``L1(R x (0, T))``.

    Time is cut at every collision of either trajectory, each piece is further
    split to at most ``T / min_samples`` long, and the composite midpoint rule
    integrates the (continuous, piecewise-affine) spatial distance.  Only
    crossings between fronts of different trajectories introduce quadrature
    error, which is second order in the piece length.
    """
    T = float(min(traj1.T, traj2.T) if T is None else q(T))
    for traj in (traj1, traj2):
        if traj.initial.far_left != traj.initial.far_right:
            raise UnboundedSupport("space-time distance needs equal far states")
    if traj1.initial.far_left != traj2.initial.far_left:
        raise UnboundedSupport("trajectories differ at infinity")
    ta, tb = FrontTable(traj1), FrontTable(traj2)
    cuts = {0.0, T}
    cuts |= {float(e.t) for e in traj1.events if e.t < T} | {float(e.t) for e in traj2.events if e.t < T}
    cuts = np.array(sorted(cuts))
    h_max = T / min_samples
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        m = max(1, int(np.ceil((hi - lo) / h_max)))
        h = (hi - lo) / m
        for k in range(m):
            t = lo + (k + 0.5) * h
            total += h * _profile_distance(ta.profile(t), tb.profile(t), ta.far, tb.far)
    return total
