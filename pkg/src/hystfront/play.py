"""Play hysteresis operator on piecewise-constant and piecewise-linear inputs.

The output ``w`` stays frozen while the pair ``(u, w)`` is strictly inside the
strip ``|u - w| <= a`` and is dragged along by ``u`` while the pair sits on one
of the two boundary lines.  For a jump of the input the output moves straight to
the nearest point of the strip, which is the clamp implemented by
:func:`play_jump`.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InfeasibleInitialState, InfeasibleState, MismatchedBreakpoints
from .rational import clamp, q


@dataclass(frozen=True)
class HysteresisStrip:
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", q(self.a))
        if self.a <= 0:
            raise ValueError(f"strip half-width must be positive, got {self.a}")

    def contains(self, u, w) -> bool:
        return abs(q(u) - q(w)) <= self.a

    def on_upper(self, u, w) -> bool:
        return q(w) == q(u) + self.a

    def on_lower(self, u, w) -> bool:
        return q(w) == q(u) - self.a


@dataclass(frozen=True)
class PlayState:
    u: Fraction
    w: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", q(self.u))
        object.__setattr__(self, "w", q(self.w))

    @classmethod
    def checked(cls, u, w, strip: HysteresisStrip) -> "PlayState":
        state = cls(u, w)
        if not strip.contains(state.u, state.w):
            raise InfeasibleState(f"|u - w| = {abs(state.u - state.w)} exceeds a = {strip.a}")
        return state

    def __iter__(self):
        yield self.u
        yield self.w


@dataclass(frozen=True)
class PiecewiseConstantSignal:
    """Time signal with value ``values[i]`` on the open interval
    ``(breakpoints[i], breakpoints[i + 1])``."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(q(t) for t in self.breakpoints)
        vals = tuple(q(v) for v in self.values)
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise ValueError(f"{len(bps) - 1} intervals but {len(vals)} values")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @property
    def start(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def end(self) -> Fraction:
        return self.breakpoints[-1]

    def normalized(self) -> "PiecewiseConstantSignal":
        bps = [self.breakpoints[0]]
        vals = [self.values[0]]
        for t, v in zip(self.breakpoints[1:-1], self.values[1:]):
            if v != vals[-1]:
                bps.append(t)
                vals.append(v)
        bps.append(self.breakpoints[-1])
        return PiecewiseConstantSignal(tuple(bps), tuple(vals))

    def value_at(self, t) -> Fraction:
        """Right-continuous representative (left value at the final endpoint)."""
        t = q(t)
        if t < self.start or t > self.end:
            raise ValueError(f"t={t} outside [{self.start}, {self.end}]")
        for i in range(len(self.values)):
            if t < self.breakpoints[i + 1]:
                return self.values[i]
        return self.values[-1]

    def refine(self, breakpoints) -> "PiecewiseConstantSignal":
        """Re-express on a finer breakpoint set covering the same interval."""
        bps = tuple(sorted(set(q(t) for t in breakpoints)))
        if bps[0] != self.start or bps[-1] != self.end:
            raise MismatchedBreakpoints("refinement must span the same interval")
        return PiecewiseConstantSignal(bps, tuple(self.value_at(t) for t in bps[:-1]))

    def same_as(self, other: "PiecewiseConstantSignal") -> bool:
        return self.normalized() == other.normalized()


@dataclass(frozen=True)
class PiecewiseLinearSignal:
    nodes: tuple

    def __post_init__(self):
        nodes = tuple((q(t), q(v)) for t, v in self.nodes)
        if len(nodes) < 2:
            raise ValueError("need at least two nodes")
        if any(b[0] <= a[0] for a, b in zip(nodes, nodes[1:])):
            raise ValueError("node times must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def times(self):
        return tuple(t for t, _ in self.nodes)

    def value_at(self, t) -> Fraction:
        t = q(t)
        nodes = self.nodes
        if t < nodes[0][0] or t > nodes[-1][0]:
            raise ValueError(f"t={t} outside [{nodes[0][0]}, {nodes[-1][0]}]")
        for (t0, v0), (t1, v1) in zip(nodes, nodes[1:]):
            if t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return nodes[-1][1]

    def lipschitz(self) -> Fraction:
        return max(abs(v1 - v0) / (t1 - t0) for (t0, v0), (t1, v1) in zip(self.nodes, self.nodes[1:]))

    def same_as(self, other: "PiecewiseLinearSignal") -> bool:
        """Equality as functions (node placement may differ)."""
        if self.nodes[0][0] != other.nodes[0][0] or self.nodes[-1][0] != other.nodes[-1][0]:
            return False
        times = sorted(set(self.times) | set(other.times))
        return all(self.value_at(t) == other.value_at(t) for t in times)

    def compose(self, nodes_s) -> "PiecewiseLinearSignal":
        """Return ``self o s`` for a strictly increasing piecewise-linear ``s``
        given by its nodes, whose range must equal this signal's time domain."""
        s = PiecewiseLinearSignal(nodes_s)
        if s.nodes[0][1] != self.nodes[0][0] or s.nodes[-1][1] != self.nodes[-1][0]:
            raise ValueError("reparametrization must map onto the signal's domain")
        if any(b[1] <= a[1] for a, b in zip(s.nodes, s.nodes[1:])):
            raise ValueError("reparametrization must be strictly increasing")
        times = set(s.times)
        for tau in self.times:
            times.add(_inverse(s, tau))
        return PiecewiseLinearSignal(tuple((t, self.value_at(s.value_at(t))) for t in sorted(times)))


def _inverse(s: PiecewiseLinearSignal, value: Fraction) -> Fraction:
    for (t0, v0), (t1, v1) in zip(s.nodes, s.nodes[1:]):
        if v0 <= value <= v1:
            return t0 + (value - v0) * (t1 - t0) / (v1 - v0)
    raise ValueError(f"{value} outside the range of the reparametrization")


def play_jump(strip: HysteresisStrip, w_prev, u_new) -> Fraction:
    """Output after the input jumps to ``u_new`` from a state with output ``w_prev``."""
    u_new = q(u_new)
    return clamp(q(w_prev), u_new - strip.a, u_new + strip.a)


def play_pc(strip: HysteresisStrip, signal: PiecewiseConstantSignal, w0) -> PiecewiseConstantSignal:
    w0 = q(w0)
    if not strip.contains(signal.values[0], w0):
        raise InfeasibleInitialState(f"(u(0), w0) = ({signal.values[0]}, {w0}) is outside the strip")
    out = [w0]
    for u in signal.values[1:]:
        out.append(play_jump(strip, out[-1], u))
    return PiecewiseConstantSignal(signal.breakpoints, tuple(out)).normalized()


def play_piecewise_linear(strip: HysteresisStrip, signal: PiecewiseLinearSignal, w0) -> PiecewiseLinearSignal:
    """Exact output for continuous piecewise-linear input.

    Each input segment contributes at most one extra node: the instant the pair
    reaches the boundary it is about to follow.
    """
    a = strip.a
    w = q(w0)
    (t_prev, u_prev) = signal.nodes[0]
    if not strip.contains(u_prev, w):
        raise InfeasibleInitialState(f"(u(0), w0) = ({u_prev}, {w}) is outside the strip")
    out = [(t_prev, w)]
    for t_next, u_next in signal.nodes[1:]:
        if u_next > u_prev:
            hit = w + a
        elif u_next < u_prev:
            hit = w - a
        else:
            hit = None
        if hit is not None and min(u_prev, u_next) < hit < max(u_prev, u_next):
            t_hit = t_prev + (hit - u_prev) * (t_next - t_prev) / (u_next - u_prev)
            out.append((t_hit, w))
        w = play_jump(strip, w, u_next)
        out.append((t_next, w))
        t_prev, u_prev = t_next, u_next
    return PiecewiseLinearSignal(tuple(out))


def play_oracle(strip: HysteresisStrip, signal: PiecewiseLinearSignal, w0, step):
    """Explicit time stepping of the play relation on a uniform grid.

    Floating point by design: this is the independent reference the exact
    construction is checked against. Returns ``(times, outputs)`` arrays; the
    final sample lands exactly on the end of the input's domain.
    """
    step = float(step)
    if step <= 0:
        raise ValueError("step must be positive")
    a = float(strip.a)
    t_nodes = np.array([float(t) for t, _ in signal.nodes])
    u_nodes = np.array([float(v) for _, v in signal.nodes])
    n = int(np.ceil((t_nodes[-1] - t_nodes[0]) / step - 1e-12))
    times = t_nodes[0] + step * np.arange(n + 1)
    times[-1] = t_nodes[-1]
    u = np.interp(times, t_nodes, u_nodes)
    w = np.empty_like(u)
    cur = float(w0)
    w[0] = cur
    for k in range(1, len(u)):
        uk = u[k]
        if cur < uk - a:
            cur = uk - a
        elif cur > uk + a:
            cur = uk + a
        w[k] = cur
    return times, w


@dataclass
class VariationalReport:
    holds: bool
    feasible: bool
    equality: bool
    breakpoints: list = field(default_factory=list)
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def verify_play_variational(strip: HysteresisStrip, u: PiecewiseConstantSignal,
                            w: PiecewiseConstantSignal, w0) -> VariationalReport:
    """Check the integral characterization of ``w = F[u, w0]`` for
    piecewise-constant signals.

    Condition (ii) is evaluated at every breakpoint ``t_k`` of the common
    refinement as the cumulative sums over jumps at ``t_i < t``.  The sums are
    expected to balance exactly; a strict inequality is flagged in ``problems``
    as suspicious without failing the check.
    """
    if u.start != w.start or u.end != w.end:
        raise MismatchedBreakpoints(f"u spans [{u.start}, {u.end}], w spans [{w.start}, {w.end}]")
    bps = sorted(set(u.breakpoints) | set(w.breakpoints))
    u, w = u.refine(bps), w.refine(bps)
    a = strip.a
    report = VariationalReport(holds=True, feasible=True, equality=True)
    if w.values[0] != q(w0):
        report.holds = False
        report.problems.append(f"w(0+) = {w.values[0]} differs from w0 = {q(w0)}")
    for i, (ui, wi) in enumerate(zip(u.values, w.values)):
        if abs(ui - wi) > a:
            report.holds = report.feasible = False
            report.problems.append(f"|u - w| = {abs(ui - wi)} > a on interval {i}")
    lhs = rhs = Fraction(0)
    for i in range(1, len(bps) - 1):
        dw = w.values[i] - w.values[i - 1]
        # right-continuous representatives at t_i are the values just after it
        lhs += (u.values[i] - w.values[i]) * dw
        rhs += a * abs(dw)
        report.breakpoints.append(bps[i])
        report.lhs.append(lhs)
        report.rhs.append(rhs)
        if lhs < rhs:
            report.holds = False
            report.equality = False
            report.problems.append(f"inequality fails after t = {bps[i]}: {lhs} < {rhs}")
        elif lhs > rhs:
            report.equality = False
            report.problems.append(f"strict inequality after t = {bps[i]} (suspicious)")
    return report
