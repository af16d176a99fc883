"""Piecewise-constant functions of ``x`` on the whole real line."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import WindowMismatch
from .rational import q


@dataclass(frozen=True)
class PiecewiseConstantProfile:
    """``values[0]`` on ``(-inf, breakpoints[0])``, ``values[i]`` on
    ``(breakpoints[i-1], breakpoints[i])`` and ``values[-1]`` on
    ``(breakpoints[-1], +inf)``.  Values at breakpoints are not stored."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(q(x) for x in self.breakpoints)
        vals = tuple(q(v) for v in self.values)
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) + 1:
            raise ValueError(f"{len(bps)} breakpoints need {len(bps) + 1} values, got {len(vals)}")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value) -> "PiecewiseConstantProfile":
        return cls((), (value,))

    @classmethod
    def from_jumps(cls, left_value, jumps) -> "PiecewiseConstantProfile":
        """Build from ``left_value`` and ``(x, value_right_of_x)`` pairs sorted by
        ``x``.  Coincident positions collapse to a single jump."""
        bps, vals = [], [q(left_value)]
        for x, v in jumps:
            x = q(x)
            if bps and x == bps[-1]:
                vals[-1] = q(v)
            else:
                if bps and x < bps[-1]:
                    raise ValueError("jump positions must be sorted")
                bps.append(x)
                vals.append(q(v))
        return cls(tuple(bps), tuple(vals)).normalized()

    @property
    def far_left(self) -> Fraction:
        return self.values[0]

    @property
    def far_right(self) -> Fraction:
        return self.values[-1]

    def normalized(self) -> "PiecewiseConstantProfile":
        bps, vals = [], [self.values[0]]
        for x, v in zip(self.breakpoints, self.values[1:]):
            if v != vals[-1]:
                bps.append(x)
                vals.append(v)
        return PiecewiseConstantProfile(tuple(bps), tuple(vals))

    def value_at(self, x) -> Fraction:
        """Value at ``x``; at a breakpoint the right value is returned."""
        x = q(x)
        lo, hi = 0, len(self.breakpoints)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.breakpoints[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        return self.values[lo]

    def refine(self, breakpoints) -> "PiecewiseConstantProfile":
        bps = sorted(set(self.breakpoints) | set(q(x) for x in breakpoints))
        vals = [self.value_at(bps[0] - 1)] if bps else [self.values[0]]
        vals += [self.value_at(x) for x in bps]
        return PiecewiseConstantProfile(tuple(bps), tuple(vals))

    def total_variation(self) -> Fraction:
        return sum((abs(b - a) for a, b in zip(self.values, self.values[1:])), Fraction(0))

    def restrict(self, x_min, x_max) -> "PiecewiseConstantProfile":
        """Drop breakpoints outside the open window; the outer values become the
        values just inside the window edges."""
        x_min, x_max = q(x_min), q(x_max)
        inside = [x for x in self.breakpoints if x_min < x < x_max]
        vals = [self.value_at(x_min)] + [self.value_at(x) for x in inside]
        return PiecewiseConstantProfile(tuple(inside), tuple(vals))

    def map(self, fn) -> "PiecewiseConstantProfile":
        return PiecewiseConstantProfile(self.breakpoints, tuple(fn(v) for v in self.values))

    def integral(self, fn=lambda v: v, window=None) -> Fraction:
        """Exact integral of ``fn(value)``.  Without a window both far values
        must map to zero."""
        if window is None:
            if fn(self.values[0]) != 0 or fn(self.values[-1]) != 0:
                raise WindowMismatch("integral over the real line diverges; pass a window")
            total = Fraction(0)
            for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values[1:-1]):
                total += (b - a) * fn(v)
            return total
        x_min, x_max = q(window[0]), q(window[1])
        edges = [x_min] + [x for x in self.breakpoints if x_min < x < x_max] + [x_max]
        total = Fraction(0)
        for a, b in zip(edges, edges[1:]):
            total += (b - a) * fn(self.value_at(a))
        return total

    def evaluate(self, xs) -> np.ndarray:
        """Vectorized float evaluation (right value at breakpoints)."""
        bps = np.array([float(x) for x in self.breakpoints])
        vals = np.array([float(v) for v in self.values])
        return vals[np.searchsorted(bps, np.asarray(xs, dtype=float), side="right")]


def combine(p: PiecewiseConstantProfile, r: PiecewiseConstantProfile, fn) -> PiecewiseConstantProfile:
    """Pointwise ``fn(p(x), r(x))`` on the common refinement."""
    bps = sorted(set(p.breakpoints) | set(r.breakpoints))
    if not bps:
        return PiecewiseConstantProfile.constant(fn(p.values[0], r.values[0]))
    xs = [bps[0] - 1] + bps
    vals = tuple(fn(p.value_at(x), r.value_at(x)) for x in xs)
    return PiecewiseConstantProfile(tuple(bps), vals)


def total_variation(profile: PiecewiseConstantProfile) -> Fraction:
    return profile.total_variation()


def l1_distance(p: PiecewiseConstantProfile, r: PiecewiseConstantProfile, window=None) -> Fraction:
    diff = combine(p, r, lambda a, b: abs(a - b))
    try:
        return diff.integral(window=window)
    except WindowMismatch as exc:
        raise WindowMismatch("profiles differ at infinity; L1 distance needs a common window") from exc
