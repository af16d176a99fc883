"""Shared generators for randomized tests."""
import random
from fractions import Fraction as F

from hystfront.play import HysteresisStrip
from hystfront.profile import PiecewiseConstantProfile
from hystfront.tracking import run

STRIP = HysteresisStrip(1)


def random_data(rng: random.Random, pieces=10, compact=True):
    """Feasible piecewise-constant ``(u0, w0)`` for ``a = 1`` on a quarter grid."""
    xs = [F(0)]
    for _ in range(pieces):
        xs.append(xs[-1] + F(rng.randint(1, 8), 4))
    inner_u = [F(rng.randint(-8, 8), 4) for _ in range(pieces)]
    inner_w = [u + F(rng.randint(-4, 4), 4) for u in inner_u]
    if compact:
        far_u = far_w = (F(0), F(0))
    else:
        fu = (F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        far_u = fu
        far_w = (fu[0] + F(rng.randint(-4, 4), 4), fu[1] + F(rng.randint(-4, 4), 4))
    u0 = PiecewiseConstantProfile(tuple(xs), (far_u[0], *inner_u, far_u[1]))
    w0 = PiecewiseConstantProfile(tuple(xs), (far_w[0], *inner_w, far_w[1]))
    return u0.normalized(), w0.normalized()


def corpus(seed=1, count=100, pieces=10, T=60):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        u0, w0 = random_data(rng, pieces)
        out.append(run(u0, w0, STRIP, T))
    return out
