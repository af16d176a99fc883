"""Event-driven wave-front tracking for ``u_t + w_t + u_x = 0``, ``w = F[u, w0]``.

Fronts move at exact rational speeds in {0, 1/2, 1}, so every collision time
and position is an exact rational.  The engine repeatedly finds the earliest
collision, replaces the colliding fronts by the fan of the local Riemann
problem, and logs total-variation diagnostics.
"""
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .errors import DegenerateData, InfeasibleData, StaleEvent
from .play import HysteresisStrip, PlayState
from .profile import PiecewiseConstantProfile
from .rational import q
from .riemann import HALF, HystFront, RiemannData, solve_riemann_hyst


@dataclass(frozen=True)
class Front:
    id: int
    t_birth: Fraction
    x_birth: Fraction
    speed: Fraction
    left: PlayState
    right: PlayState

    def position(self, t) -> Fraction:
        return self.x_birth + self.speed * (q(t) - self.t_birth)

    @property
    def carries_u(self) -> bool:
        return self.left.u != self.right.u

    @property
    def carries_w(self) -> bool:
        return self.left.w != self.right.w

    def as_hyst_front(self) -> HystFront:
        return HystFront(self.speed, self.left, self.right)


@dataclass(frozen=True)
class SimState:
    time: Fraction
    fronts: tuple
    far_left: PlayState
    far_right: PlayState

    def __post_init__(self):
        states = [self.far_left]
        for f in self.fronts:
            if f.left != states[-1]:
                raise ValueError(f"front {f.id} breaks adjacency")
            states.append(f.right)
        if states[-1] != self.far_right:
            raise ValueError("outermost front does not match the far-right state")

    def tv_u(self) -> Fraction:
        return sum((abs(f.right.u - f.left.u) for f in self.fronts), Fraction(0))

    def tv_w(self) -> Fraction:
        return sum((abs(f.right.w - f.left.w) for f in self.fronts), Fraction(0))


@dataclass(frozen=True)
class Event:
    t: Fraction
    x: Fraction
    ids: tuple


@dataclass(frozen=True)
class EventRecord:
    t: Fraction
    x: Fraction
    consumed: tuple
    produced: tuple
    consumed_speeds: tuple
    tv_u_before: Fraction
    tv_u_after: Fraction
    tv_w_before: Fraction
    tv_w_after: Fraction

    @property
    def is_uu(self) -> bool:
        """Both a speed-1 and a speed-1/2 front take part (two u-jumps merge)."""
        return Fraction(1) in self.consumed_speeds and HALF in self.consumed_speeds


@dataclass
class FrontRecord:
    front: Front
    t_death: Fraction = None

    def alive_at(self, t) -> bool:
        """Right-limit convention: alive on ``[t_birth, t_death)``."""
        return self.front.t_birth <= t and (self.t_death is None or t < self.t_death)


@dataclass
class Trajectory:
    strip: HysteresisStrip
    u0: PiecewiseConstantProfile
    w0: PiecewiseConstantProfile
    T: Fraction
    initial: SimState
    final: SimState = None
    events: list = field(default_factory=list)
    history: dict = field(default_factory=dict)  # id -> FrontRecord

    @property
    def fronts(self):
        return [rec.front for rec in self.history.values()]

    def exceptional_x(self):
        """Finite set of ``x`` excluded from per-x hysteresis checks: initial
        breakpoints and collision points."""
        pts = set(self.u0.breakpoints) | set(self.w0.breakpoints)
        pts |= {ev.x for ev in self.events}
        return sorted(pts)


def pair_profiles(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile):
    """Return the common breakpoints and the ``(u, w)`` value pairs between them."""
    bps = sorted(set(u0.breakpoints) | set(w0.breakpoints))
    probes = [bps[0] - 1] + bps if bps else [Fraction(0)]
    return bps, [(u0.value_at(x), w0.value_at(x)) for x in probes]


class _Ids:
    def __init__(self, start=0):
        self.next = start

    def __call__(self):
        self.next += 1
        return self.next - 1


def _fan_fronts(strip, left, right, t, x, new_id):
    fan = solve_riemann_hyst(RiemannData(strip, left, right))
    return [Front(new_id(), t, x, f.speed, f.left, f.right) for f in fan.fronts]


def init_state(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile, strip: HysteresisStrip,
               _ids=None) -> SimState:
    bps, pairs = pair_profiles(u0, w0)
    for (u, w), x in zip(pairs, [None] + bps):
        if not strip.contains(u, w):
            where = "left of the first breakpoint" if x is None else f"right of x={x}"
            raise InfeasibleData(f"|u0 - w0| = {abs(u - w)} > a = {strip.a} {where}")
    new_id = _ids or _Ids()
    states = [PlayState(u, w) for u, w in pairs]
    fronts = []
    for i, x in enumerate(bps):
        fronts += _fan_fronts(strip, states[i], states[i + 1], Fraction(0), x, new_id)
    return SimState(Fraction(0), tuple(fronts), states[0], states[-1])


def _collision_time(state: SimState, i: int):
    f, g = state.fronts[i], state.fronts[i + 1]
    if f.speed <= g.speed:
        return None
    gap = g.position(state.time) - f.position(state.time)
    return state.time + gap / (f.speed - g.speed)


def next_events(state: SimState):
    """All collisions at the earliest collision time, one Event per location,
    ordered by ``x``.  Fronts meeting at one point form a single Event."""
    times = [_collision_time(state, i) for i in range(len(state.fronts) - 1)]
    pending = [t for t in times if t is not None]
    if not pending:
        return []
    t_min = min(pending)
    events = []
    i = 0
    fronts = state.fronts
    while i < len(fronts) - 1:
        if times[i] != t_min:
            i += 1
            continue
        x = fronts[i].position(t_min)
        j = i + 1
        while j < len(fronts) and fronts[j].position(t_min) == x:
            j += 1
        k = i
        while k > 0 and fronts[k - 1].position(t_min) == x:
            k -= 1
        events.append(Event(t_min, x, tuple(f.id for f in fronts[k:j])))
        i = j
    return events


def next_event(state: SimState):
    """Earliest future collision (leftmost on ties), or ``None``."""
    events = next_events(state)
    return events[0] if events else None


def resolve_event(state: SimState, event: Event, strip: HysteresisStrip, _ids=None):
    """Replace the colliding fronts by the fan of the local Riemann problem.

    Returns ``(new_state, EventRecord)``.
    """
    ids = [f.id for f in state.fronts]
    try:
        start = ids.index(event.ids[0])
    except ValueError:
        raise StaleEvent(f"front {event.ids[0]} is not alive") from None
    stop = start + len(event.ids)
    if tuple(ids[start:stop]) != tuple(event.ids):
        raise StaleEvent("event fronts are not contiguous in the state")
    if event.t < state.time:
        raise StaleEvent(f"event at t={event.t} precedes state time {state.time}")
    consumed = state.fronts[start:stop]
    for f in consumed:
        if f.position(event.t) != event.x:
            raise StaleEvent(f"front {f.id} is not at x={event.x} at t={event.t}")
    new_id = _ids or _Ids(max(ids) + 1)
    born = _fan_fronts(strip, consumed[0].left, consumed[-1].right, event.t, event.x, new_id)
    fronts = state.fronts[:start] + tuple(born) + state.fronts[stop:]
    new_state = SimState(event.t, fronts, state.far_left, state.far_right)
    record = EventRecord(
        t=event.t, x=event.x,
        consumed=tuple(event.ids), produced=tuple(f.id for f in born),
        consumed_speeds=tuple(f.speed for f in consumed),
        tv_u_before=state.tv_u(), tv_u_after=new_state.tv_u(),
        tv_w_before=state.tv_w(), tv_w_after=new_state.tv_w(),
    )
    return new_state, record


def run_stepwise(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile, strip: HysteresisStrip, T,
                 max_events=1_000_000) -> Trajectory:
    """Reference driver: alternate :func:`next_event` and :func:`resolve_event`
    on immutable states.  Quadratic in the number of fronts; :func:`run` gives
    identical trajectories faster."""
    T = q(T)
    if T <= 0:
        raise ValueError("horizon T must be positive")
    new_id = _Ids()
    state = init_state(u0, w0, strip, new_id)
    traj = Trajectory(strip, u0.normalized(), w0.normalized(), T, initial=state)
    for f in state.fronts:
        traj.history[f.id] = FrontRecord(f)
    while True:
        event = next_event(state)
        if event is None or event.t > T:
            break
        if len(traj.events) >= max_events:
            raise RuntimeError(f"event budget of {max_events} exhausted at t={state.time}")
        state, record = resolve_event(state, event, strip, new_id)
        for fid in record.consumed:
            traj.history[fid].t_death = event.t
        for f in state.fronts:
            if f.id in record.produced:
                traj.history[f.id] = FrontRecord(f)
        traj.events.append(record)
    traj.final = state
    return traj


def _meet_time(f: Front, g: Front):
    if f.speed <= g.speed:
        return None
    return ((g.x_birth - g.speed * g.t_birth) - (f.x_birth - f.speed * f.t_birth)) / (f.speed - g.speed)


def run(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile, strip: HysteresisStrip, T,
        max_events=1_000_000) -> Trajectory:
    """Track fronts up to time ``T``.

    Collisions at ``t <= T`` are resolved, so sampling at ``T`` yields the right
    limit.  Uses a heap of adjacent-pair meeting times over a linked list of
    fronts; simultaneous collisions pop left to right.
    """
    T = q(T)
    if T <= 0:
        raise ValueError("horizon T must be positive")
    new_id = _Ids()
    state = init_state(u0, w0, strip, new_id)
    traj = Trajectory(strip, u0.normalized(), w0.normalized(), T, initial=state)
    alive = {}
    prev, nxt = {}, {}
    order = list(state.fronts)
    for i, f in enumerate(order):
        alive[f.id] = f
        traj.history[f.id] = FrontRecord(f)
        prev[f.id] = order[i - 1].id if i > 0 else None
        nxt[f.id] = order[i + 1].id if i + 1 < len(order) else None
    head = order[0].id if order else None
    heap = []

    def push(lid, rid):
        if lid is None or rid is None:
            return
        t = _meet_time(alive[lid], alive[rid])
        if t is not None:
            heapq.heappush(heap, (t, alive[lid].position(t), lid, rid))

    for f, g in zip(order, order[1:]):
        push(f.id, g.id)
    tv_u, tv_w = state.tv_u(), state.tv_w()
    now = Fraction(0)
    while heap:
        t, x, lid, rid = heap[0]
        if lid not in alive or rid not in alive or nxt[lid] != rid:
            heapq.heappop(heap)
            continue
        if t > T:
            break
        heapq.heappop(heap)
        if len(traj.events) >= max_events:
            raise RuntimeError(f"event budget of {max_events} exhausted at t={t}")
        first, last = lid, rid
        while prev[first] is not None and alive[prev[first]].position(t) == x:
            first = prev[first]
        while nxt[last] is not None and alive[nxt[last]].position(t) == x:
            last = nxt[last]
        cluster = [first]
        while cluster[-1] != last:
            cluster.append(nxt[cluster[-1]])
        consumed = [alive[i] for i in cluster]
        born = _fan_fronts(strip, consumed[0].left, consumed[-1].right, t, x, new_id)
        before_u, before_w = tv_u, tv_w
        for f in consumed:
            tv_u -= abs(f.right.u - f.left.u)
            tv_w -= abs(f.right.w - f.left.w)
        for f in born:
            tv_u += abs(f.right.u - f.left.u)
            tv_w += abs(f.right.w - f.left.w)
        left_nb, right_nb = prev[first], nxt[last]
        for fid in cluster:
            del alive[fid], prev[fid], nxt[fid]
            traj.history[fid].t_death = t
        chain = [left_nb] + [f.id for f in born] + [right_nb]
        for f in born:
            alive[f.id] = f
            traj.history[f.id] = FrontRecord(f)
        for a, b in zip(chain, chain[1:]):
            if a is not None:
                nxt[a] = b
            else:
                head = b
            if b is not None:
                prev[b] = a
        push(chain[0], chain[1])
        push(chain[-2], chain[-1])
        traj.events.append(EventRecord(
            t=t, x=x, consumed=tuple(cluster), produced=tuple(f.id for f in born),
            consumed_speeds=tuple(f.speed for f in consumed),
            tv_u_before=before_u, tv_u_after=tv_u, tv_w_before=before_w, tv_w_after=tv_w,
        ))
        now = t
    fronts = []
    cur = head
    while cur is not None:
        fronts.append(alive[cur])
        cur = nxt[cur]
    traj.final = SimState(now, tuple(fronts), state.far_left, state.far_right)
    return traj


def alive_fronts(traj: Trajectory, t):
    t = q(t)
    alive = [rec.front for rec in traj.history.values() if rec.alive_at(t)]
    alive.sort(key=lambda f: (f.position(t), f.speed))
    return alive


def sample(traj: Trajectory, t):
    """Exact ``(u, w)`` profiles at time ``t`` (right limit at event times)."""
    t = q(t)
    if t < 0 or t > traj.T:
        raise ValueError(f"t={t} outside [0, {traj.T}]")
    fronts = alive_fronts(traj, t)
    far = traj.initial.far_left
    u = PiecewiseConstantProfile.from_jumps(far.u, [(f.position(t), f.right.u) for f in fronts])
    w = PiecewiseConstantProfile.from_jumps(far.w, [(f.position(t), f.right.w) for f in fronts])
    return u, w


def total_variation(profile: PiecewiseConstantProfile) -> Fraction:
    return profile.total_variation()


def reachable_values(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile, strip: HysteresisStrip):
    """The finite set of values ``u`` can ever take: initial u- and w-values
    shifted by integer multiples of ``a``, kept inside ``[min u0, max u0]``."""
    a = strip.a
    u_lo, u_hi = min(u0.values), max(u0.values)
    out = set()
    for c in set(u0.values) | set(w0.values):
        for k in range(ceil((u_lo - c) / a), floor((u_hi - c) / a) + 1):
            out.add(c + k * a)
    return sorted(out)


def delta_floor(u0: PiecewiseConstantProfile, w0: PiecewiseConstantProfile, strip: HysteresisStrip):
    """Smallest gap of :func:`reachable_values`; ``None`` when the set is a
    single point (then no u-fronts can exist and no u-u interaction happens)."""
    vals = reachable_values(u0, w0, strip)
    if len(vals) < 2:
        return None
    return min(b - a for a, b in zip(vals, vals[1:]))


def event_budget(traj: Trajectory):
    """A-priori event-count bound ``TV(u0)/(2 delta) + n_u * (n_0 + TV(u0)/(2 delta))``
    with ``n_u`` the initial u-carrying fronts and ``n_0`` the initial standing
    w-fronts."""
    delta = delta_floor(traj.u0, traj.w0, traj.strip)
    n_u = sum(1 for f in traj.initial.fronts if f.speed > 0)
    n_0 = sum(1 for f in traj.initial.fronts if f.speed == 0)
    if delta is None:
        uu = Fraction(0)
    else:
        uu = traj.initial.tv_u() / (2 * delta)
    return uu + n_u * (n_0 + uu)


def require_delta(u0, w0, strip) -> Fraction:
    delta = delta_floor(u0, w0, strip)
    if delta is None:
        raise DegenerateData("reachable value set is a single point")
    return delta
