"""Problem files and BV-data coarsening.

A problem file is line oriented ``key = value`` with JSON values; rationals
are written as ``"p/q"`` strings.  Blank lines and ``#`` comments are ignored::

    name = "case-a2"
    a = "1"
    T = "4"
    window = ["-2", "6"]
    u0.breaks = ["0"]
    u0.values = ["0", "2"]
    w0.breaks = ["0"]
    w0.values = ["0", "3/2"]

Instead of ``u0.*``/``w0.*`` a ``tabulation`` of ``[x, u, w]`` rows may be
given: row ``i`` holds on ``[x_i, x_{i+1})``, the first row's values extend to
``-inf`` and the last row's to ``+inf``.  ``pieces`` selects how many
equal cells :func:`coarsen_bv` samples it into.
"""
import json
from dataclasses import dataclass, field, fields
from fractions import Fraction

from .errors import InfeasibleData, SpecParseError
from .play import HysteresisStrip
from .profile import PiecewiseConstantProfile
from .rational import fmt, q
from .tracking import pair_profiles

_RATIONAL_KEYS = {"a", "T"}
_KNOWN = {"name", "a", "T", "window", "u0.breaks", "u0.values", "w0.breaks", "w0.values",
          "tabulation", "pieces", "levels", "verify", "snapshot_times"}


@dataclass
class ProblemSpec:
    a: Fraction
    T: Fraction
    name: str = "problem"
    u0: PiecewiseConstantProfile = None
    w0: PiecewiseConstantProfile = None
    tabulation: list = None
    pieces: int = None
    window: tuple = None
    levels: list = field(default_factory=list)
    verify: bool = False
    snapshot_times: list = field(default_factory=list)

    @property
    def strip(self) -> HysteresisStrip:
        return HysteresisStrip(self.a)

    def initial_data(self, pieces=None):
        """``(u0, w0)`` profiles, coarsening a tabulation if that is what was given."""
        if self.u0 is not None:
            return self.u0, self.w0
        n = pieces or self.pieces
        if n is None:
            raise SpecParseError("tabulated data need 'pieces' (or explicit levels)", field="pieces")
        return coarsen_bv(self.tabulation, n, self.strip)

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))


def _rational(value, line, key):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SpecParseError(f"expected a \"p/q\" string or integer, got {value!r}", line, key)
    try:
        return q(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"bad rational {value!r}: {exc}", line, key) from None


def _rational_list(value, line, key):
    if not isinstance(value, list):
        raise SpecParseError("expected a JSON array", line, key)
    return [_rational(v, line, key) for v in value]


def parse_spec(text: str) -> ProblemSpec:
    raw, where = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise SpecParseError("expected 'key = value'", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN:
            raise SpecParseError("unknown key", lineno, key)
        if key in raw:
            raise SpecParseError("duplicate key", lineno, key)
        try:
            raw[key] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON value: {exc.msg}", lineno, key) from None
        where[key] = lineno

    for key in ("a", "T"):
        if key not in raw:
            raise SpecParseError("missing required key", field=key)
    spec = ProblemSpec(a=_rational(raw["a"], where["a"], "a"), T=_rational(raw["T"], where["T"], "T"))
    if spec.a <= 0:
        raise SpecParseError("strip half-width must be positive", where["a"], "a")
    if spec.T <= 0:
        raise SpecParseError("horizon must be positive", where["T"], "T")
    if "name" in raw:
        spec.name = str(raw["name"])

    explicit = [k for k in ("u0.breaks", "u0.values", "w0.breaks", "w0.values") if k in raw]
    if explicit and "tabulation" in raw:
        raise SpecParseError("give either u0/w0 arrays or a tabulation, not both", where["tabulation"], "tabulation")
    if explicit:
        for k in ("u0.breaks", "u0.values", "w0.breaks", "w0.values"):
            if k not in raw:
                raise SpecParseError("missing key", field=k)
        profiles = {}
        for name in ("u0", "w0"):
            bps = _rational_list(raw[f"{name}.breaks"], where[f"{name}.breaks"], f"{name}.breaks")
            vals = _rational_list(raw[f"{name}.values"], where[f"{name}.values"], f"{name}.values")
            try:
                profiles[name] = PiecewiseConstantProfile(tuple(bps), tuple(vals))
            except ValueError as exc:
                raise SpecParseError(str(exc), where[f"{name}.values"], f"{name}.values") from None
        spec.u0, spec.w0 = profiles["u0"], profiles["w0"]
        _check_feasible(spec.u0, spec.w0, spec.strip, where.get("u0.values"))
    elif "tabulation" in raw:
        rows = raw["tabulation"]
        line = where["tabulation"]
        if not isinstance(rows, list) or not rows:
            raise SpecParseError("expected a non-empty array of [x, u, w] rows", line, "tabulation")
        table = []
        for row in rows:
            if not isinstance(row, list) or len(row) != 3:
                raise SpecParseError(f"row {row!r} is not [x, u, w]", line, "tabulation")
            table.append(tuple(_rational(v, line, "tabulation") for v in row))
        if any(b[0] <= a[0] for a, b in zip(table, table[1:])):
            raise SpecParseError("tabulation x must be strictly increasing", line, "tabulation")
        for x, u, w in table:
            if abs(u - w) > spec.a:
                raise SpecParseError(f"infeasible row at x={x}: |u - w| > a", line, "tabulation")
        spec.tabulation = table
    else:
        raise SpecParseError("no initial data: give u0/w0 arrays or a tabulation")

    if "pieces" in raw:
        if not isinstance(raw["pieces"], int) or raw["pieces"] < 1:
            raise SpecParseError("expected a positive integer", where["pieces"], "pieces")
        spec.pieces = raw["pieces"]
    if "window" in raw:
        win = _rational_list(raw["window"], where["window"], "window")
        if len(win) != 2 or win[0] >= win[1]:
            raise SpecParseError("expected [x_min, x_max] with x_min < x_max", where["window"], "window")
        spec.window = tuple(win)
    if "levels" in raw:
        lv = raw["levels"]
        if not isinstance(lv, list) or not all(isinstance(n, int) and n > 0 for n in lv):
            raise SpecParseError("expected an array of positive integers", where["levels"], "levels")
        spec.levels = list(lv)
    if "verify" in raw:
        if not isinstance(raw["verify"], bool):
            raise SpecParseError("expected true or false", where["verify"], "verify")
        spec.verify = raw["verify"]
    if "snapshot_times" in raw:
        spec.snapshot_times = _rational_list(raw["snapshot_times"], where["snapshot_times"], "snapshot_times")
    return spec


def _check_feasible(u0, w0, strip, line):
    bps, pairs = pair_profiles(u0, w0)
    for u, w in pairs:
        if not strip.contains(u, w):
            raise SpecParseError(f"infeasible initial pair (u, w) = ({fmt(u)}, {fmt(w)})", line, "u0.values")


def serialize_spec(spec: ProblemSpec) -> str:
    dump = lambda v: json.dumps(v)
    lines = [f"name = {dump(spec.name)}", f"a = {dump(fmt(spec.a))}", f"T = {dump(fmt(spec.T))}"]
    if spec.u0 is not None:
        for name, prof in (("u0", spec.u0), ("w0", spec.w0)):
            lines.append(f"{name}.breaks = {dump([fmt(x) for x in prof.breakpoints])}")
            lines.append(f"{name}.values = {dump([fmt(v) for v in prof.values])}")
    else:
        lines.append(f"tabulation = {dump([[fmt(v) for v in row] for row in spec.tabulation])}")
    if spec.pieces is not None:
        lines.append(f"pieces = {spec.pieces}")
    if spec.window is not None:
        lines.append(f"window = {dump([fmt(x) for x in spec.window])}")
    if spec.levels:
        lines.append(f"levels = {dump(spec.levels)}")
    if spec.verify:
        lines.append("verify = true")
    if spec.snapshot_times:
        lines.append(f"snapshot_times = {dump([fmt(t) for t in spec.snapshot_times])}")
    return "\n".join(lines) + "\n"


def load_spec(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def tabulation_profiles(table):
    """Exact ``(u, w)`` profiles of a tabulation (cells, not interpolation)."""
    xs = tuple(row[0] for row in table[1:])
    u = PiecewiseConstantProfile(xs, tuple(row[1] for row in table))
    w = PiecewiseConstantProfile(xs, tuple(row[2] for row in table))
    return u, w


def coarsen_bv(table, n_pieces: int, strip: HysteresisStrip = None):
    """Piecewise-constant approximants with ``n_pieces`` equal cells over the
    tabulated range, each cell taking the tabulated value at its midpoint.

    Point sampling cannot increase total variation, and sampled pairs inherit
    feasibility from the tabulation.
    """
    if n_pieces < 1:
        raise ValueError("n_pieces must be positive")
    table = [tuple(q(v) for v in row) for row in table]
    if strip is not None:
        for x, u, w in table:
            if not strip.contains(u, w):
                raise InfeasibleData(f"tabulated pair at x={x} is outside the strip")
    u_tab, w_tab = tabulation_profiles(table)
    x0, x1 = table[0][0], table[-1][0]
    if x1 == x0:
        return u_tab, w_tab
    h = (x1 - x0) / n_pieces
    edges = [x0 + k * h for k in range(n_pieces + 1)]
    mids = [(a + b) / 2 for a, b in zip(edges, edges[1:])]
    left, right = table[0], table[-1]
    u_vals = (left[1],) + tuple(u_tab.value_at(m) for m in mids) + (right[1],)
    w_vals = (left[2],) + tuple(w_tab.value_at(m) for m in mids) + (right[2],)
    u = PiecewiseConstantProfile(tuple(edges), u_vals).normalized()
    w = PiecewiseConstantProfile(tuple(edges), w_vals).normalized()
    return u, w
