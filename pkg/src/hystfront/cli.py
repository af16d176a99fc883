"""Command-line driver: ``hystfront {solve,riemann,verify,converge}``.

Output files (all rationals as ``"p/q"``):

``fronts.csv``
    ``id,t_birth,x_birth,speed,u_l,w_l,u_r,w_r,t_death`` (empty ``t_death`` for
    fronts alive at the horizon).
``events.csv``
    ``t,x,consumed,produced,tv_u_before,tv_u_after,tv_w_before,tv_w_after``;
    id lists are ``;``-separated.
``snapshots.csv``
    ``t,breakpoints,u_values,w_values``; each list is ``;``-separated and the
    value lists include both far values.
``diagnostics.json``
    TV timeline, ``delta``, event budget and (with ``--verify``) the
    verification report.
``fan.csv``
    ``speed,u_l,w_l,u_r,w_r`` for ``riemann``.
``converge.csv``
    ``level,n,distance,tv_u,tv_w,events,budget`` for ``converge``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input.
"""
import argparse
import csv
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import HystError, SpecParseError
from .problem import ProblemSpec, load_spec, parse_spec
from .rational import fmt, q
from .riemann import RiemannData, solve_riemann_hyst
from .tracking import delta_floor, event_budget, pair_profiles, run, sample
from .verification import TestBump, spacetime_l1_distance, verify_trajectory

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2

FRONT_HEADER = ["id", "t_birth", "x_birth", "speed", "u_l", "w_l", "u_r", "w_r", "t_death"]
EVENT_HEADER = ["t", "x", "consumed", "produced", "tv_u_before", "tv_u_after", "tv_w_before", "tv_w_after"]
SNAPSHOT_HEADER = ["t", "breakpoints", "u_values", "w_values"]
FAN_HEADER = ["speed", "u_l", "w_l", "u_r", "w_r"]
CONVERGE_HEADER = ["level", "n", "distance", "tv_u", "tv_w", "events", "budget"]


def _data_dir():
    return resources.files("hystfront") / "data"


def bundled_examples():
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".spec"))


def load_example(name: str) -> ProblemSpec:
    path = _data_dir() / f"{name}.spec"
    if not path.is_file():
        raise SpecParseError(f"unknown example {name!r}; choose from {', '.join(bundled_examples())}")
    return parse_spec(path.read_text(encoding="utf-8"))


def _to_json(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_json(v) for v in obj]
    return obj


def _rationals(text: str, flag: str):
    try:
        return [q(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"{flag} expects comma-separated rationals, got {text!r}", field=flag) from None


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_opt(v):
    return "" if v is None else fmt(v)


def front_rows(traj):
    for fid in sorted(traj.history):
        rec = traj.history[fid]
        f = rec.front
        yield [f.id, fmt(f.t_birth), fmt(f.x_birth), fmt(f.speed),
               fmt(f.left.u), fmt(f.left.w), fmt(f.right.u), fmt(f.right.w), _fmt_opt(rec.t_death)]


def event_rows(traj):
    for e in traj.events:
        yield [fmt(e.t), fmt(e.x), ";".join(map(str, e.consumed)), ";".join(map(str, e.produced)),
               fmt(e.tv_u_before), fmt(e.tv_u_after), fmt(e.tv_w_before), fmt(e.tv_w_after)]


def snapshot_rows(traj, times, window=None):
    for t in times:
        u, w = sample(traj, t)
        if window is not None:
            u, w = u.restrict(*window), w.restrict(*window)
        bps = sorted(set(u.breakpoints) | set(w.breakpoints))
        if bps:
            u, w = u.refine(bps), w.refine(bps)
        yield [fmt(t), ";".join(map(fmt, bps)), ";".join(map(fmt, u.values)), ";".join(map(fmt, w.values))]


def tv_timeline(traj):
    line = [{"t": Fraction(0), "tv_u": traj.initial.tv_u(), "tv_w": traj.initial.tv_w()}]
    for e in traj.events:
        line.append({"t": e.t, "tv_u": e.tv_u_after, "tv_w": e.tv_w_after})
    return line


def default_checks(spec: ProblemSpec, traj):
    """Bumps inside the window and time pairs spread over ``[0, T]``."""
    T = spec.T
    x_min, x_max = spec.window if spec.window else (Fraction(-1), Fraction(1))
    width = x_max - x_min
    bumps = [TestBump(float(x_min + width * k / 4), float(T / 2), float(width / 4), float(T / 4))
             for k in (1, 2, 3)]
    times = [T / 2, T]
    pairs = [(Fraction(0), T / 2), (T / 4, T)]
    return times, bumps, pairs


def _options(spec: ProblemSpec, args):
    window = spec.window
    if args.window:
        win = _rationals(args.window, "--window")
        if len(win) != 2 or win[0] >= win[1]:
            raise SpecParseError("--window expects x_min,x_max with x_min < x_max", field="--window")
        window = tuple(win)
    times = spec.snapshot_times or [Fraction(0), spec.T]
    if args.snapshot_times:
        times = _rationals(args.snapshot_times, "--snapshot-times")
    if any(t < 0 or t > spec.T for t in times):
        raise SpecParseError(f"snapshot times must lie in [0, {fmt(spec.T)}]", field="--snapshot-times")
    return window, times


def _print_table(header, rows, out=None):
    out = out or sys.stdout
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=out)
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)), file=out)


def cmd_solve(spec: ProblemSpec, args) -> int:
    window, times = _options(spec, args)
    u0, w0 = spec.initial_data()
    traj = run(u0, w0, spec.strip, spec.T)
    diagnostics = {
        "name": spec.name,
        "a": spec.a,
        "T": spec.T,
        "fronts": len(traj.history),
        "events": len(traj.events),
        "delta": delta_floor(u0, w0, spec.strip),
        "event_budget": event_budget(traj),
        "tv_timeline": tv_timeline(traj),
    }
    code = EXIT_OK
    if args.verify or spec.verify:
        report = verify_trajectory(traj, *default_checks(spec, traj))
        diagnostics["verification"] = report
        code = EXIT_OK if report["ok"] else EXIT_VERIFY
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "fronts.csv", FRONT_HEADER, front_rows(traj))
        _write_csv(out / "events.csv", EVENT_HEADER, event_rows(traj))
        _write_csv(out / "snapshots.csv", SNAPSHOT_HEADER, snapshot_rows(traj, times, window))
        with open(out / "diagnostics.json", "w", encoding="utf-8") as fh:
            json.dump(_to_json(diagnostics), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"{spec.name}: a={fmt(spec.a)} T={fmt(spec.T)}")
    _print_table(["quantity", "value"], [
        ["fronts", len(traj.history)],
        ["events", len(traj.events)],
        ["event budget", fmt(diagnostics["event_budget"])],
        ["delta", _fmt_opt(diagnostics["delta"]) or "none"],
        ["TV(u) 0 -> T", f"{fmt(traj.initial.tv_u())} -> {fmt(traj.final.tv_u())}"],
        ["TV(w) 0 -> T", f"{fmt(traj.initial.tv_w())} -> {fmt(traj.final.tv_w())}"],
    ] + ([["verification", "ok" if code == EXIT_OK else "FAILED"]] if "verification" in diagnostics else []))
    return code


def cmd_riemann(spec: ProblemSpec, args) -> int:
    u0, w0 = spec.initial_data()
    bps, pairs = pair_profiles(u0, w0)
    if len(bps) != 1:
        raise SpecParseError(f"riemann needs data with exactly one jump, found {len(bps)}", field="u0.breaks")
    (ul, wl), (ur, wr) = pairs
    fan = solve_riemann_hyst(RiemannData.of(spec.a, ul, wl, ur, wr))
    rows = [[fmt(f.speed), fmt(f.left.u), fmt(f.left.w), fmt(f.right.u), fmt(f.right.w)] for f in fan.fronts]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "fan.csv", FAN_HEADER, rows)
    print(f"{spec.name}: Riemann fan at x={fmt(bps[0])}")
    _print_table(FAN_HEADER, rows)
    return EXIT_OK


def cmd_verify(spec: ProblemSpec, args) -> int:
    u0, w0 = spec.initial_data()
    traj = run(u0, w0, spec.strip, spec.T)
    report = verify_trajectory(traj, *default_checks(spec, traj))
    text = json.dumps(_to_json(report), indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verification.json").write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    print(f"{spec.name}: verification {'ok' if report['ok'] else 'FAILED'}",
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if report["ok"] else EXIT_VERIFY


def converge_table(spec: ProblemSpec, levels):
    """One row per level: ``n``, distance to the previous level, TVs, events, budget."""
    rows, prev = [], None
    for level, n in enumerate(levels):
        u0, w0 = spec.initial_data(n)
        traj = run(u0, w0, spec.strip, spec.T)
        dist = None if prev is None else spacetime_l1_distance(prev, traj)
        rows.append({"level": level, "n": n, "distance": dist, "tv_u": u0.total_variation(),
                     "tv_w": w0.total_variation(), "events": len(traj.events), "budget": event_budget(traj)})
        prev = traj
    return rows


def cmd_converge(spec: ProblemSpec, args) -> int:
    levels = spec.levels
    if args.levels:
        try:
            levels = [int(v) for v in args.levels.split(",")]
        except ValueError:
            raise SpecParseError(f"--levels expects comma-separated integers, got {args.levels!r}",
                                 field="--levels") from None
    if len(levels) < 2 or any(n < 1 for n in levels):
        raise SpecParseError("converge needs at least two positive levels", field="levels")
    rows = converge_table(spec, levels)
    dists = [r["distance"] for r in rows[1:]]
    monotone = all(b <= a for a, b in zip(dists, dists[1:]))
    bounded = all(r["events"] <= r["budget"] for r in rows)
    table = [[r["level"], r["n"], "" if r["distance"] is None else f"{r['distance']:.6g}",
              fmt(r["tv_u"]), fmt(r["tv_w"]), r["events"], fmt(r["budget"])] for r in rows]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "converge.csv", CONVERGE_HEADER, table)
    print(f"{spec.name}: convergence over levels {levels}")
    _print_table(CONVERGE_HEADER, table)
    print(f"distances non-increasing: {monotone}; events within budget: {bounded}")
    if args.verify and not (monotone and bounded):
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "riemann": cmd_riemann, "verify": cmd_verify, "converge": cmd_converge}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hystfront", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "track fronts and write CSV/JSON outputs",
        "riemann": "print the fan of a single-jump problem",
        "verify": "run the exact verification checks",
        "converge": "self-convergence study over refinement levels",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--spec", metavar="PATH", help="problem file")
        src.add_argument("--example", metavar="NAME", help="bundled problem (" + ", ".join(bundled_examples()) + ")")
        p.add_argument("--out", metavar="DIR", help="directory for output files")
        p.add_argument("--verify", action="store_true", help="run verification and set the exit code")
        p.add_argument("--window", metavar="XMIN,XMAX", help="spatial window for snapshots")
        p.add_argument("--snapshot-times", metavar="T1,T2,...", help="snapshot times")
        p.add_argument("--levels", metavar="N1,N2,...", help="pieces per convergence level")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec) if args.spec else load_example(args.example)
        return COMMANDS[args.command](spec, args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HystError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
