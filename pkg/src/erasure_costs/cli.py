"""Command-line front end.

Exit codes: 0 success, 1 invariant/verification failure, 2 invalid arguments,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds, ensemble, finite_bath, protocol, reservoirs, verify
from .errors import DomainError, NumericalError

LN2 = math.log(2.0)
CSV_DIGITS = 12

LEDGER_COLUMNS = ["cycle", "p1", "spin_cost", "energy_cost", "cum_spin", "cum_energy",
                  "residual_entropy"]
BOUNDS_COLUMNS = ["x", "alpha", "series", "lower", "upper", "primed_lower", "primed_upper",
                  "combined", "hamming_bound"]
FINITE_COLUMNS = ["cycle", "p1_exact", "p1_ideal", "deviation", "dS_bath", "dS_chain", "dS_total"]
ARCHETYPAL_COLUMNS = ["E", "p1", "W"]


class InvariantViolation(Exception):
    """A value about to be emitted breaks a module invariant."""


# -- argument handling ------------------------------------------------------------

def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or comma-separated numbers, got {text!r}")


def _as_list(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, str):
        return _float_list(value)
    return [float(value)]


def resolve_gaps(args) -> list[float]:
    """Gap ratios from exactly one of --x, (--epsilon, --kT), --gamma, --alpha."""
    xs, alphas, gammas = _as_list(args.x), _as_list(args.alpha), _as_list(args.gamma)
    pair = args.epsilon is not None and args.kT is not None
    sources = [name for name, present in (("--x", xs is not None), ("--epsilon/--kT", pair),
                                          ("--gamma", gammas is not None),
                                          ("--alpha", alphas is not None)) if present]
    if len(sources) > 1:
        raise DomainError("conflicting gap specifications: " + ", ".join(sources))
    if xs is not None:
        return xs
    if pair:
        if not args.kT > 0:
            raise reservoirs.NonpositiveTemperature(f"kT must be positive, got {args.kT}")
        return [args.epsilon / args.kT]
    if gammas is not None:
        return [g * args.hbar for g in gammas]
    if alphas is not None:
        return [reservoirs.x_from_alpha(a) for a in alphas]
    raise DomainError("no gap ratio given: use --x, --epsilon with --kT, --gamma or --alpha")


def resolve_gap(args) -> float:
    xs = resolve_gaps(args)
    if len(xs) != 1:
        raise DomainError(f"{args.command} takes a single gap ratio, got {len(xs)}")
    return xs[0]


def _add_gap_flags(p):
    g = p.add_argument_group("gap ratio (give exactly one)")
    g.add_argument("--x", type=_float_list, help="dimensionless gap ratio")
    g.add_argument("--alpha", type=_float_list, help="bath logical-1 population")
    g.add_argument("--epsilon", type=float, help="Zeeman splitting (also the energy unit)")
    g.add_argument("--kT", type=float, help="bath temperature in energy units")
    g.add_argument("--gamma", type=_float_list, help="spin Lagrange multiplier")
    g.add_argument("--hbar", type=float, default=1.0, help="angular momentum unit")


def _add_output_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--config", type=Path, help="JSON file supplying any flag")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="erasure-costs",
        description="Erasure costs against thermal and spin reservoirs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("archetypal", help="quasi-static Landauer work for a thermal memory")
    p.add_argument("--kT", type=float, default=1.0)
    p.add_argument("--E-max", dest="E_max", type=float, default=50.0)
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature relative tolerance")
    p.add_argument("--points", type=int, default=101, help="rows in the work table")
    _add_output_flags(p)
    subs["archetypal"] = p

    p = sub.add_parser("erase", help="cycle ledger of the spin-reservoir protocol")
    _add_gap_flags(p)
    p.add_argument("--mode", choices=("zeeman", "degenerate"), default="degenerate")
    stop = p.add_mutually_exclusive_group()
    stop.add_argument("--cycles", type=int, help="number of cycles M")
    stop.add_argument("--target-entropy", dest="target_entropy", type=float,
                      help="stop once the memory entropy (nats) is at most this")
    p.add_argument("--include-initial", dest="include_initial", action="store_true",
                   help="add the initial memory spin's hbar/2 to the spin total")
    _add_output_flags(p)
    subs["erase"] = p

    p = sub.add_parser("bounds", help="series, brackets and lower bounds over a sweep")
    _add_gap_flags(p)
    p.add_argument("--grid", type=_float_list,
                   help="log-spaced x sweep as LO,HI,COUNT (instead of a gap flag)")
    p.add_argument("--tol", type=float, default=protocol.DEFAULT_TAIL_TOL,
                   help="series tail tolerance")
    _add_output_flags(p)
    subs["bounds"] = p

    p = sub.add_parser("finite", help="exact small-bath erasure")
    _add_gap_flags(p)
    p.add_argument("--N", type=int, required=False)
    p.add_argument("--cycles", type=int, default=1)
    _add_output_flags(p)
    subs["finite"] = p

    p = sub.add_parser("ensemble", help="seeded Monte Carlo ensembles")
    _add_gap_flags(p)
    p.add_argument("--kind", choices=("trajectory", "residual"), default="trajectory")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--cycles", type=int, help="cycles per trial (default: series tail < 1e-14)")
    p.add_argument("--field", default="none",
                   help="none | uniform:HALF_WIDTH | gaussian:STD | constant:VALUE")
    p.add_argument("--workers", type=int, default=1)
    _add_output_flags(p)
    p.set_defaults(format="json")
    subs["ensemble"] = p

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--json", action="store_true", help="machine-readable results")
    p.add_argument("--config", type=Path, help=argparse.SUPPRESS)
    subs["verify"] = p
    return parser, subs


def parse_args(argv=None):
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config file must hold a JSON object")
        known = set(vars(args))
        unknown = sorted(set(cfg) - known)
        if unknown:
            parser.error("unknown config keys: " + ", ".join(unknown))
        if "out" in cfg and cfg["out"] is not None:
            cfg["out"] = Path(cfg["out"])
        subs[args.command].set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


# -- output ------------------------------------------------------------------------

def _fmt_csv(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{CSV_DIGITS}g")
    return str(value)


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_csv(row[c]) for c in columns])
    return buf.getvalue()


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_json(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly.
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _config_of(args):
    skip = {"out", "config", "format", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _document(args, results, seed=None):
    return {
        "config": _config_of(args),
        "results": results,
        "provenance": {"tool": "erasure-costs", "version": __version__, "seed": seed},
    }


def emit(args, results, rows=None, columns=None, seed=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if args.format == "json":
        payload = dict(results)
        if rows is not None:
            payload["rows"] = [{c: r[c] for c in columns} for r in rows]
        text = to_json(_document(args, payload, seed))
        _write(args.out, text, stdout)
        return
    if rows is None:
        rows, columns = [results], list(results)
    _write(args.out, to_csv(rows, columns), stdout)
    summary = to_json(_document(args, results, seed))
    if args.out is not None:
        Path(str(args.out) + ".json").write_text(summary, encoding="utf-8", newline="\n")
    else:
        stderr.write(summary)


def _write(path, text, stream):
    if path is None:
        stream.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


# -- subcommands -----------------------------------------------------------------

def cmd_archetypal(args, **io_kw):
    if args.points < 1:
        raise DomainError("--points must be >= 1")
    W = reservoirs.landauer_work(args.kT, args.E_max, args.tol)
    grid = [0.0] if args.E_max == 0 else np.linspace(0.0, args.E_max, max(args.points, 2))
    rows = []
    for E in grid:
        E = float(E)
        rows.append({"E": E, "p1": reservoirs.memory_equilibrium(E, args.kT)[1],
                     "W": reservoirs.landauer_work(args.kT, E, args.tol)})
    prev = -math.inf
    for r in rows:
        if r["W"] < prev - 1e-15 or r["W"] > args.kT * LN2 * (1 + 1e-12):
            raise InvariantViolation(f"work not monotone or above kT ln 2 at E={r['E']}")
        prev = r["W"]
    results = {"W": W, "kT_ln2": args.kT * LN2, "W_minus_kT_ln2": W - args.kT * LN2}
    emit(args, results, rows, ARCHETYPAL_COLUMNS, **io_kw)
    return 0


def cmd_erase(args, **io_kw):
    x = resolve_gap(args)
    if args.cycles is None and args.target_entropy is None:
        raise DomainError("give --cycles or --target-entropy")
    epsilon = args.epsilon if args.epsilon is not None else 1.0
    cfg = protocol.ProtocolConfig(x, args.mode, max_cycles=args.cycles,
                                  target_entropy=args.target_entropy,
                                  include_initial=args.include_initial,
                                  epsilon=epsilon, hbar=args.hbar)
    ledger = protocol.run_erasure(cfg)
    columns = [c for c in LEDGER_COLUMNS
               if ledger.has_energy or c not in ("energy_cost", "cum_energy")]
    rows = [{"cycle": r.m, "p1": r.p1, "spin_cost": r.spin_cost, "energy_cost": r.energy_cost,
             "cum_spin": r.cum_spin, "cum_energy": r.cum_energy,
             "residual_entropy": r.residual_entropy} for r in ledger.records]
    ps = [r.p1 for r in ledger.records]
    if any(b > a or (b == a and a > 0) for a, b in zip(ps, ps[1:])):
        raise InvariantViolation("p1 not strictly decreasing")
    if any(r.spin_cost < 0 for r in ledger.records):
        raise InvariantViolation("negative spin cost")
    results = {"x": x, "mode": args.mode, **ledger.totals()}
    emit(args, results, rows, columns, **io_kw)
    return 0


def _bounds_gaps(args):
    if args.grid is not None:
        if any(v is not None for v in (args.x, args.alpha, args.gamma)) or (
                args.epsilon is not None and args.kT is not None):
            raise DomainError("--grid conflicts with an explicit gap flag")
        if len(args.grid) != 3:
            raise DomainError("--grid takes LO,HI,COUNT")
        lo, hi, count = args.grid
        if not (0 < lo <= hi) or count < 1 or count != int(count):
            raise DomainError("--grid needs 0 < LO <= HI and an integer COUNT >= 1")
        return [float(v) for v in np.geomspace(lo, hi, int(count))]
    return resolve_gaps(args)


def cmd_bounds(args, **io_kw):
    rows = []
    for x in _bounds_gaps(args):
        series = protocol.cost_series(x, args.tol)
        b = protocol.cost_bounds(x)
        alpha = reservoirs.alpha_from_x(x)
        row = {"x": x, "alpha": alpha, "series": series,
               "lower": b.unprimed[0], "upper": b.unprimed[1],
               "primed_lower": b.primed[0], "primed_upper": b.primed[1],
               "combined": protocol.combined_scaled_cost(x, args.tol),
               "hamming_bound": bounds.hamming_cost_bound(alpha)}
        if not row["lower"] < series < row["upper"]:
            raise InvariantViolation(f"series outside its bounds at x={x}")
        if not row["primed_lower"] < series + 0.5 < row["primed_upper"]:
            raise InvariantViolation(f"primed total outside its bounds at x={x}")
        if not row["combined"] > 2 * LN2:
            raise InvariantViolation(f"combined cost not above 2 ln 2 at x={x}")
        rows.append(row)
    emit(args, {"rows_checked": len(rows)}, rows, BOUNDS_COLUMNS, **io_kw)
    return 0


def cmd_finite(args, **io_kw):
    x = resolve_gap(args)
    if args.N is None:
        raise DomainError("--N is required")
    report = finite_bath.simulate_finite(args.N, x, args.cycles)
    rows = []
    for c in report.cycles:
        if c.dS_total < -1e-12:
            raise InvariantViolation(f"total entropy decreased at cycle {c.cycle}")
        if abs(c.conserved_after - c.conserved_before) > 1e-12:
            raise InvariantViolation(f"J_z not conserved at cycle {c.cycle}")
        rows.append({k: getattr(c, k) for k in FINITE_COLUMNS})
    results = {"N": args.N, "x": x, "cycles": len(rows),
               "bath_entropy_gain": report.bath_entropy_gain,
               "residual_chain_entropy": report.residual_chain_entropy,
               "spin_paid": report.final_state.spin_paid}
    emit(args, results, rows, FINITE_COLUMNS, **io_kw)
    return 0


def cmd_ensemble(args, **io_kw):
    if args.seed is None:
        raise DomainError("--seed is required for ensemble runs")
    x = resolve_gap(args)
    rng = ensemble.RngSpec(args.seed)
    if args.kind == "trajectory":
        if args.field != "none":
            raise DomainError("--field applies to --kind residual only")
        stats = ensemble.trajectory_ensemble(rng, x, args.trials, args.cycles, args.workers)
        reference = protocol.cost_series(x)
    else:
        field = ensemble.FieldModel.parse(args.field)
        stats = ensemble.residual_field_ensemble(rng, x / args.hbar, field, args.trials,
                                                 args.cycles, args.hbar, args.workers)
        reference = field.mean * protocol.cost_series(x)
    if not (stats.variance >= 0 and stats.ci99[0] <= stats.mean <= stats.ci99[1]):
        raise InvariantViolation("malformed ensemble statistics")
    results = {"kind": args.kind, "x": x, **stats.as_dict(), "expected_mean": reference}
    emit(args, results, seed=args.seed, **io_kw)
    return 0


def cmd_verify(args, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    results = verify.run_checks()
    ok = all(r.passed for r in results)
    if args.json:
        stdout.write(to_json({"passed": ok, "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]}))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            stdout.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
        stdout.write(f"{sum(r.passed for r in results)}/{len(results)} invariants hold\n")
    return 0 if ok else 1


COMMANDS = {
    "archetypal": cmd_archetypal,
    "erase": cmd_erase,
    "bounds": cmd_bounds,
    "finite": cmd_finite,
    "ensemble": cmd_ensemble,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
