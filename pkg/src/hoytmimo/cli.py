"""Command-line interface.

Subcommands: density, capacity, degradation, simulate, validate,
correlations.  Outputs are plot-ready CSV (RFC-4180, '.' decimals) or
JSON with a ``schema_version`` field; no plotting here.

Power flags are always dB (P = 10^(dB/10)); ``--power-linear`` switches
the given values to linear units.  Exit codes: 0 success, 1 validation
failure, 2 usage error, 3 numerical failure.  The environment variable
``HOYTMIMO_THREADS`` sets the default worker count for grid evaluation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .capacity import capacity_sweep, db_to_linear, degradation
from .ensemble import (
    ChannelConfig,
    NumericalConsistencyError,
    SeriesControl,
    SeriesTruncationError,
    correlation_fn,
    crossover_tau,
    density_mp,
    level_density,
)
from .montecarlo import empirical_density
from .validation import run_checks
from .quadrature import QuadratureError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(ValueError):
    pass


def _q_from_tau(tau: float) -> float:
    if tau < 0.0:
        raise UsageError("tau must be >= 0")
    if math.isinf(tau):
        return 1.0
    e = math.exp(-tau)
    return math.sqrt((1.0 - e) / (1.0 + e))


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, pts = spec.split(":")
        lo, hi, pts = float(lo), float(hi), int(pts)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {spec!r}; expected min:max:points") from exc
    if pts < 2 or not hi > lo:
        raise UsageError("grid needs max > min and points >= 2")
    return np.linspace(lo, hi, pts)


def _parse_float_list(spec: str) -> list[float]:
    try:
        return [float(tok) for tok in spec.split(",") if tok != ""]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {spec!r}") from exc


def _thread_count(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("HOYTMIMO_THREADS")
    return max(1, int(env)) if env else 1


def _map_grid(fn, items, threads: int):
    if threads <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _resolve_q(args) -> float:
    has_q = getattr(args, "q", None) is not None
    has_tau = getattr(args, "tau", None) is not None
    if has_q == has_tau:
        raise UsageError("provide exactly one of --q or --tau")
    if has_q:
        if not 0.0 <= args.q <= 1.0:
            raise UsageError("q must lie in [0, 1]")
        return args.q
    return _q_from_tau(args.tau)


def _config(args) -> ChannelConfig:
    if args.nt is None or args.nr is None:
        raise UsageError("--nt and --nr are required (flags or config file)")
    return ChannelConfig(nt=args.nt, nr=args.nr, omega=args.omega)


def _control(args) -> SeriesControl:
    return SeriesControl(rel_tol=args.rel_tol, max_terms=args.max_terms)


def _write_rows(args, fieldnames: list[str], rows: list[dict], meta: dict) -> None:
    """Emit rows as CSV (with sidecar metadata) or as one JSON document."""
    meta = {"schema_version": SCHEMA_VERSION, **meta}
    if args.format == "json":
        doc = {**meta, "rows": rows}
        text = json.dumps(doc, indent=2)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.output:
            out.close()
    if args.output:
        with open(args.output + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")


def _meta_config(cfg: ChannelConfig, q: float | None = None) -> dict:
    meta = {"nt": cfg.nt, "nr": cfg.nr, "omega": cfg.omega}
    if q is not None:
        meta["q"] = q
        meta["tau"] = crossover_tau(q)
    return meta


# ---------------------------------------------------------------------------
# subcommands


def cmd_density(args) -> int:
    cfg = _config(args)
    q = _resolve_q(args)
    ctrl = _control(args)
    if args.grid is None:
        raise UsageError("--grid is required")
    grid = _parse_grid(args.grid)
    threads = _thread_count(args)

    hist = None
    if args.simulate:
        hist = empirical_density(
            cfg,
            q,
            samples=args.samples,
            bins=len(grid) - 1,
            value_range=(float(grid[0]), float(grid[-1])),
            seed=args.seed,
        )
        lam = 0.5 * (hist.bin_edges[:-1] + hist.bin_edges[1:])
    else:
        lam = grid

    n = cfg.n
    rho = _map_grid(lambda v: level_density(float(v), cfg, q, ctrl) / n, lam, threads)
    fieldnames = ["lambda", "rho_analytic"]
    rows = [{"lambda": float(v), "rho_analytic": r} for v, r in zip(lam, rho)]
    if args.asymptotic:
        fieldnames.append("rho_mp")
        for row in rows:
            row["rho_mp"] = density_mp(row["lambda"], cfg) / n
    if hist is not None:
        fieldnames.extend(["rho_empirical", "stderr"])
        for row, d, se in zip(rows, hist.normalized_values, hist.normalized_stderr):
            row["rho_empirical"] = float(d)
            row["stderr"] = float(se)
    meta = {
        "command": "density",
        "config": _meta_config(cfg, q),
        "seed": args.seed if args.simulate else None,
        "samples": args.samples if args.simulate else None,
    }
    _write_rows(args, fieldnames, rows, meta)
    return EXIT_OK


def cmd_capacity(args) -> int:
    cfg = _config(args)
    ctrl = _control(args)
    if (args.q is None) == (args.tau is None):
        raise UsageError("provide exactly one of --q or --tau")
    if args.q is not None:
        qs = _parse_float_list(args.q)
        if any(not 0.0 <= q <= 1.0 for q in qs):
            raise UsageError("q values must lie in [0, 1]")
    else:
        qs = [_q_from_tau(t) for t in _parse_float_list(args.tau)]
    if args.power_db is None:
        raise UsageError("--power-db is required")
    powers = _parse_float_list(args.power_db)
    if args.power_linear:
        pdbs = [10.0 * math.log10(p) for p in powers]
    else:
        pdbs = powers
    results = capacity_sweep(cfg, qs, pdbs, ctrl)
    rows = [
        {
            "q": r.q,
            "power_db": r.power_db,
            "capacity": r.capacity,
            "est_abs_error": r.est_abs_error,
        }
        for r in results
    ]
    meta = {"command": "capacity", "config": _meta_config(cfg)}
    _write_rows(args, ["q", "power_db", "capacity", "est_abs_error"], rows, meta)
    return EXIT_OK


def cmd_degradation(args) -> int:
    cfg = _config(args)
    ctrl = _control(args)
    if args.power_db is None:
        raise UsageError("--power-db is required")
    powers = _parse_float_list(args.power_db)
    pdbs = [10.0 * math.log10(p) for p in powers] if args.power_linear else powers
    rows = []
    for pdb in pdbs:
        rows.append(
            {"power_db": pdb, "degradation": degradation(cfg, db_to_linear(pdb), ctrl)}
        )
    meta = {"command": "degradation", "config": _meta_config(cfg)}
    _write_rows(args, ["power_db", "degradation"], rows, meta)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    q = _resolve_q(args)
    value_range = None
    if args.range:
        lo, hi = (float(t) for t in args.range.split(":"))
        value_range = (lo, hi)
    hist = empirical_density(
        cfg, q, samples=args.samples, bins=args.bins, value_range=value_range, seed=args.seed
    )
    rows = []
    for i in range(len(hist.counts)):
        rows.append(
            {
                "bin_lo": float(hist.bin_edges[i]),
                "bin_hi": float(hist.bin_edges[i + 1]),
                "density": float(hist.normalized_values[i]),
                "stderr": float(hist.normalized_stderr[i]),
            }
        )
    meta = {
        "command": "simulate",
        "config": _meta_config(cfg, q),
        "seed": args.seed,
        "samples": args.samples,
        "eigenvalues_in_range": int(np.sum(hist.counts)),
        "observed_trace_moment": hist.eigenvalue_sum / args.samples,
        "expected_trace_moment": cfg.nt * cfg.nr * cfg.omega,
    }
    _write_rows(args, ["bin_lo", "bin_hi", "density", "stderr"], rows, meta)
    return EXIT_OK


def cmd_correlations(args) -> int:
    cfg = _config(args)
    q = _resolve_q(args)
    ctrl = _control(args)
    if args.points_file:
        with open(args.points_file) as fh:
            doc = json.load(fh)
        point_sets = doc["points"] if isinstance(doc, dict) else doc
    elif args.points:
        point_sets = [
            _parse_float_list(group) for group in args.points.split(";") if group
        ]
    else:
        raise UsageError("provide --points or --points-file")
    rows = []
    for pts in point_sets:
        pts = [float(v) for v in pts]
        if len(pts) > cfg.n:
            raise UsageError(
                f"correlation order {len(pts)} exceeds N = {cfg.n}"
            )
        rn = correlation_fn(pts, cfg, q, ctrl)
        row = {"n": len(pts), "points": pts, "r_n": rn}
        if len(pts) == 2:
            bound = level_density(pts[0], cfg, q, ctrl) * level_density(pts[1], cfg, q, ctrl)
            row["repulsion_violated"] = bool(rn > bound * (1.0 + 1e-9))
        rows.append(row)
    meta = {"command": "correlations", "config": _meta_config(cfg, q)}
    if args.format == "csv":
        flat = [
            {
                "n": r["n"],
                "points": ";".join(repr(v) for v in r["points"]),
                "r_n": r["r_n"],
                "repulsion_violated": r.get("repulsion_violated", ""),
            }
            for r in rows
        ]
        _write_rows(args, ["n", "points", "r_n", "repulsion_violated"], flat, meta)
    else:
        _write_rows(args, [], rows, meta)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    ctrl = _control(args)
    checks = run_checks(ctrl, quick=args.quick)
    passed = all(c["passed"] for c in checks)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "validate",
        "quick": args.quick,
        "passed": passed,
        "checks": checks,
    }
    text = json.dumps(doc, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, antennas: bool = True) -> None:
    if antennas:
        p.add_argument("--nt", type=int, help="transmit antennas")
        p.add_argument("--nr", type=int, help="receive antennas")
        p.add_argument("--omega", type=float, default=1.0, help="signal power (default 1)")
    p.add_argument("--rel-tol", type=float, default=1e-10, help="series truncation tolerance")
    p.add_argument("--max-terms", type=int, default=20000, help="series term budget")
    p.add_argument("--output", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None, help="grid evaluation workers (default $HOYTMIMO_THREADS or 1)")


def _add_q_tau(p: argparse.ArgumentParser, as_list: bool = False) -> None:
    group = p.add_mutually_exclusive_group()
    if as_list:
        group.add_argument("--q", type=str, help="Hoyt parameter(s), comma separated")
        group.add_argument("--tau", type=str, help="crossover parameter(s), comma separated")
    else:
        group.add_argument("--q", type=float, help="Hoyt parameter in [0, 1]")
        group.add_argument("--tau", type=float, help="crossover parameter >= 0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoytmimo",
        description="Eigenvalue statistics and ergodic capacity of Hoyt-faded MIMO channels",
    )
    parser.add_argument("--config", help="key=value defaults file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="analytic marginal eigenvalue density")
    _add_common(p)
    _add_q_tau(p)
    p.add_argument("--grid", help="lambda grid as min:max:points")
    p.add_argument("--asymptotic", action="store_true", help="add the large-N density column")
    p.add_argument("--simulate", action="store_true", help="add Monte Carlo columns")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("capacity", help="ergodic capacity table")
    _add_common(p)
    _add_q_tau(p, as_list=True)
    p.add_argument("--power-db", help="power value(s), comma separated")
    p.add_argument("--power-linear", action="store_true", help="interpret powers as linear")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("degradation", help="capacity loss from q=1 to q=0")
    _add_common(p)
    p.add_argument("--power-db", help="power value(s), comma separated")
    p.add_argument("--power-linear", action="store_true")
    p.set_defaults(func=cmd_degradation)

    p = sub.add_parser("simulate", help="Monte Carlo eigenvalue histogram")
    _add_common(p)
    _add_q_tau(p)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--range", help="histogram range lo:hi (default 0 to 1.2x MP edge)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the cross-module consistency suite")
    _add_common(p, antennas=False)
    p.add_argument("--quick", action="store_true", help="fast subset (< 10 s)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("correlations", help="n-level correlation functions")
    _add_common(p)
    _add_q_tau(p)
    p.add_argument("--points", help="point sets, e.g. '1.0,2.0;0.5'")
    p.add_argument("--points-file", help="JSON file with a 'points' list of lists")
    p.set_defaults(func=cmd_correlations)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Load key=value defaults; command-line flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[idx + 1]
    defaults = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            defaults[key.strip().replace("-", "_")] = val.strip()
    for action in parser._subparsers._group_actions[0].choices.values():  # type: ignore[union-attr]
        known = {a.dest: a for a in action._actions}
        for key, val in defaults.items():
            if key in known:
                act = known[key]
                if act.type is not None:
                    action.set_defaults(**{key: act.type(val)})
                elif isinstance(act.const, bool) or act.nargs == 0:
                    action.set_defaults(**{key: val.lower() in ("1", "true", "yes")})
                else:
                    action.set_defaults(**{key: val})
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SeriesTruncationError, NumericalConsistencyError, QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # downstream consumer (head, less) closed the pipe; not an error
        try:
            sys.stdout.close()
        except OSError:
            pass
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
