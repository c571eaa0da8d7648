"""Command-line front door.

Exit codes: 0 success, 1 a theorem-class check was Violated, 2 inconclusive
(a check was Inconclusive, or a survival tail too thin to fit), 3 usage,
parse or precondition error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import runner
from .errors import InclusionNotEstablished, InsufficientTail, SchemaError, SpectralBallsError
from .geometry.serialization import from_dict, load_fixture_file
from .oracle import EigenOracle, FDSettings
from .spectral import extrapolated_eigenvalue
from .stochastic import SurvivalCurve, kac_rate, simulate_survival
from .verdict import _plain
from .verifier import lieb_translation_scan

EXIT_OK, EXIT_VIOLATED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _print_json(doc):
    sys.stdout.write(json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n")


def _parse_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON for {what}: {exc}") from exc


def _fixtures(args):
    return load_fixture_file(args.fixture) if args.fixture else {}


def _region(text, fixtures):
    """A region from inline JSON or a fixture name."""
    if fixtures and text in fixtures:
        return fixtures[text]
    if not text.lstrip().startswith(("{", "[")):
        raise SchemaError(f"{text!r} is neither inline JSON nor a fixture name")
    return from_dict(_parse_json(text, "--body"))


def _single_region(args):
    fixtures = _fixtures(args)
    if args.body is None:
        if len(fixtures) == 1:
            return next(iter(fixtures.values()))
        raise UsageError("give --body (inline JSON, or a fixture name with --fixture)")
    return _region(args.body, fixtures)


def _pair(args):
    fixtures = _fixtures(args)
    if args.pair is None:
        raise UsageError("give --pair as a JSON array of two regions or 'NAME1,NAME2' with --fixture")
    text = args.pair.strip()
    if text.startswith("["):
        docs = _parse_json(text, "--pair")
        if not isinstance(docs, list) or len(docs) != 2:
            raise SchemaError("--pair must hold exactly two regions")
        return from_dict(docs[0]), from_dict(docs[1])
    names = [n.strip() for n in text.split(",")]
    if len(names) != 2 or not all(n in fixtures for n in names):
        raise SchemaError(f"--pair {text!r} does not name two fixtures")
    return fixtures[names[0]], fixtures[names[1]]


def _fd_settings(args, base: FDSettings = FDSettings()) -> FDSettings:
    kw = {}
    if args.h0 is not None:
        kw["h0"] = args.h0
    if args.levels is not None:
        kw["levels"] = args.levels
    if args.tol is not None:
        kw["tol"] = args.tol
    return FDSettings(**{**base.to_dict(), **kw})


# -- commands ----------------------------------------------------------------

def cmd_eig(args) -> int:
    region = _single_region(args)
    s = _fd_settings(args)
    est = extrapolated_eigenvalue(region, s.h0_for(region), s.levels, s.tol, s.boundary)
    _print_json(est.to_dict())
    return EXIT_OK


def cmd_exit_sim(args) -> int:
    if args.replay:
        curve = SurvivalCurve.from_csv(args.replay, path_count=args.replay_paths)
    else:
        if args.seed is None:
            raise UsageError("exit-sim needs --seed")
        region = _single_region(args)
        x0 = np.zeros(region.dim) if args.x0 is None else np.asarray(_parse_json(args.x0, "--x0"), float)
        curve = simulate_survival(region, x0, dt=args.dt, t_max=args.tmax, n_paths=args.paths,
                                  seed=args.seed)
        out = Path(args.out or "survival.csv")
        out.parent.mkdir(parents=True, exist_ok=True)
        curve.to_csv(out)
    try:
        est = kac_rate(curve)
    except InsufficientTail as exc:
        print(f"insufficient tail: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    doc = est.to_dict()
    if not args.replay:
        doc["csv"] = str(out)
    _print_json(doc)
    return EXIT_OK


def _load_run_config(args) -> runner.RunConfig:
    cfg = runner.load_config(args.config) if args.config else runner.bundled_suite()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
        changes["mc"] = runner.replace(cfg.mc, seed=args.seed)
    mc_over = {}
    if args.dt is not None:
        mc_over["dt"] = args.dt
    if args.paths is not None:
        mc_over["n_paths"] = args.paths
    if mc_over:
        changes["mc"] = runner.replace(changes.get("mc", cfg.mc), **mc_over)
    changes["fd"] = _fd_settings(args, cfg.fd)
    cfg = runner.replace(cfg, **changes)
    if args.checks:
        cfg = cfg.select([c.strip() for c in args.checks.split(",") if c.strip()])
    return cfg


def cmd_check(args) -> int:
    cfg = _load_run_config(args)
    outcome = runner.run(cfg)
    out_root = args.out or cfg.out or "runs"
    run_dir = runner.write_run(outcome, cfg, out_root)
    sys.stdout.write(outcome.report_json())
    for cid, msg in outcome.errors.items():
        print(f"{cid}: {msg}", file=sys.stderr)
    print(f"report written to {run_dir / 'report.json'}", file=sys.stderr)
    return outcome.exit_code


def cmd_scan(args) -> int:
    b1, b2 = _pair(args)
    offsets = _parse_json(args.offsets, "--offsets") if args.offsets else _default_offsets(b1.dim)
    res = lieb_translation_scan(b1, b2, offsets, EigenOracle(_fd_settings(args)))
    _print_json(res.to_dict())
    return EXIT_OK if res.verdict.holds else EXIT_VIOLATED


def _default_offsets(dim):
    e = np.eye(dim)
    return [np.zeros(dim), 0.2 * e[0], 0.3 * e[-1], 0.15 * e.sum(0), -0.25 * e[0] + 0.1 * e[-1]]


def _fmt(x):
    return "-" if x is None else f"{x:.6g}"


def cmd_report(args) -> int:
    try:
        doc = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed report: {exc}") from exc
    runner.validate_report(doc)
    rows = [("check id", "type", "status", "margin", "error", "class")]
    for cid, res in sorted(doc["checks"].items()):
        v = res["verdict"]
        rows.append((cid, res["check"], v["status"], _fmt(v["margin"]), _fmt(v["error"]),
                     "theorem" if res["theorem_class"] else "descriptive"))
        for name, sub in sorted(v.get("sub", {}).items()):
            rows.append(("  " + name, "", sub["status"], _fmt(sub["margin"]), _fmt(sub["error"]), ""))
    for cid, msg in sorted(doc.get("errors", {}).items()):
        rows.append((cid, "", "ERROR", "", "", msg))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for i, r in enumerate(rows):
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if i == 0:
            print("  ".join("-" * w for w in widths))
    s = doc["summary"]
    print(f"\nconfig {doc['config_hash']}  seed {doc.get('seed')}  exit code {s['exit_code']}  "
          + "  ".join(f"{k}={n}" for k, n in sorted(s["counts"].items()) if n))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spectral-balls", description="Dirichlet eigenvalues of convex bodies and checks "
                "of the subadditivity inequality for their intersections.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fd_flags(sp):
        sp.add_argument("--h0", type=float, help="coarsest grid spacing (default: 1/16 of the shortest side)")
        sp.add_argument("--levels", type=int, help="number of grid levels for extrapolation (>= 3)")
        sp.add_argument("--tol", type=float, help="eigen-solver tolerance")

    def body_flags(sp):
        sp.add_argument("--body", help="region as inline JSON, or a fixture name")
        sp.add_argument("--fixture", help="fixture file (JSON) providing named regions")

    e = sub.add_parser("eig", help="extrapolated principal eigenvalue of a region")
    body_flags(e)
    fd_flags(e)
    e.set_defaults(func=cmd_eig)

    x = sub.add_parser("exit-sim", help="simulate survival from a start point and fit the decay rate")
    body_flags(x)
    x.add_argument("--dt", type=float, default=1e-4)
    x.add_argument("--paths", type=int, default=10_000)
    x.add_argument("--tmax", type=float)
    x.add_argument("--seed", type=int)
    x.add_argument("--x0", help="start point as a JSON array (default: origin)")
    x.add_argument("--out", help="CSV output path (default: survival.csv)")
    x.add_argument("--replay", help="fit an existing t,S,stderr CSV instead of simulating")
    x.add_argument("--replay-paths", type=int, help="path count behind a replayed curve (enables the "
                   "minimum-alive filter)")
    x.set_defaults(func=cmd_exit_sim)

    c = sub.add_parser("check", help="run a check configuration (default: the bundled suite)")
    c.add_argument("config", nargs="?", help="run configuration JSON")
    c.add_argument("--checks", help="comma-separated subset of check ids")
    c.add_argument("--seed", type=int)
    c.add_argument("--dt", type=float)
    c.add_argument("--paths", type=int)
    c.add_argument("--out", help="root directory for run output (default: runs)")
    fd_flags(c)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("scan-translations", help="translation scan of a body pair")
    s.add_argument("--pair", help="JSON array of two regions, or NAME1,NAME2 with --fixture")
    s.add_argument("--fixture")
    s.add_argument("--offsets", help="JSON array of offset vectors")
    fd_flags(s)
    s.set_defaults(func=cmd_scan)

    r = sub.add_parser("report", help="print a report as a table")
    r.add_argument("report", help="report.json path")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except InclusionNotEstablished as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, SpectralBallsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
