"""Command-line entry points.

    symorbit classify  --group d12 | --group-file G.txt | --table  [--csv out]
    symorbit minimize  --group d12 --omega 0 --alpha 1 --modes 48 --out orbit.json
    symorbit scan      --symmetry line --omega 0.05:0.95:0.05 --out scan.csv
    symorbit verify    [--alpha 0.25,0.75,1.25,1.75] --out report.csv
    symorbit trajectory --orbit orbit.json --out traj.csv

Exit codes: 0 success; 2 parse/closure/grid errors; 3 action not coercive;
4 minimizer did not converge; 5 a verification inequality failed.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from math import pi

import numpy as np

from . import classify as classify_mod
from . import collision, testpaths
from .action import angular_momentum, minimize, newton_residual
from .errors import ClosureOverflow, NotCoercive, SymorbitError
from .groups import Masses, named_group, parse_group_file
from .loops import symmetrization_defect
from .orbitio import export_trajectory_csv, load_orbit, save_orbit

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_COERCIVE = 3
EXIT_NOT_CONVERGED = 4
EXIT_VERIFY_FAILED = 5


def _masses(text: str) -> Masses:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("expected three comma-separated masses")
    return Masses(*parts)


def _omega_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("expected start:stop:step")
    start, stop, step = (Fraction(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError("empty grid")
    grid = []
    w = start
    while w <= stop + Fraction(1, 10**9):
        grid.append(float(w))
        w += step
    if not grid:
        raise ValueError("empty grid")
    return grid


def _load_group(args):
    if getattr(args, "group", None):
        return named_group(args.group), args.group
    if getattr(args, "group_file", None):
        with open(args.group_file) as fh:
            return parse_group_file(fh.read()), args.group_file
    raise ValueError("no group given (use --group or --group-file)")


def _apply_config_file(args, parser):
    """Key-value config file mirroring flag names; flags win over the file."""
    if not getattr(args, "config", None):
        return args
    overrides = {}
    with open(args.config) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            overrides[key.strip().replace("-", "_")] = val.strip()
    defaults = vars(parser.parse_args(args._argv))
    for key, val in overrides.items():
        if key in defaults and f"--{key.replace('_', '-')}" not in args._argv:
            setattr(args, key, type(defaults[key])(val) if defaults[key] is not None else val)
    return args


def cmd_classify(args) -> int:
    out_lines = []
    if args.table:
        reports = classify_mod.build_table(_masses(args.masses))
    else:
        try:
            G, name = _load_group(args)
        except (ValueError, OSError, ClosureOverflow, SymorbitError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        reports = [classify_mod.classify(G, _masses(args.masses), name=name, fast=args.fast)]
    header = ",".join(classify_mod.REPORT_COLUMNS)
    out_lines.append(header)
    for rep in reports:
        rec = rep.to_record()
        out_lines.append(",".join(str(rec[c]) for c in classify_mod.REPORT_COLUMNS))
    text = "\n".join(out_lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_minimize(args) -> int:
    try:
        G, _ = _load_group(args)
    except (ValueError, OSError, ClosureOverflow, SymorbitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    masses = _masses(args.masses)
    try:
        res = minimize(
            G,
            masses,
            float(Fraction(args.omega)),
            args.alpha,
            N=args.modes,
            seed=args.seed,
            tol_grad=args.tol_grad,
            quad_points=args.quad_points,
        )
    except NotCoercive as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_COERCIVE
    J = angular_momentum(res.loop)
    print(
        f"action={res.action:.12g} gradient_norm={res.gradient_norm:.3e} "
        f"min_pair_distance={res.min_pair_distance:.6g} iterations={res.iterations} "
        f"converged={res.converged} seed={res.seed} |J|max={np.abs(J).max():.3e}"
    )
    if args.out:
        save_orbit(
            args.out,
            res.loop,
            G,
            float(Fraction(args.omega)),
            args.alpha,
            seed=args.seed,
            action=res.action,
            gradient_norm=res.gradient_norm,
            angular_momentum=float(np.abs(J).max()),
            min_pair_distance=res.min_pair_distance,
        )
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_scan(args) -> int:
    try:
        grid = _omega_grid(args.omega)
        if args.symmetry == "line":
            result = testpaths.line_symmetry_comparison(grid, quad_points=args.quad_points)
        elif args.symmetry == "choreo21":
            result = testpaths.choreo21_comparison(grid, quad_points=args.quad_points)
        else:
            raise ValueError(f"unknown scan symmetry {args.symmetry!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rows = list(result.rows)
    if args.with_minimizer:
        G = named_group(args.symmetry)
        masses = _masses(args.masses)
        for w in grid:
            try:
                res = minimize(G, masses, w, 1.0, N=args.modes, seed=args.seed)
                rows.append(testpaths.ScanRow(w, "minimizer", res.action, "descent"))
            except NotCoercive:
                continue
    lines = ["omega,branch,value,method"]
    lines += [f"{r.omega:.12g},{r.branch},{r.value:.12g},{r.method}" for r in rows]
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    alphas = [float(a) for a in args.alpha.split(",")] if args.alpha else [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75]
    flip = -1.0 if args.invert_margins else 1.0
    rows = []
    ok = True

    def add(name, alpha, param, value, passed):
        nonlocal ok
        rows.append((name, alpha, param, value, passed))
        ok = ok and passed

    for a in alphas:
        sym = abs(collision.phi(a, 2 * pi / 3) - collision.phi(a, 2 * pi - 2 * pi / 3))
        add("phi_symmetry", a, 2 * pi / 3, sym, sym < 1e-10)
        thetas = np.linspace(0.3, pi, 9)
        vals = [collision.phi(a, th) for th in thetas]
        mono = all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))
        add("phi_monotone", a, 0.0, min(np.diff(vals)), mono)
        v = flip * (collision.phi(a, pi / 6) + collision.phi(a, 7 * pi / 6))
        add("pi_sixth_sum", a, pi / 6, v, v < 0)
    rep = collision.verify_triple_lagrange(alphas, np.linspace(0, pi / 2, 11))
    for r in rep.rows:
        add("triple_lagrange", r.alpha, r.parameter, flip * r.value, flip * r.value < 0)
    for a in alphas:
        repc = collision.verify_collinear_triple(a, [0.0, 0.25, 0.5, 0.75, 0.9])
        for r in repc.rows:
            add("collinear_triple", r.alpha, r.parameter, flip * r.value, flip * r.value < 0)
    cert = collision.lemma_le2_certificate()
    add("series_certificate", 0.0, 0.0, float(cert.tail_value), cert.passed if not args.invert_margins else False)

    lines = ["check,alpha,parameter,value,pass"]
    lines += [f"{n},{a:.6g},{p:.6g},{v:.12g},{int(b)}" for n, a, p, v, b in rows]
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    print(f"verify: {'all passed' if ok else 'FAILURES PRESENT'} ({len(rows)} checks)")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_trajectory(args) -> int:
    try:
        loop, G, doc = load_orbit(args.orbit)
    except SymorbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    export_trajectory_csv(args.out, loop, samples=args.samples)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symorbit", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--group", "-g", help="catalog name of the group")
        p.add_argument("--group-file", help="path to a generator file")
        p.add_argument("--masses", default="1,1,1", help="m1,m2,m3")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="key-value config file (flags win)")

    p = sub.add_parser("classify", help="classification report")
    common(p)
    p.add_argument("--table", action="store_true", help="all ten trivial-core groups")
    p.add_argument("--fast", action="store_true", default=True)
    p.add_argument("--deep", dest="fast", action="store_false",
                   help="run the full penalty refuter for bound-to-collisions")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("minimize", help="equivariant action minimization")
    common(p)
    p.add_argument("--omega", default="0")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--modes", type=int, default=48)
    p.add_argument("--tol-grad", type=float, default=1e-6)
    p.add_argument("--quad-points", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("scan", help="action-level curves over omega")
    common(p)
    p.add_argument("--symmetry", required=True, choices=["line", "choreo21"])
    p.add_argument("--omega", required=True, help="start:stop:step")
    p.add_argument("--with-minimizer", action="store_true")
    p.add_argument("--modes", type=int, default=32)
    p.add_argument("--quad-points", type=int, default=512)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="collision-exclusion inequality suite")
    common(p)
    p.add_argument("--alpha", help="comma-separated alpha values")
    p.add_argument("--out")
    p.add_argument("--invert-margins", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", help="export sampled positions as CSV")
    p.add_argument("--orbit", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=512)
    p.set_defaults(func=cmd_trajectory)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    args._argv = argv
    if getattr(args, "config", None):
        args = _apply_config_file(args, parser)
    try:
        return args.func(args)
    except SymorbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
