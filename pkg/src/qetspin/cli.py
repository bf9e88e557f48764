"""Command-line entry point.

Subcommands::

    qetspin sweep   --h-min 0 --h-max 0.99 --steps 100 --out DIR [--svg]
    qetspin point   --h 0.5 [--theta 0.05]
    qetspin fit     [--h-min 0 --h-max 0.99 --steps 100]
    qetspin minimal --k 1 --h-max 1.99 --steps 100 --out DIR
    qetspin scan    --h 0.5 --resolution 32

Exit codes: 0 success, 2 configuration error, 3 domain error,
4 invariant violation, 5 I/O error. ``QET_OUT`` sets the default output
directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .chain import check_field, solve_ground_state
from .errors import ConfigError, QETError
from .general import optimality_scan
from .linalg import partial_trace
from .minimal import H_MAX, minimal_fits
from .sweep import SweepConfig, analyze_point, default_output_dir, run_sweep, write_csv, write_figures, write_table
from .thermo import proportionality_fit

log = logging.getLogger("qetspin")

EXIT_IO = 5


def _matrix(a: np.ndarray) -> dict:
    a = np.asarray(a)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def point_report(h: float, theta: float | None = None) -> dict:
    """JSON-ready report for one field value (sweep-row keys plus extras)."""
    pa = analyze_point(h, theta)
    run, gs = pa.run, pa.gs
    report = pa.row.as_dict()
    report.update(
        theta=run.theta,
        E_B=run.E_B,
        X=run.X,
        Y=run.Y,
        a=gs.a, b=gs.b, c=gs.c, d=gs.d, eta=gs.eta, xi=gs.xi,
        ground_energy_uncalibrated=gs.energy,
        probabilities=[o.probability for o in run.outcomes],
        S34_f=pa.ledger.S34_f, S4_g=pa.ledger.S4_g, S4_f=pa.ledger.S4_f,
        beta=pa.eff_g.beta,
        offblock_residual_g=pa.eff_g.offblock_residual,
        offblock_residual_f=pa.eff_f.offblock_residual,
        lambda_g=[pa.spect_g.lam[j].tolist() for j in (0, 1)],
        lambda_f=[pa.spect_f.lam[j].tolist() for j in (0, 1)],
        states={
            "psi": _matrix(gs.psi),
            "rho34_g": _matrix(partial_trace(gs.rho, (3, 4))),
            "rho34_f": _matrix(partial_trace(run.rho_f, (3, 4))),
            "betaH34_g": _matrix(pa.eff_g.betaH),
            "betaH34_f": _matrix(pa.eff_f.betaH),
        },
    )
    return report


def fit_report(h_min: float = 0.0, h_max: float = 0.99, steps: int = 100) -> dict:
    config = SweepConfig(h_min=h_min, h_max=h_max, steps=steps)
    rows = [analyze_point(float(h)).row for h in config.grid()]
    EB = np.array([r.E_B_max for r in rows])
    slope34, dev34 = proportionality_fit([r.dS34 for r in rows], EB)
    slope4, dev4 = proportionality_fit([r.dS4 for r in rows], EB)
    return {
        "h_min": h_min, "h_max": h_max, "steps": steps,
        "slope_dS34": slope34, "max_rel_deviation_dS34": dev34, "beta": -1 / slope34,
        "slope_dS4": slope4, "max_rel_deviation_dS4": dev4, "beta_dS4": -1 / slope4,
    }


def scan_report(h: float, resolution: int) -> dict:
    report = optimality_scan(solve_ground_state(check_field(h)), resolution)
    out = dataclasses.asdict(report)
    out["family_spread"] = report.family_spread
    return out


def _dump(obj: dict) -> None:
    # json emits floats with repr(), the shortest string that round-trips exactly.
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_sweep(args) -> int:
    config = SweepConfig(
        h_min=args.h_min, h_max=args.h_max, steps=args.steps,
        theta_grid_resolution=args.theta_resolution,
        output_dir=Path(args.out) if args.out else default_output_dir(), emit_svg=args.svg,
    )
    rows = [a.row for a in run_sweep(config)]
    path = write_csv(config.output_dir / "sweep.csv", rows)
    print(f"wrote {path} ({len(rows)} rows)")
    if config.emit_svg:
        for p in write_figures(config.output_dir, rows):
            print(f"wrote {p}")
    return 0


def cmd_point(args) -> int:
    _dump(point_report(args.h, args.theta))
    return 0


def cmd_fit(args) -> int:
    rep = fit_report(args.h_min, args.h_max, args.steps)
    if args.json:
        _dump(rep)
        return 0
    print(f"grid: {rep['steps']} points on [{rep['h_min']}, {rep['h_max']}]")
    print(f"E_B_max vs dS34: slope = {rep['slope_dS34']:.6f}  max rel dev = {rep['max_rel_deviation_dS34']:.4%}"
          f"  beta = {rep['beta']:.6f}")
    print(f"E_B_max vs dS4:  slope = {rep['slope_dS4']:.6f}  max rel dev = {rep['max_rel_deviation_dS4']:.4%}")
    return 0


def cmd_minimal(args) -> int:
    if args.steps < 2:
        raise ConfigError(f"steps must be >= 2, got {args.steps}")
    if not 0 < args.h_max < 2:
        raise ConfigError(f"h-max must lie in (0, 2), got {args.h_max}")
    if args.k <= 0:
        raise ConfigError(f"k must be positive, got {args.k}")
    fit = minimal_fits(args.k, np.linspace(0.0, args.h_max, args.steps))
    out = Path(args.out) if args.out else default_output_dir()
    path = write_table(out / "minimal.csv", fit.curves())
    print(f"wrote {path}")
    print(f"beta       = {fit.beta:.6f}  (max rel dev {fit.max_rel_deviation:.4%})")
    print(f"beta_tilde = {fit.beta_tilde:.6f}  (max rel dev {fit.max_rel_deviation_tilde:.4%})")
    return 0


def cmd_scan(args) -> int:
    rep = scan_report(args.h, args.resolution)
    if args.json:
        _dump(rep)
        return 0
    print(f"h = {rep['h']}, resolution = {rep['resolution']}")
    print(f"main-protocol E_B_max = {rep['main_EB_max']:.12g}")
    print(f"grid maximum          = {rep['grid_max']:.12g}")
    print(f"refined maximum       = {rep['refined_max']:.12g}")
    for f in rep["family"]:
        print(f"  t = {f['t']:.6f}  N = ({f['N0']}, {f['N1']})  E_B = {f['E_B']:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qetspin", description="Quantum energy teleportation on a four-spin chain")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="tabulate all quantities over a field grid")
    p.add_argument("--h-min", type=float, default=0.0)
    p.add_argument("--h-max", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--theta-resolution", type=int, default=1000)
    p.add_argument("--out", help="output directory (default: $QET_OUT or ./qet_out)")
    p.add_argument("--svg", action="store_true", help="also write SVG figures")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("point", help="JSON report for a single field value")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--theta", type=float, default=None, help="feedback angle (default: optimal)")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("fit", help="proportionality fits of E_B_max against entropy changes")
    p.add_argument("--h-min", type=float, default=0.0)
    p.add_argument("--h-max", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("minimal", help="two-qubit minimal model curves and fits")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--h-max", type=float, default=H_MAX)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_minimal)

    p = sub.add_parser("scan", help="grid search over general measurement/feedback axes")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except QETError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [io_error]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
