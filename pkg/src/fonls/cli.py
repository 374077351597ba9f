"""Command-line surface.

Subcommands: groundstate, evolve, check, decay, sweep, plot.
Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 partial sweep
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, fieldio, plots, sweep as sweep_mod
from .evolution import EvolveConfig, TerminalStatus, evolve
from .functionals import NonlinearityParams, scaling_exponents, threshold_report
from .groundstate import petviashvili_solve, verify_identities
from .spectral import (field, field_from_function, forward_transform,
                       inverse_transform, l2_norm_sq, make_grid,
                       spectral_derivative, sup_norm)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3


def _write_json(path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(path, header, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v
                             for v in row])


def _record_rows(rec):
    header = ["time", "mass", "energy", "h2", "lp1", "sup", "k",
              "xnorm_accum", "tail_mass"]
    rows = [
        [float(t), float(m), float(e), float(h), float(lp), float(s),
         float(k), float(x), float(tm)]
        for t, m, e, h, lp, s, k, x, tm in zip(
            rec.times, rec.mass_series, rec.energy_series, rec.h2_series,
            rec.lp1_series, rec.sup_series, rec.k_series, rec.xnorm_accum,
            rec.tail_mass_series)
    ]
    return header, rows


def cmd_groundstate(args) -> int:
    grid = make_grid(args.npoints, args.length)
    params = NonlinearityParams(p=args.p)
    result = petviashvili_solve(params, grid, tol=args.tol,
                                max_iter=args.max_iter)
    if args.out:
        fieldio.save_field(args.out, result.profile)
    if args.report:
        r1, r2, r3 = verify_identities(result)
        _write_json(args.report, {
            "p": args.p,
            "converged": result.converged,
            "iterations": result.iterations,
            "residual_linf": result.residual_linf,
            "identity_residuals": [r1, r2],
            "consequence_residual": r3,
            "s_factor": result.s_factor,
            "evenness_defect": result.evenness_defect,
            "mass": result.derived.mass,
            "energy": result.derived.energy,
            "h2_seminorm": result.derived.h2_seminorm,
            "c_gn": result.derived.c_gn,
            "me_threshold": result.derived.me_threshold,
            "grad_threshold": result.derived.grad_threshold,
        })
    if not result.converged:
        print(f"ground state did not converge after {result.iterations} "
              f"iterations (residual {result.residual_linf:.3e})",
              file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"converged in {result.iterations} iterations, "
          f"residual {result.residual_linf:.3e}")
    return EXIT_OK


def _initial_field(spec: str, grid, q_cache: dict, args):
    if spec.startswith("groundstate-scaled:"):
        c = float(spec.split(":", 1)[1])
        if "q" not in q_cache:
            q_cache["q"] = petviashvili_solve(
                NonlinearityParams(p=args.p), grid)
            if not q_cache["q"].converged:
                raise RuntimeError("ground state failed to converge")
        return field(grid, c * q_cache["q"].profile.values), q_cache["q"]
    if spec.startswith("gaussian:"):
        a, w = (float(v) for v in spec.split(":", 1)[1].split(","))
        return field_from_function(
            grid, lambda x: a * np.exp(-(x / w) ** 2)), None
    return fieldio.load_field(spec, grid), None


def cmd_evolve(args) -> int:
    grid = make_grid(args.npoints, args.length)
    params = NonlinearityParams(p=args.p)
    u0, q = _initial_field(args.init, grid, {}, args)
    config = EvolveConfig(dt=args.dt, t_final=args.tfinal,
                          record_every=args.record_every,
                          blowup_guard=args.guard)
    rec = evolve(u0, params, config)
    if args.out_csv:
        header, rows = _record_rows(rec)
        _write_csv(args.out_csv, header, rows)
    if args.out_summary:
        summary = {
            "terminal_status": rec.terminal_status.value,
            "mass_drift": rec.mass_drift(),
            "energy_drift": rec.energy_drift(),
            "t_final_reached": float(rec.times[-1]),
        }
        if q is not None:
            summary["threshold"] = json.loads(
                threshold_report(u0, q, params).to_json())
        _write_json(args.out_summary, summary)
    if rec.terminal_status is TerminalStatus.NON_FINITE:
        return EXIT_NUMERICAL
    print(f"run finished: {rec.terminal_status.value} at "
          f"t = {rec.times[-1]:g}")
    return EXIT_OK


def cmd_check(args) -> int:
    """Fast invariant suite over the spectral and functional layers."""
    verdicts = {}
    grid = make_grid(256, 50.0)
    rng = np.random.default_rng(7)
    f = field(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
    coeffs = forward_transform(f)
    roundtrip = inverse_transform(coeffs, grid)
    verdicts["transform_roundtrip"] = float(
        np.max(np.abs(roundtrip.values - f.values)))
    parseval = abs(l2_norm_sq(f) - float(np.sum(np.abs(coeffs) ** 2)))
    verdicts["parseval"] = parseval / l2_norm_sq(f)
    d22 = spectral_derivative(spectral_derivative(f, 2), 2)
    d4 = spectral_derivative(f, 4)
    verdicts["derivative_composition"] = float(
        np.max(np.abs(d22.values - d4.values)) / max(sup_norm(d4), 1.0))
    exps = scaling_exponents(NonlinearityParams(p=13.0))
    verdicts["strichartz_identities"] = max(exps.identity_residuals())
    cfg = diagnostics.make_virial_config(grid, 0.15 * grid.length)
    inner = np.abs(grid.nodes) <= cfg.radius
    verdicts["virial_weight_flat"] = float(
        np.max(np.abs(cfg.d1[inner] - grid.nodes[inner])))
    verdicts["virial_weight_sign"] = float(np.max(cfg.d2 - 1.0))
    ok = (verdicts["transform_roundtrip"] < 1e-12
          and verdicts["parseval"] < 1e-10
          and verdicts["derivative_composition"] < 1e-12
          and verdicts["strichartz_identities"] < 1e-12
          and verdicts["virial_weight_flat"] < 1e-10
          and verdicts["virial_weight_sign"] <= 0.0)
    payload = {"verdicts": verdicts, "ok": ok}
    if args.out:
        _write_json(args.out, payload)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_decay(args) -> int:
    grid = make_grid(args.npoints, args.length)
    u0 = field_from_function(grid, lambda x: np.exp(-x ** 2))
    t_grid = np.geomspace(args.tmin, args.tmax, args.samples)
    fit = diagnostics.dispersive_decay_fit(u0, t_grid)
    payload = {
        "exponent": fit.exponent,
        "truncated": fit.truncated,
        "window": [float(fit.times[0]), float(fit.times[-1])],
    }
    if args.out:
        _write_json(args.out, payload)
    if args.out_csv:
        _write_csv(args.out_csv, ["time", "sup_norm"],
                   [[float(t), float(s)]
                    for t, s in zip(fit.times, fit.sup_values)])
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _spec_from_config(cfg: dict) -> sweep_mod.SweepSpec:
    ev = cfg["evolve"]
    classify = sweep_mod.ClassifyConfig(**cfg.get("classify", {}))
    return sweep_mod.SweepSpec(
        p=cfg["p"], family=cfg["family"], members=cfg["members"],
        n_points=cfg["grid"]["n_points"], length=cfg["grid"]["length"],
        evolve=EvolveConfig(**ev), classify=classify)


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    if args.print_config:
        print(json.dumps(cfg, sort_keys=True, indent=2))
    spec = _spec_from_config(cfg)
    summaries, phase_rows = sweep_mod.run_sweep(spec, workers=args.workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "summaries.json",
                [s.to_dict() for s in summaries])
    _write_csv(out_dir / "phase_table.csv",
               ["parameter", "me_ratio", "grad_ratio", "verdict"],
               [[float(r["parameter"]), float(r["me_ratio"]),
                 float(r["grad_ratio"]), r["verdict"]] for r in phase_rows])
    failures = [s for s in summaries if s.error is not None]
    if failures:
        print(f"{len(failures)}/{len(summaries)} runs failed",
              file=sys.stderr)
        return EXIT_PARTIAL
    print(f"sweep complete: {len(summaries)} runs -> {out_dir}")
    return EXIT_OK


def cmd_plot(args) -> int:
    written = plots.emit_plots(args.csv, args.out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fonls",
        description="Pseudospectral toolkit for the 1D focusing "
                    "fourth-order NLS")
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("groundstate", help="solve the solitary-wave profile")
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--length", type=float, default=100.0)
    g.add_argument("--npoints", type=int, default=2048)
    g.add_argument("--tol", type=float, default=1e-12)
    g.add_argument("--max-iter", type=int, default=500)
    g.add_argument("--out")
    g.add_argument("--report")
    g.set_defaults(fn=cmd_groundstate)

    e = sub.add_parser("evolve", help="integrate an initial field")
    e.add_argument("--init", required=True,
                   help='field file | "groundstate-scaled:c" | "gaussian:a,w"')
    e.add_argument("--p", type=float, required=True)
    e.add_argument("--length", type=float, default=100.0)
    e.add_argument("--npoints", type=int, default=2048)
    e.add_argument("--dt", type=float, required=True)
    e.add_argument("--tfinal", type=float, required=True)
    e.add_argument("--record-every", type=int, default=10)
    e.add_argument("--guard", type=float, default=None)
    e.add_argument("--out-csv")
    e.add_argument("--out-summary")
    e.set_defaults(fn=cmd_evolve)

    c = sub.add_parser("check", help="run the quick invariant suite")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_check)

    d = sub.add_parser("decay", help="fit the free-flow sup-norm decay rate")
    d.add_argument("--length", type=float, default=400.0)
    d.add_argument("--npoints", type=int, default=8192)
    d.add_argument("--tmin", type=float, default=5.0)
    d.add_argument("--tmax", type=float, default=50.0)
    d.add_argument("--samples", type=int, default=25)
    d.add_argument("--out")
    d.add_argument("--out-csv")
    d.set_defaults(fn=cmd_decay)

    s = sub.add_parser("sweep", help="run a configured family of experiments")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--print-config", action="store_true")
    s.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("plot", help="emit SVG charts from CSV series")
    p.add_argument("csv", nargs="+")
    p.set_defaults(fn=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, (ValueError, FileNotFoundError)) \
            else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
