"""Batch front-end: subcommand dispatch, deterministic CSV/JSON emission,
optional figure rendering alongside the delimited output.

Exit codes: 0 all requested verifications pass, 1 input error,
2 verification failure.  Outputs are written atomically (temp file in the
target directory, then rename).  Float formatting is fixed at 12
significant digits; JSON artifacts carry a schema-version field.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import engine, figures, monopoly, observable, oracle
from .costs import CostModel, get_kernel, KERNELS, validate_kernel
from .learning import (
    GammaValue,
    PhiValue,
    check_global_optimality_cheap,
    check_global_optimality_expensive,
    solve_lambda_cheap,
    solve_lambda_expensive,
)
from .pricing import (
    ThreePointValuation,
    TwoPointValuation,
    gamma_distribution,
    phi_distribution,
    verify_pricing_equilibrium,
)

SCHEMA_VERSION = 1
OUT_DIR_ENV = "COMPSHOP_OUT_DIR"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, rows, columns):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    _atomic_write(path, "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload):
    payload = {"schema_version": SCHEMA_VERSION, **_jsonable(payload)}
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out(args, name):
    base = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    return os.path.join(base, name)


def parse_grid(spec):
    """A kappa grid: either `log:start:stop:count` or a comma list."""
    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise InputError(f"malformed grid {spec!r}; "
                             "expected log:start:stop:count")
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        if start <= 0 or stop <= 0 or count < 2 or start == stop:
            raise InputError(f"malformed log grid {spec!r}")
        return list(np.geomspace(start, stop, count))
    vals = [float(tok) for tok in spec.split(",") if tok.strip()]
    if len(vals) < 1:
        raise InputError(f"empty grid {spec!r}")
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
        raise InputError(f"grid {spec!r} is not strictly monotone")
    return vals


def _check_omega(omega):
    if not (0.0 < omega <= 0.4):
        raise InputError(
            f"omega = {omega} outside (0, 2/5]; the prior assumption "
            "requires omega <= 2/5")
    return omega


def _kernel(args):
    try:
        return get_kernel(args.kernel)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_monopoly(args):
    kern = _kernel(args)
    if not (0.0 < args.mu < 1.0):
        raise InputError(f"mu = {args.mu} outside (0, 1)")
    grid = parse_grid(args.kappa_grid) if args.kappa_grid else [args.kappa]
    if any(k is None for k in grid):
        raise InputError("monopoly requires --kappa or --kappa-grid")
    if len(grid) > 1 and any(b >= a for a, b in zip(grid, grid[1:])):
        grid = sorted(grid, reverse=True)
    rows = monopoly.monopoly_convergence_sweep(kern, args.mu, grid)
    cols = ["kappa", "x_lo", "x_hi", "expected_price", "consumer_welfare",
            "trade_failure_prob"]
    write_csv(_out(args, "monopoly.csv"), rows, cols)
    if args.figures:
        sol = monopoly.solve_monopoly(kern, grid[-1], args.mu)
        figures.fig_monopoly(sol, _out(args, "monopoly.png"))
    return 0


def cmd_pricing(args):
    if args.lam <= 0:
        raise InputError("lambda must be positive")
    if args.game == "two":
        dist = gamma_distribution(args.lam)
        valuation = TwoPointValuation(args.lam)
    else:
        if args.q is None:
            raise InputError("--q is required for the three-point game")
        dist = phi_distribution(args.lam, args.q)
        valuation = ThreePointValuation(args.lam, args.q)
    rep = verify_pricing_equilibrium(dist, valuation,
                                     price_grid_size=args.grid)
    write_json(_out(args, "pricing_report.json"),
               {"game": args.game, "lam": args.lam, "q": args.q,
                **rep.as_dict()})
    lo, hi = dist.support
    ps = np.linspace(lo, hi, args.grid)
    rows = [{"price": p, "cdf": dist.cdf(p)} for p in ps]
    write_csv(_out(args, "pricing_cdf.csv"), rows, ["price", "cdf"])
    if args.figures:
        figures.fig_price_cdf(dist, _out(args, "pricing_cdf.png"))
    return 0 if rep.passed else 2


def cmd_learn(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    cost = CostModel(kern, args.kappa)
    regime = args.regime
    if regime == "auto":
        regime_name, _ = engine.classify_regime(kern, args.kappa, args.omega)
        regime = "cheap" if regime_name == "Cheap" else "expensive"
    if regime == "expensive":
        sol = solve_lambda_expensive(kern, args.kappa, args.omega)
        vf = GammaValue(sol.lambda_star, cost)
        rep = check_global_optimality_expensive(sol, vf)
    else:
        sol = solve_lambda_cheap(kern, args.kappa, args.omega)
        vf = PhiValue(sol.lambda_star, sol.q, cost)
        rep = check_global_optimality_cheap(sol, vf)
    write_json(_out(args, "learning.json"),
               {"solution": sol.as_dict(), "optimality": rep.as_dict()})
    xs = np.linspace(1e-3, 0.5, 200)
    x_supp = (1.0 - sol.lambda_star) / 2.0
    v_supp = vf.value_on_line(max(x_supp, 1e-3))
    slope = 0.0 if sol.regime == "Expensive" else None
    rows = []
    for x in xs:
        v = vf.value_on_line(x)
        plane = v_supp if slope == 0.0 else ""
        rows.append({"x": x, "value": v, "plane": plane})
    write_csv(_out(args, "value_line.csv"), rows, ["x", "value", "plane"])
    if args.figures:
        figures.fig_value_line(vf, [x_supp], _out(args, "value_line.png"))
    return 0 if rep.passed else 2


def cmd_solve(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    try:
        sol = engine.solve_equilibrium(kern, args.kappa, args.omega)
    except engine.EquilibriumError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    write_json(_out(args, "equilibrium.json"), sol.as_dict())
    if args.figures:
        figures.fig_price_cdf(sol.pricing, _out(args, "equilibrium_cdf.png"),
                              title=f"{sol.regime} pricing")
    return 0 if sol.checks_passed else 2


def cmd_sweep(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    grid = parse_grid(args.kappa_grid)
    rows = engine.welfare_sweep(kern, args.omega, grid, verify=args.verify)
    cols = ["kappa", "regime", "lambda_star", "q", "welfare", "profit",
            "ep", "checks_passed"]
    write_csv(_out(args, "sweep.csv"), rows, cols)
    if args.figures:
        figures.fig_sweep(rows, _out(args, "sweep_welfare.png"),
                          ycol="welfare")
        figures.fig_sweep(rows, _out(args, "sweep_lambda.png"),
                          ycol="lambda_star")
    if args.verify and not all(r["checks_passed"] for r in rows):
        return 2
    return 0


def cmd_limit(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    grid = parse_grid(args.kappa_grid)
    if any(b >= a for a, b in zip(grid, grid[1:])):
        grid = sorted(grid, reverse=True)
    rows = engine.efficiency_limit_check(kern, args.omega, grid)
    cols = ["kappa", "lambda_star", "q", "misallocation",
            "support_gap_to_limit"]
    write_csv(_out(args, "efficiency_limit.csv"), rows, cols)
    if args.figures:
        figures.fig_sweep(rows, _out(args, "efficiency_limit.png"),
                          ycol="lambda_star")
    return 0


def cmd_simulate(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    if args.seed is None:
        raise InputError("--seed is required for reproducibility")
    try:
        sol = engine.solve_equilibrium(kern, args.kappa, args.omega,
                                       verify=False)
    except engine.EquilibriumError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    rep = engine.simulate_market(sol, args.draws, args.seed)
    write_json(_out(args, "simulation.json"),
               {"regime": sol.regime, "kappa": args.kappa,
                "omega": args.omega, **rep.as_dict()})
    return 0 if rep.passed else 2


def cmd_oracle(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    cost = CostModel(kern, args.kappa)
    regime_name, _ = engine.classify_regime(kern, args.kappa, args.omega)
    if regime_name == "Cheap":
        lsol = solve_lambda_cheap(kern, args.kappa, args.omega)
        vf = PhiValue(lsol.lambda_star, lsol.q, cost)
    else:
        lsol = solve_lambda_expensive(kern, args.kappa, args.omega)
        vf = GammaValue(lsol.lambda_star, cost)
    grid = oracle.make_grid(args.n, args.omega)
    osol = oracle.oracle_solve(grid, vf, cost)
    line = oracle.oracle_comparison_line_check(osol)
    rows = [{"x": m[0], "y": m[1], "weight": w}
            for m, w in zip(osol.support_means, osol.support_weights)]
    write_csv(_out(args, "oracle_support.csv"), rows, ["x", "y", "weight"])
    write_json(_out(args, "oracle_report.json"), {
        "n": args.n, "kappa": args.kappa, "omega": args.omega,
        "regime": regime_name, "objective": osol.objective,
        "analytic_lambda": lsol.lambda_star,
        "bayes_error": osol.bayes_plausibility_error(),
        "line_check_passed": line.passed,
        "line_max_distance": line.max_distance,
        "line_tolerance": line.tolerance,
    })
    return 0 if line.passed else 2


def cmd_observable(args):
    kern = _kernel(args)
    _check_omega(args.omega)
    grid = parse_grid(args.kappa_grid)
    private = []
    for kappa in grid:
        try:
            sol = engine.solve_equilibrium(kern, kappa, args.omega,
                                           verify=False)
            private.append(sol.consumer_welfare)
        except engine.EquilibriumError:
            private.append(None)
    rows = observable.observable_comparison_table(
        kern, grid, args.omega, private_welfares=private, grid_n=args.n)
    cols = ["kappa", "public_welfare", "public_degenerate",
            "private_welfare"]
    write_csv(_out(args, "observable.csv"), rows, cols)
    if not all(r["public_degenerate"] for r in rows):
        return 2
    return 0


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--kernel", default="entropy",
                   help=f"cost kernel, one of {sorted(KERNELS)}")
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${OUT_DIR_ENV} or cwd)")
    p.add_argument("--figures", action="store_true",
                   help="render PNG figures next to the delimited output")
    p.add_argument("--config", default=None,
                   help="JSON config file; explicit flags override it")


def build_parser():
    top = _Parser(prog="compshop",
                  description="duopoly pricing with costly flexible "
                              "consumer learning")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monopoly", parents=[], help="single-seller benchmark")
    _add_common(p)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--kappa-grid", default=None)
    p.set_defaults(func=cmd_monopoly)

    p = sub.add_parser("pricing", help="pricing-stage verification")
    _add_common(p)
    p.add_argument("--game", choices=["two", "three"], default="two")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_pricing)

    p = sub.add_parser("learn", help="learning-stage solve + certificate")
    _add_common(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--regime", choices=["auto", "expensive", "cheap"],
                   default="auto")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("solve", help="full equilibrium with verification")
    _add_common(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="kappa sweep across regimes")
    _add_common(p)
    p.add_argument("--kappa-grid", required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("limit", help="vanishing-frictions table")
    _add_common(p)
    p.add_argument("--kappa-grid", required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("simulate", help="Monte Carlo cross-validation")
    _add_common(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--draws", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="LP oracle over discretized beliefs")
    _add_common(p)
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("observable", help="public-learning benchmark table")
    _add_common(p)
    p.add_argument("--kappa-grid", required=True)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--n", type=int, default=24)
    p.set_defaults(func=cmd_observable)

    return top


def _apply_config(args):
    """Fill unset argument values from a JSON config file."""
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {args.config!r}: {exc}")
    parser_defaults = build_parser()
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise InputError(f"unknown config field {key!r}")
        # explicit command-line values win; detect by comparing to the
        # value argparse would have produced without the flag
        if getattr(args, attr) in (None, False):
            setattr(args, attr, val)
    return args


def main(argv=None):
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        args = _apply_config(args)
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
