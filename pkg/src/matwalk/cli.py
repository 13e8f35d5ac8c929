"""Command-line front end.

One binary with subcommands; a JSON config file can supply defaults and flags
override it.  Every output file embeds the resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analyze, perturb, serialize, simulate, walk_exact
from ._kernels import prod21_log_e1, sandwich_scan
from .core_matrix import CoeffSequence, normalized_product

VERIFY_CHECKS = ("theorem1", "rho-asymptote", "hitting-ratio", "pce", "sandwich", "dfr")


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return +1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError("sign must be + or -")


def _add_model_args(p, family_required=True):
    p.add_argument("--family", choices=("21", "12"), required=family_required,
                   help="walk family: 21 = up +1/down -2, 12 = up +2/down -1")
    p.add_argument("--K", type=int, help="iterated-log depth of the perturbation")
    p.add_argument("--B", type=float, help="leading perturbation coefficient")
    p.add_argument("--sign", type=_sign, help="direction the perturbation is applied (+ or -)")
    p.add_argument("--table", type=Path, help="CSV walk table with header k,q instead of K/B/sign")


def _build_model(args) -> walk_exact.WalkModel:
    if args.table is not None:
        return walk_exact.WalkModel.from_csv(args.family, args.table)
    if args.K is None or args.B is None or args.sign is None:
        raise SystemExit("error: provide either --table or all of --K/--B/--sign")
    return walk_exact.WalkModel.lamperti(args.family, args.K, args.B, args.sign)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_dist(args) -> int:
    model = _build_model(args)
    dist = walk_exact.max_dist_table(model, args.n_max)
    out = _out_dir(args)
    if args.format in ("csv", "both"):
        serialize.dist_to_csv(dist, out / "dist.csv")
    if args.format in ("json", "both"):
        serialize.dist_to_json(dist, out / "dist.json")
    print(f"wrote distribution for n in [2, {args.n_max}], mass {dist.mass:.12g}")
    return 0


def cmd_simulate(args) -> int:
    model = _build_model(args)
    cfg = simulate.SimConfig(excursions=args.excursions, seed=args.seed,
                             step_cap=args.step_cap, height_cap=args.height_cap,
                             workers=args.workers)
    emp = simulate.empirical_max_dist(model, cfg)
    out = _out_dir(args)
    if args.format in ("csv", "both"):
        serialize.empirical_to_csv(emp, out / "sim.csv")
    if args.format in ("json", "both"):
        serialize.empirical_to_json(emp, out / "sim.json")
    print(f"simulated {emp.total} excursions: {int(emp.counts.sum())} returned, "
          f"{emp.censored_step} step-censored, {emp.censored_height} height-censored")
    return 0


def cmd_classify(args) -> int:
    model = _build_model(args)
    print(walk_exact.classify(model).value)
    return 0


def cmd_verify(args) -> int:
    model = None
    if args.check in ("theorem1", "rho-asymptote", "hitting-ratio", "pce"):
        if args.check in ("hitting-ratio", "pce") and args.family is None:
            args.family = "12"
        model = _build_model(args)

    passed = False
    diag = None
    config = {"check": args.check}
    if model is not None:
        config["model"] = model.to_config()

    if args.check == "theorem1":
        k_max = args.k_max
        th = model.theta_array(k_max)
        log_y = prod21_log_e1(th, 1, k_max)
        with np.errstate(invalid="ignore"):
            log_rho = np.log(0.5 * (th + np.sqrt(th * th + 4.0 * th)))
        cum = np.zeros(k_max + 1)
        cum[2:] = np.cumsum(log_rho[2:])
        x = np.exp(log_y - cum)
        window = x[k_max // 2: k_max + 1]
        spread = float(window.max() - window.min())
        passed = spread < args.tol and window.min() > 0.0
        cps = np.unique(np.geomspace(max(2, k_max // 64), k_max, 10).astype(int))
        diag = analyze.SeriesDiagnostic(
            checkpoints=[(int(k), float(x[k])) for k in cps],
            verdict=analyze.CONVERGED if passed else analyze.NOT_CONVERGED,
            limit_est=float(x[-1]), spread=spread,
        )
        config.update(k_max=k_max, tol=args.tol)
    elif args.check == "rho-asymptote":
        cps = np.unique(np.geomspace(max(10, args.k_max // 100), args.k_max, 8).astype(int))
        diag = analyze.rho_product_ratio(model, cps, tol=args.tol)
        passed = diag.converged
        config.update(k_max=args.k_max, tol=args.tol)
    elif args.check == "hitting-ratio":
        hr = walk_exact.hitting_ratio(model, args.n)
        rel = abs(hr - 2.0) / 2.0
        passed = rel < args.tol
        diag = analyze.SeriesDiagnostic(
            checkpoints=[(args.n, hr)],
            verdict=analyze.CONVERGED if passed else analyze.NOT_CONVERGED,
            limit_est=hr, spread=rel,
        )
        config.update(n=args.n, tol=args.tol)
    elif args.check == "pce":
        cps = np.unique(np.geomspace(max(10, args.n // 10), args.n, 6).astype(int))
        diag = analyze.pce_check(model, cps, rel_tol=args.tol)
        passed = diag.converged
        config.update(n=args.n, tol=args.tol)
    elif args.check == "sandwich":
        rng = np.random.default_rng(args.seed)
        k = np.arange(args.k_max + 1, dtype=float)
        k[0] = 1.0
        violations = 0
        worst = -math.inf
        for _ in range(args.seqs):
            base = rng.uniform(0.3, 3.0, size=3)
            amp = rng.uniform(-0.5, 0.5, size=3)
            a = base[0] * (1.0 + amp[0] / k ** 2)
            b = base[1] * (1.0 + amp[1] / k ** 2)
            d = base[2] * (1.0 + amp[2] / k ** 2)
            v, w = sandwich_scan(a, b, d)
            violations += v
            worst = max(worst, w)
        passed = violations == 0
        diag = analyze.SeriesDiagnostic(
            checkpoints=[(args.seqs, float(violations))],
            verdict=analyze.CONVERGED if passed else analyze.NOT_CONVERGED,
            limit_est=float(violations), spread=worst,
            detail={"worst_margin": worst},
        )
        config.update(seqs=args.seqs, k_max=args.k_max, seed=args.seed)
    elif args.check == "dfr":
        if args.K is None or args.B is None:
            raise SystemExit("error: verify dfr needs --K and --B")
        params = perturb.PerturbParams(K=args.K, B=args.B,
                                       sign=args.sign if args.sign else +1)
        val = perturb.r_increment_rate(params, args.n)
        lim = perturb.r_increment_limit(params)
        err = abs(val - lim) / max(1.0, abs(lim))
        passed = err < args.tol
        diag = analyze.SeriesDiagnostic(
            checkpoints=[(args.n, val)],
            verdict=analyze.CONVERGED if passed else analyze.NOT_CONVERGED,
            limit_est=lim, spread=err,
        )
        config.update(K=args.K, B=args.B, n=args.n, tol=args.tol)

    out = _out_dir(args)
    serialize.diagnostic_to_json(diag, out / f"verify-{args.check}.json", config, passed)
    print(f"{args.check}: {'PASS' if passed else 'FAIL'} "
          f"(limit_est={diag.limit_est:.6g}, spread={diag.spread:.3g})")
    return 0 if passed else 1


def cmd_cf_tail(args) -> int:
    model = _build_model(args)
    est = walk_exact.xi(model, args.n, tol=args.tol)
    print(f"xi_{args.n} = {est.value!r} (depth {est.depth_used}, "
          f"est_error {est.est_error:.3e})")
    return 0


def cmd_product(args) -> int:
    if args.coeffs is not None:
        seq = CoeffSequence.from_csv(args.coeffs)
    else:
        seq = _build_model(args).coeff_sequence()
    prod = normalized_product(seq, args.m, args.k)
    val = prod.entries[args.i - 1, args.j - 1]
    print(f"normalized entry ({args.i},{args.j}) of A_{args.k}..A_{args.m}: {val!r}")
    print(f"log_scale (sum of log spectral radii): {prod.log_scale!r}")
    return 0


def cmd_fit(args) -> int:
    n, value = serialize.load_table_csv(args.input, args.value_column)
    slope, stderr = analyze.local_exponent(n, value, args.n_lo, args.n_hi)
    print(f"local exponent over [{args.n_lo}, {args.n_hi}]: {slope:.6f} +- {stderr:.2e}")
    if args.target is not None:
        ok = abs(slope - args.target) <= args.tol
        print(f"target {args.target}: {'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matwalk",
        description="Excursion maxima of (2,1)/(1,2) random walks via normalized "
                    "matrix products and continued fractions",
    )
    parser.add_argument("--config", type=Path,
                        help="JSON file with default values for the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="exact distribution table of the excursion maximum")
    _add_model_args(p)
    p.add_argument("--n-max", type=int, default=10 ** 4)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("simulate", help="Monte Carlo excursion maxima")
    _add_model_args(p)
    p.add_argument("--excursions", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--step-cap", type=int, default=10 ** 8)
    p.add_argument("--height-cap", type=int, default=10 ** 6)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", help="transient / null-recurrent / positive-recurrent")
    _add_model_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run one numerical verification")
    p.add_argument("check", choices=VERIFY_CHECKS)
    _add_model_args(p, family_required=False)
    p.add_argument("--k-max", type=int, default=10 ** 5)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seqs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cf-tail", help="continued-fraction tail xi_n")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_cf_tail)

    p = sub.add_parser("product", help="normalized matrix-product entry")
    _add_model_args(p, family_required=False)
    p.add_argument("--coeffs", type=Path, help="CSV with header k,a,b,d")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--i", type=int, default=1, choices=(1, 2))
    p.add_argument("--j", type=int, default=1, choices=(1, 2))
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("fit", help="log-log slope of a saved table")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--value-column", default=None)
    p.add_argument("--n-lo", type=int, required=True)
    p.add_argument("--n-hi", type=int, required=True)
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--tol", type=float, default=0.1)
    p.set_defaults(func=cmd_fit)

    return parser


_DEFAULT_TOL = {"theorem1": 1e-4, "rho-asymptote": 0.01, "hitting-ratio": 0.02,
                "pce": 0.05, "dfr": 0.01}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        defaults = json.loads(Path(args.config).read_text())
        parser.set_defaults(**defaults)
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**defaults)
        args = parser.parse_args(argv)  # flags still override config values
    if getattr(args, "tol", None) is None and getattr(args, "check", None):
        args.tol = _DEFAULT_TOL.get(args.check, 0.01)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
