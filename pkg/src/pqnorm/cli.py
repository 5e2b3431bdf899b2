"""Command line interface; every command prints one JSON document.

    pqnorm norm FILE --p P --q Q [--method power|grid|cp|round]
    pqnorm certify --p P --q Q [--grid-step S] [--certified]
    pqnorm verify coeffs --kmax 29 --grid-step 0.05
    pqnorm verify identity --a A --b B --rho R --samples N
    pqnorm verify kron|duality|embedding ...
    pqnorm round FILE --p P --q Q --trials T --seed S

Exit status: 0 on success, 1 on a numeric failure (JSON error object on
stdout), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import inversion, oracle, relaxation, rounding
from .matrix_io import read_matrix
from .specfn import ExponentPair, noise_correlation_exact, noise_correlation_mc

SCHEMA = "pqnorm/1"


def parse_exponent(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        if "/" in t:
            num, den = t.split("/", 1)
            return float(num) / float(den)
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an exponent: {text!r}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _emit(payload: dict, out) -> None:
    doc = {"schema": SCHEMA, **payload}
    out.write(json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n")


def _default_seed() -> int:
    env = os.environ.get("PQNORM_SEED")
    return int(env) if env not in (None, "") else 0


def _cmd_norm(args):
    A = read_matrix(args.file)
    out = {"command": "norm", "method": args.method, "p": args.p, "q": args.q,
           "shape": list(A.shape), "seed": args.seed}
    if args.method == "power":
        value, x = oracle.norm_power(A, args.p, args.q, starts=args.starts, seed=args.seed)
        out.update(value=value, x=x)
    elif args.method == "grid":
        out["value"] = oracle.norm_grid(A, args.p, args.q, resolution=args.resolution)
    else:
        pair = ExponentPair(args.p, args.q)
        sol = relaxation.solve_cp(A, pair, relaxation.CPOptions(seed=args.seed))
        if args.method == "cp":
            cert = relaxation.solve_dual(A, pair, sol)
            out.update(value=sol.value, converged=sol.converged, dual=cert.to_json_dict())
        else:
            rp = rounding.round_best(A, sol, pair, trials=args.trials, seed=args.seed)
            out.update(value=rp.value, cp_value=sol.value, rounded=rp.to_json_dict())
    return out


def _cmd_round(args):
    A = read_matrix(args.file)
    pair = ExponentPair(args.p, args.q)
    sol = relaxation.solve_cp(A, pair, relaxation.CPOptions(seed=args.seed))
    plan = rounding.RoundingPlan(A, sol, pair)
    rp = rounding.round_best(A, sol, pair, trials=args.trials, seed=args.seed)
    report = inversion.approx_ratio(pair, certified=True)
    return {
        "command": "round",
        "p": args.p,
        "q": args.q,
        "cp_value": sol.value,
        "ratio_certified": report.ratio,
        "guarantee": sol.value / report.ratio,
        "gram_clipped": plan.clipped,
        "degenerate_scaling": plan.degenerate_scaling,
        "rounded": rp.to_json_dict(),
    }


def _cmd_certify(args):
    pair = ExponentPair(args.p, args.q)
    report = inversion.approx_ratio(pair, certified=args.certified)
    out = {"command": "certify", **report.to_json_dict()}
    if args.grid_step is not None:
        sp = inversion.verify_sign_pattern(report.k_checked, args.grid_step)
        out["sign_pattern"] = {"ok": sp.ok, "grid_step": sp.grid_step, "k_max": sp.k_max,
                               "method": sp.method}
    return out


def _cmd_verify(args):
    kind = args.kind
    if kind == "coeffs":
        sp = inversion.verify_sign_pattern(args.kmax, args.grid_step, args.margin)
        return {"command": "verify coeffs", "pass": sp.ok, **sp.to_dict()}
    if kind == "identity":
        rng = np.random.Generator(np.random.Philox(args.seed))
        mean, se = noise_correlation_mc(args.a, args.b, args.rho, args.samples, rng)
        exact = noise_correlation_exact(args.a, args.b, args.rho)
        return {"command": "verify identity", "a": args.a, "b": args.b, "rho": args.rho,
                "samples": args.samples, "seed": args.seed, "mc_mean": mean, "std_err": se,
                "predicted": exact, "z": (mean - exact) / se if se > 0 else 0.0,
                "pass": abs(mean - exact) <= 4 * se}
    rng = np.random.Generator(np.random.Philox(args.seed))
    if kind == "duality":
        reports = []
        for i in range(args.count):
            A = rng.standard_normal((args.rows, args.cols))
            reports.append(oracle.duality_check(A, args.p, args.q, seed=args.seed + i))
        return {"command": "verify duality", "seed": args.seed, "pass": all(r["ok"] for r in reports),
                "reports": reports}
    if kind == "kron":
        p, q = args.p, args.q
        if p > q:
            raise ValueError("kron check needs p <= q")
        reports = []
        for i in range(args.count):
            A = rng.standard_normal((2, 2))
            B = rng.standard_normal((2, 2))
            reports.append(oracle.kron_check(A, B, p, q, seed=args.seed + i))
        return {"command": "verify kron", "seed": args.seed, "pass": all(r["ok"] for r in reports),
                "reports": reports}
    if kind == "embedding":
        rep = oracle.embedding_experiment(args.n, args.m, args.q, args.trials, args.seed)
        rep["pass"] = rep["ratio_min"] >= 1 - args.tolerance and rep["ratio_max"] <= 1 + args.tolerance
        return {"command": "verify embedding", **rep}
    raise ValueError(f"unknown verification {kind!r}")


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    parser = argparse.ArgumentParser(prog="pqnorm", description="p->q operator norm approximation")
    sub = parser.add_subparsers(dest="command", required=True)

    def pq(p):
        p.add_argument("--p", type=parse_exponent, required=True)
        p.add_argument("--q", type=parse_exponent, required=True)

    n = sub.add_parser("norm", help="estimate ||A||_{p->q}")
    n.add_argument("file")
    pq(n)
    n.add_argument("--method", choices=["power", "grid", "cp", "round"], default="power")
    n.add_argument("--seed", type=int, default=seed)
    n.add_argument("--starts", type=int, default=20)
    n.add_argument("--trials", type=int, default=100)
    n.add_argument("--resolution", type=int, default=400)
    n.set_defaults(func=_cmd_norm)

    c = sub.add_parser("certify", help="approximation ratio report")
    pq(c)
    c.add_argument("--grid-step", type=float, default=None)
    c.add_argument("--certified", action="store_true")
    c.set_defaults(func=_cmd_certify)

    r = sub.add_parser("round", help="relax and round")
    r.add_argument("file")
    pq(r)
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=seed)
    r.set_defaults(func=_cmd_round)

    v = sub.add_parser("verify", help="numerical verification suites")
    v.add_argument("kind", choices=["coeffs", "identity", "kron", "duality", "embedding"])
    v.add_argument("--kmax", type=int, default=29)
    v.add_argument("--grid-step", type=float, default=0.05)
    v.add_argument("--margin", type=float, default=1e-9)
    v.add_argument("--a", type=float, default=0.0)
    v.add_argument("--b", type=float, default=0.0)
    v.add_argument("--rho", type=float, default=0.5)
    v.add_argument("--samples", type=int, default=1_000_000)
    v.add_argument("--p", type=parse_exponent, default=None)
    v.add_argument("--q", type=parse_exponent, default=None)
    v.add_argument("--count", type=int, default=10)
    v.add_argument("--rows", type=int, default=3)
    v.add_argument("--cols", type=int, default=3)
    v.add_argument("--n", type=int, default=5)
    v.add_argument("--m", type=int, default=None)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--tolerance", type=float, default=0.1)
    v.add_argument("--seed", type=int, default=seed)
    v.set_defaults(func=_cmd_verify)
    return parser


_VERIFY_PQ_DEFAULTS = {"duality": (math.inf, 1.0), "kron": (2.0, 4.0), "embedding": (None, 4.0)}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        dp, dq = _VERIFY_PQ_DEFAULTS.get(args.kind, (None, None))
        args.p = dp if args.p is None else args.p
        args.q = dq if args.q is None else args.q
    try:
        payload = args.func(args)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, out)
        return 1
    _emit(payload, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
