"""Command line entry point: ``ellbethe {check,bethe,qlame,irf,vertex8}``.

Every run writes one JSON report (stdout or --out) that embeds the resolved
parameters and the library version. Exit codes: 0 all checks pass, 1 a
residual exceeded its tolerance, 2 bad configuration, 3 non-convergence.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bethe import BetheProblem, bae_solve, eigen_relation_residual, transfer_eigenvalue
from .checks import DEFAULT_TOLS, SUITES, draw, r8v_residue_suite, run_all, star_triangle_suite
from .errors import ConvergenceError, DegenerateRootsError, PoleError
from .lattice import t8v_bethe_eigenvector
from .qlame import (QLameProblem, classical_limit_residual, continuation_csv, eigen_residual,
                    empirical_order, qlame_continue, qlame_solve)
from .theta import ModularParams, theta

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3

QLAME_SEEDS = {
    1: [0.3 + 0.1j],
    2: [0.25 + 0.1j, 0.55 - 0.05j],
    3: [0.1 + 0.3j, 0.4 - 0.2j, 0.7 + 0.05j],
}

DEFAULTS = {
    "tau": 0.9j,
    "eta": 0.11,
    "seed": 42,
    "tol": {},
    "bethe": {"Lambda": [1, 1], "z": [0.0, 0.4], "c": 0.0, "t0": [0.2 + 0.1j],
              "eight_vertex": False, "mu": 0.13 + 0.07j,
              "z_samples": [0.3, 0.1 + 0.2j, 0.77, -0.2 + 0.1j, 0.5 - 0.3j]},
    "qlame": {"m": 1, "c": 0.0, "t0": None, "c_path": None, "classical_limit": False,
              "etas": [0.08, 0.04, 0.02, 0.01], "lam": 0.27 + 0.1j},
    "irf": {"sizes": [2, 4], "mu": 0.05},
    "vertex8": {"draws": 50, "sizes": [2, 4]},
}


class ConfigError(ValueError):
    pass


# --- parsing --------------------------------------------------------------------

def parse_complex(x, name="value"):
    """Numbers, [re, im] pairs and strings such as '0.2+0.1j' or '0.9i'."""
    try:
        if isinstance(x, (list, tuple)) and len(x) == 2 and not isinstance(x[0], (list, str)):
            return complex(float(x[0]), float(x[1]))
        if isinstance(x, str):
            return complex(x.replace(" ", "").replace("i", "j"))
        return complex(x)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: cannot read {x!r} as a complex number") from exc


def parse_complex_list(x, name):
    if isinstance(x, str):
        x = [s for s in x.split(",") if s.strip()]
    if not isinstance(x, (list, tuple)):
        raise ConfigError(f"{name}: expected a list")
    return [parse_complex(v, name) for v in x]


def parse_eta(x):
    """Returns (float or complex eta, Fraction or None)."""
    if isinstance(x, str) and "/" in x:
        try:
            frac = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"eta: cannot read {x!r} as p/q") from exc
        return float(frac), frac
    return parse_complex(x, "eta"), None


def parse_tols(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"tol: expected name=value, got {item!r}")
        name, val = item.split("=", 1)
        if name not in DEFAULT_TOLS:
            raise ConfigError(f"tol: unknown tolerance {name!r}")
        try:
            out[name] = float(val)
        except ValueError as exc:
            raise ConfigError(f"tol: {name} needs a number") from exc
    return out


def resolve_config(args, overrides=None):
    """Defaults, then the JSON config file, then explicit flags."""
    cfg = json.loads(json.dumps(DEFAULTS, default=lambda v: [v.real, v.imag]))
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config: top level must be an object")
        for k, v in user.items():
            if isinstance(v, dict) and isinstance(cfg.get(k), dict) and k != "tol":
                cfg[k].update(v)
            else:
                cfg[k] = v
    for key in ("tau", "eta", "seed"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    tol = dict(cfg.get("tol") or {})
    tol.update(parse_tols(args.tol))
    parse_tols([f"{k}={v}" for k, v in tol.items()])
    cfg["tol"] = tol
    section = cfg.setdefault(args.command, {})
    for key, val in (overrides or {}).items():
        if val is not None:
            section[key] = val
    return cfg


def make_params(cfg):
    tau = parse_complex(cfg["tau"], "tau")
    if not tau.imag > 0:
        raise ConfigError(f"tau: imaginary part must be positive, got {tau}")
    eta, frac = parse_eta(cfg["eta"])
    try:
        seed = int(cfg["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("seed: expected an integer") from exc
    return ModularParams(tau, eta), frac, seed


# --- reporting --------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def header(command, p, frac, seed, cfg):
    return {
        "command": command,
        "version": __version__,
        "params": {"tau": p.tau, "eta": p.eta, "eta_exact": frac, "seed": seed,
                   "series_tol": p.series_tol, "n_terms": p.n_terms},
        "config": cfg,
    }


def emit(report, out):
    text = json.dumps(report, default=_jsonable, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------------

def cmd_check(cfg, p, frac, seed):
    results = run_all(p, seed, cfg["tol"])
    recs = [r.to_record() for r in results]
    ok = all(r.passed for r in results)
    return ok, {"suites": recs, "summary": {"suites": len(recs),
                                            "passed": sum(r.passed for r in results)}}


def cmd_bethe(cfg, p, frac, seed):
    sec, tols = cfg["bethe"], dict(DEFAULT_TOLS, **cfg["tol"])
    c = parse_complex(sec["c"], "bethe.c")
    prob = BetheProblem(sec["Lambda"], parse_complex_list(sec["z"], "bethe.z"), c, p)
    t0 = parse_complex_list(sec["t0"], "bethe.t0")
    if len(t0) != prob.m:
        raise ConfigError(f"bethe.t0: need {prob.m} starting roots, got {len(t0)}")
    sol = bae_solve(prob, t0, tol=tols["bae"])
    out = {"solution": sol.to_record(prob), "iterations": sol.iterations}
    ok = sol.residual_norm < tols["bae"]
    rng = np.random.default_rng(seed)
    if all(L == 1 for L in prob.Lambda):
        checks = []
        for w, lam in zip(draw(rng, 3, p), draw(rng, 3, p)):
            r = eigen_relation_residual(prob, sol.t, sol.c, w, lam)
            checks.append({"w": w, "lam": lam, "eps": transfer_eigenvalue(prob, sol.t, sol.c, w),
                           "residual": r})
        worst = max(x["residual"] for x in checks)
        ok = ok and worst < tols["eigen"]
        out["eigen_checks"] = checks
        out["eigen_status"] = "pass" if worst < tols["eigen"] else "fail"
    else:
        out["eigen_checks"] = None
    if sec.get("eight_vertex"):
        if frac is None:
            raise ConfigError("eta: --eight-vertex needs a rational eta given as p/q")
        zs = parse_complex_list(sec["z_samples"], "bethe.z_samples")
        mu = parse_complex(sec["mu"], "bethe.mu")
        rec = {"n": prob.n, "p": frac.numerator, "q": frac.denominator, "z": zs}
        v = None
        for attempt in range(5):
            try:
                v, res, eps = t8v_bethe_eigenvector(prob, sol, mu, zs, frac)
                break
            except ValueError as exc:
                if "annihilates" not in str(exc) and "vanishes" not in str(exc):
                    raise
                rec["error"] = str(exc)
                v = None
                if "vanishes" in str(exc):
                    break
                mu = draw(rng, 1, p)[0]
        if v is None:
            # every mu cancels: these roots give no eight-vertex vector
            rec.update(mu=mu, status="degenerate")
            ok = False
        else:
            rec.pop("error", None)
            passed = max(res) < tols["eight_vertex"]
            ok = ok and passed
            rec.update(mu=mu, eigenvalue=eps, residual=res, vector=v,
                       status="pass" if passed else "fail")
        out["eight_vertex"] = rec
    return ok, out


def cmd_qlame(cfg, p, frac, seed):
    sec, tols = cfg["qlame"], dict(DEFAULT_TOLS, **cfg["tol"])
    try:
        m = int(sec["m"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("qlame.m: expected an integer") from exc
    if m < 1:
        raise ConfigError("qlame.m: must be at least 1")
    prob = QLameProblem(m, p)
    if sec.get("t0") is not None:
        t0 = parse_complex_list(sec["t0"], "qlame.t0")
    elif m in QLAME_SEEDS:
        t0 = QLAME_SEEDS[m]
    else:
        t0 = list(draw(np.random.default_rng(seed), m, p))
    if len(t0) != m:
        raise ConfigError(f"qlame.t0: need {m} starting roots")
    rng = np.random.default_rng(seed)
    lams = draw(rng, 20, p)
    out, ok = {}, True
    path = sec.get("c_path")
    if path:
        try:
            cs = np.linspace(parse_complex(path["start"], "c_path.start"),
                             parse_complex(path["stop"], "c_path.stop"), int(path["steps"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError("qlame.c_path: needs start, stop and steps") from exc
        try:
            points = qlame_continue(prob, list(cs), t0, tol=tols["bae"])
        except ConvergenceError as exc:
            if exc.last is not None:
                exc.last = {"t": exc.last.t, "c": exc.last.c, "residual": exc.last.residual_norm}
            raise
        out["csv"] = continuation_csv(points, cs)
    else:
        points = [qlame_solve(prob, parse_complex(sec["c"], "qlame.c"), t0, tol=tols["bae"])]
    recs = []
    for pt in points:
        rec = pt.to_record(prob)
        rec["eigen_residual"] = eigen_residual(prob, pt.t, pt.c, lams)
        ok = ok and rec["eigen_residual"] < tols["qlame"] and pt.residual < tols["bae"]
        recs.append(rec)
    out["points"] = recs
    if sec.get("classical_limit"):
        etas = [float(e) for e in sec["etas"]]
        lam = parse_complex(sec["lam"], "qlame.lam")
        res = classical_limit_residual(m, lambda x: theta(x + 0.3, p), lam, p.tau, etas)
        order = empirical_order(etas, res)
        passed = abs(order - 2.0) < tols["classical_order"]
        ok = ok and passed
        out["classical_limit"] = {"etas": etas, "residuals": res, "order": order,
                                  "status": "pass" if passed else "fail"}
    return ok, out


def cmd_irf(cfg, p, frac, seed):
    from .checks import irf_operator_suite

    sec, tols = cfg["irf"], dict(DEFAULT_TOLS, **cfg["tol"])
    rng = np.random.default_rng(seed)
    mu = parse_complex(sec["mu"], "irf.mu")
    res = [irf_operator_suite(p, rng, tols["irf_operator"], tuple(sec["sizes"]), mu),
           star_triangle_suite(p, rng, tols["star_triangle"])]
    return all(r.passed for r in res), {"suites": [r.to_record() for r in res]}


def cmd_vertex8(cfg, p, frac, seed):
    from .checks import intertwining_suite

    sec, tols = cfg["vertex8"], dict(DEFAULT_TOLS, **cfg["tol"])
    rng = np.random.default_rng(seed)
    draws = int(sec["draws"])
    res = [SUITES["vertex_irf"](p, rng, tols["vertex_irf"], draws),
           SUITES["phi_lemma"](p, rng, tols["phi_lemma"]),
           SUITES["det_s_hat"](p, rng, tols["det_s_hat"]),
           intertwining_suite(p, rng, tols["intertwining"], sizes=tuple(sec["sizes"])),
           SUITES["r8v"](p, rng, tols["r8v"]),
           r8v_residue_suite(p, tols["r8v_residue"])]
    return all(r.passed for r in res), {"suites": [r.to_record() for r in res]}


COMMANDS = {"check": cmd_check, "bethe": cmd_bethe, "qlame": cmd_qlame,
            "irf": cmd_irf, "vertex8": cmd_vertex8}


# --- argument parser ---------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau", help="modular parameter, e.g. 0.9j")
    common.add_argument("--eta", help="step eta, a number or p/q")
    common.add_argument("--seed", type=int, help="seed for random draws (default 42)")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a tolerance; repeatable")

    ap = argparse.ArgumentParser(prog="ellbethe", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="run the identity suites")

    b = sub.add_parser("bethe", parents=[common], help="solve Bethe equations")
    b.add_argument("--Lambda", help="comma separated weights")
    b.add_argument("--z", help="comma separated evaluation points")
    b.add_argument("--c", help="exponent c")
    b.add_argument("--t0", help="comma separated starting roots")
    b.add_argument("--mu", help="base point of the summation functional")
    b.add_argument("--eight-vertex", action="store_true", default=None,
                   help="also build the eight-vertex eigenvector (needs eta = p/q)")

    q = sub.add_parser("qlame", parents=[common], help="q-Lame spectra")
    q.add_argument("--m", type=int)
    q.add_argument("--c")
    q.add_argument("--t0")
    q.add_argument("--c-start")
    q.add_argument("--c-stop")
    q.add_argument("--c-steps", type=int)
    q.add_argument("--csv", help="write the continuation trace here")
    q.add_argument("--classical-limit", action="store_true", default=None)

    i = sub.add_parser("irf", parents=[common], help="IRF path basis against the operators")
    i.add_argument("--n", type=int, action="append", help="chain length; repeatable")

    v = sub.add_parser("vertex8", parents=[common], help="vertex-IRF and eight-vertex checks")
    v.add_argument("--draws", type=int)
    return ap


def _overrides(args):
    """Flag values for the command section of the config."""
    if args.command == "bethe":
        ov = {"Lambda": [int(x) for x in args.Lambda.split(",")] if args.Lambda else None,
              "z": args.z, "c": args.c, "t0": args.t0, "mu": args.mu,
              "eight_vertex": args.eight_vertex}
    elif args.command == "qlame":
        ov = {"m": args.m, "c": args.c, "t0": args.t0, "classical_limit": args.classical_limit}
        if args.c_steps is not None:
            ov["c_path"] = {"start": args.c_start or "0", "stop": args.c_stop or "0",
                            "steps": args.c_steps}
    elif args.command == "irf":
        ov = {"sizes": args.n}
    elif args.command == "vertex8":
        ov = {"draws": args.draws}
    else:
        ov = {}
    return ov


def main(argv=None):
    args = build_parser().parse_args(argv)
    out_path = args.out
    try:
        cfg = resolve_config(args, _overrides(args))
        p, frac, seed = make_params(cfg)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        emit({"command": args.command, "version": __version__, "status": "config_error",
              "error": str(exc)}, out_path)
        return EXIT_CONFIG
    report = header(args.command, p, frac, seed, cfg)
    try:
        ok, body = COMMANDS[args.command](cfg, p, frac, seed)
    except ConvergenceError as exc:
        report.update(status="no_convergence", error=str(exc),
                      trace=[list(x) for x in exc.trace], last=exc.last)
        emit(report, out_path)
        sys.stderr.write(f"no convergence: {exc}\n")
        return EXIT_CONVERGENCE
    except (ConfigError, DegenerateRootsError, PoleError, ValueError) as exc:
        report.update(status="config_error", error=str(exc))
        emit(report, out_path)
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    csv_text = body.pop("csv", None)
    if csv_text is not None:
        csv_path = getattr(args, "csv", None)
        if csv_path:
            with open(csv_path, "w") as fh:
                fh.write(csv_text)
            body["csv_path"] = csv_path
        else:
            body["csv"] = csv_text
    report.update(body)
    report["status"] = "pass" if ok else "fail"
    emit(report, out_path)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
