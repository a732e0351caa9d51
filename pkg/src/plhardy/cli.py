"""Command-line front end.

Subcommands map one-to-one onto the library:

    exponents   critical decay exponents for given (N, p, mu)
    coeffs      asymptotic expansion coefficients as CSV + JSON summary
    solve       shoot a ground state, write trajectory CSVs + amplitude JSON
    verify      run limit/rate/bound checks on saved trajectories
    barriers    tabulate a named barrier with its source and residual
    sweep       solve+verify over a grid of parameter values

Configuration is a flat "key = value" text file with bracketed section
headers (the stdlib configparser dialect); every key is validated against
the known schema, so typos fail loudly.  Command-line flags override file
values.  The output root defaults to $PLHARDY_OUT when set.

Exit codes: 0 success / all checks passed, 1 verification failed,
2 invalid input, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import BracketingError, InvalidParams, NoConvergence
from .exponents import ProblemParams, gamma_mu, mu_bar, solve_exponents
from .expansion import build_series, default_order
from .barriers import (
    InfinityBarrier,
    OriginBarrier,
    Q_func,
    choose_origin_params,
    exp_profile,
    origin_source,
    residual_radial,
)
from .pipeline import SolverOptions, solve_ground_state
from .radial_ode import Nonlinearity
from .serialize import dumps_json, fmt_float, solution_from_csv, solution_to_csv
from .verify import (
    PHI1,
    W_MINUS_LIMIT,
    bounds_check,
    expansion_check,
    infinity_limit,
    origin_limit,
    rate_fit,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3

_SCHEMA = {
    "params": {"N", "p", "mu", "m"},
    "nonlinearity": {"terms"},
    "solver": {
        "r0",
        "r_max",
        "tol",
        "tol_C",
        "C_lo",
        "C_hi",
        "r_switch",
        "tail_pad",
        "tail_tol",
    },
    "expansion": {"order"},
    "windows": {"origin", "infinity"},
    "output": {"dir", "stem"},
    "sweep": {"N", "p", "mu", "m"},
}


@dataclass
class RunConfig:
    """Validated run configuration; flags mirror these fields."""

    params: ProblemParams
    f: Nonlinearity
    solver: SolverOptions
    expansion_order: int | None
    origin_window: tuple[float, float]
    infinity_window: tuple[float, float]
    outdir: Path
    stem: str
    sweep: dict[str, list[float]] = field(default_factory=dict)


def _parse_terms(text: str):
    text = text.strip()
    if not text:
        return ()
    out = []
    for chunk in text.split(";"):
        a, _, e = chunk.partition(":")
        out.append((float(a), float(e)))
    return tuple(out)


def _parse_window(text: str):
    lo, _, hi = text.partition(",")
    return float(lo), float(hi)


def load_config(path: str | None, overrides: argparse.Namespace) -> RunConfig:
    raw: dict[str, dict[str, str]] = {}
    if path is not None:
        cp = configparser.ConfigParser()
        cp.optionxform = str  # keys are case-sensitive (N vs n)
        read = cp.read(path)
        if not read:
            raise InvalidParams(f"config file {path} not found")
        for section in cp.sections():
            if section not in _SCHEMA:
                raise InvalidParams(f"unknown config section [{section}]")
            for key in cp[section]:
                if key not in _SCHEMA[section]:
                    raise InvalidParams(f"unknown key {key!r} in section [{section}]")
                raw.setdefault(section, {})[key] = cp[section][key]

    def pick(section, key, flag_value, default=None):
        if flag_value is not None:
            return flag_value
        return raw.get(section, {}).get(key, default)

    n_val = pick("params", "N", overrides.N)
    p_val = pick("params", "p", overrides.p)
    if n_val is None or p_val is None:
        raise InvalidParams("N and p are required (config [params] or --N/--p)")
    params = ProblemParams(
        N=float(n_val),
        p=float(p_val),
        mu=float(pick("params", "mu", overrides.mu, 0.0)),
        m=float(pick("params", "m", overrides.m, 1.0)),
    )
    f = Nonlinearity.powers(
        _parse_terms(str(pick("nonlinearity", "terms", overrides.terms, ""))), params
    )
    solver = SolverOptions(
        r0=float(pick("solver", "r0", overrides.r0, 1e-6)),
        r_max=float(pick("solver", "r_max", overrides.r_max, 25.0)),
        tol=float(pick("solver", "tol", overrides.tol, 1e-10)),
        tol_C=float(pick("solver", "tol_C", overrides.tol_C, 1e-10)),
        C_lo=float(pick("solver", "C_lo", overrides.C_lo, 0.1)),
        C_hi=float(pick("solver", "C_hi", overrides.C_hi, 50.0)),
        r_switch=float(pick("solver", "r_switch", overrides.r_switch, 1.0)),
        tail_pad=float(pick("solver", "tail_pad", None, 5.0)),
        tail_tol=float(pick("solver", "tail_tol", None, 1e-12)),
    )
    order_val = pick("expansion", "order", overrides.order)
    order = None if order_val in (None, "") else int(order_val)
    origin_window = _parse_window(
        str(pick("windows", "origin", overrides.origin_window, "1e-5,1e-3"))
    )
    infinity_window = _parse_window(
        str(pick("windows", "infinity", overrides.infinity_window, "10,20"))
    )
    out_root = os.environ.get("PLHARDY_OUT", ".")
    outdir = Path(pick("output", "dir", overrides.outdir, out_root))
    stem = str(pick("output", "stem", overrides.stem, "run"))
    sweep = {}
    for key, text in raw.get("sweep", {}).items():
        sweep[key] = [float(x) for x in text.split(",")]
    return RunConfig(
        params=params,
        f=f,
        solver=replace(solver, expansion_order=order),
        expansion_order=order,
        origin_window=origin_window,
        infinity_window=infinity_window,
        outdir=outdir,
        stem=stem,
        sweep=sweep,
    )


def _common_flags(sp):
    sp.add_argument("--config", default=None, help="flat key=value config file")
    sp.add_argument("--N", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--m", type=float, default=None)
    sp.add_argument(
        "--terms",
        default=None,
        help="nonlinearity as coeff:exponent pairs joined by ';' (power form)",
    )
    sp.add_argument("--r0", type=float, default=None)
    sp.add_argument("--r-max", dest="r_max", type=float, default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--tol-C", dest="tol_C", type=float, default=None)
    sp.add_argument("--C-lo", dest="C_lo", type=float, default=None)
    sp.add_argument("--C-hi", dest="C_hi", type=float, default=None)
    sp.add_argument("--r-switch", dest="r_switch", type=float, default=None)
    sp.add_argument("--order", default=None, help="expansion order (default: int part of p)")
    sp.add_argument("--origin-window", dest="origin_window", default=None)
    sp.add_argument("--infinity-window", dest="infinity_window", default=None)
    sp.add_argument("--outdir", default=None)
    sp.add_argument("--stem", default=None)


def cmd_exponents(cfg: RunConfig) -> int:
    exps = solve_exponents(cfg.params)
    res1 = gamma_mu(exps.gamma1, cfg.params)
    res2 = gamma_mu(exps.gamma2, cfg.params)
    print(f"{'quantity':<12}{'value':>24}")
    for name, val in (
        ("gamma1", exps.gamma1),
        ("gamma2", exps.gamma2),
        ("mu_bar", exps.mu_bar),
        ("residual1", res1),
        ("residual2", res2),
    ):
        print(f"{name:<12}{fmt_float(val):>24}")
    payload = {
        "gamma1": exps.gamma1,
        "gamma2": exps.gamma2,
        "mu_bar": exps.mu_bar,
        "residuals": [res1, res2],
        "params": {"N": cfg.params.N, "p": cfg.params.p, "mu": cfg.params.mu},
    }
    print(dumps_json(payload))
    return EXIT_OK


def cmd_coeffs(cfg: RunConfig) -> int:
    series = build_series(cfg.params, cfg.expansion_order)
    print("i,c_i")
    for i, ci in enumerate(series.c):
        print(f"{i},{fmt_float(ci)}")
    payload = {
        "alpha0": series.alpha0,
        "phi_inf": series.phi_inf,
        "hardy_coeff": series.hardy_coeff,
        "k": series.k,
        "extrapolated": series.extrapolated,
    }
    print(dumps_json(payload))
    return EXIT_OK


def _solution_paths(cfg: RunConfig):
    base = cfg.outdir
    return (
        base / f"{cfg.stem}_origin.csv",
        base / f"{cfg.stem}_infinity.csv",
        base / f"{cfg.stem}_amplitude.json",
        base / f"{cfg.stem}_report.json",
    )


def cmd_solve(cfg: RunConfig) -> int:
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    run = solve_ground_state(cfg.params, cfg.f, cfg.solver)
    p_origin, p_inf, p_amp, _ = _solution_paths(cfg)
    solution_to_csv(run.origin, p_origin)
    solution_to_csv(run.infinity, p_inf)
    payload = {
        "C_star": run.c_star,
        "bracket": list(run.shoot.bracket),
        "orientation": run.shoot.orientation,
        "gamma1": run.gamma1,
        "iterations": len(run.shoot.history),
        "r_match": run.r_match,
        "match_mismatch": run.match_mismatch,
        "series_c": list(run.series.c),
        "series_hardy_coeff": run.series.hardy_coeff,
    }
    with open(p_amp, "w") as fh:
        fh.write(dumps_json(payload) + "\n")
    print(f"C_star = {fmt_float(run.c_star)}")
    print(f"wrote {p_origin}, {p_inf}, {p_amp}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    p_origin, p_inf, _, p_report = _solution_paths(cfg)
    origin = solution_from_csv(p_origin)
    infinity = solution_from_csv(p_inf)
    params = origin.params
    exps = solve_exponents(params)
    series = build_series(params, cfg.expansion_order)
    reports = {}
    reports["origin_limit"] = origin_limit(
        origin, exps.gamma1, cfg.origin_window
    ).to_dict()
    reports["infinity_limit"] = infinity_limit(
        infinity, params, cfg.infinity_window
    ).to_dict()
    reports["expansion_check"] = expansion_check(
        infinity, series, cfg.infinity_window
    ).to_dict()
    reports["phi1_rate"] = rate_fit(infinity, PHI1, cfg.infinity_window).to_dict()
    if params.mu > 0.0:
        reports["w_rate"] = rate_fit(
            origin, W_MINUS_LIMIT, cfg.origin_window, gamma1=exps.gamma1
        ).to_dict()
    reports["bounds"] = bounds_check(
        origin, infinity, params, exps, cfg.origin_window, cfg.infinity_window
    ).to_dict()
    all_passed = all(rep.get("passed", True) for rep in reports.values())
    reports["all_passed"] = all_passed
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    with open(p_report, "w") as fh:
        fh.write(dumps_json(reports) + "\n")
    for name, rep in reports.items():
        if isinstance(rep, dict) and "passed" in rep:
            print(f"{name:<18} {'PASS' if rep['passed'] else 'FAIL'}")
    print(f"report written to {p_report}")
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def cmd_barriers(cfg: RunConfig, which: str, gamma: float, bdelta: float, radii) -> int:
    params = cfg.params
    rows = []
    if which == "origin":
        delta_h, eps, _ = choose_origin_params(params)
        barrier = OriginBarrier.make(params, delta_h, eps)
        for r in radii:
            src = origin_source(barrier, r, params)
            resid = residual_radial(barrier, r, params, mass=0.0) - src * barrier.value(
                r
            ) ** (params.p - 1.0)
            rows.append((r, barrier.value(r), src, resid))
    elif which == "exp":
        eps_m = 0.5 * params.m
        alpha = ((params.m - eps_m) / (params.p - 1.0)) ** (1.0 / params.p)
        for r in radii:
            val, src = exp_profile(r, alpha, params)
            prof = (
                lambda x: math.exp(-alpha * x),
                lambda x: -alpha * math.exp(-alpha * x),
                lambda x: alpha * alpha * math.exp(-alpha * x),
            )
            resid = residual_radial(
                prof, r, params, mass=params.m - eps_m, include_hardy=False
            ) - src * val ** (params.p - 1.0)
            rows.append((r, val, src, resid))
    elif which == "v_gamma":
        barrier = InfinityBarrier(gamma=gamma, delta=bdelta, params=params)
        for r in radii:
            val = barrier.value(r)
            src = Q_func(barrier, r, params)
            resid = residual_radial(
                barrier, r, params, include_hardy=False
            ) - src * val ** (params.p - 1.0)
            rows.append((r, val, src, resid))
    else:
        raise InvalidParams(f"unknown barrier {which!r}")
    print("r,value,source,residual")
    for row in rows:
        print(",".join(fmt_float(x) for x in row))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.sweep:
        raise InvalidParams("sweep requires a [sweep] section or --sweep flags")
    keys = sorted(cfg.sweep)
    grids = [cfg.sweep[k] for k in keys]
    combos = [[]]
    for grid in grids:
        combos = [c + [v] for c in combos for v in grid]
    index = []
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    for i, combo in enumerate(combos):
        label = "_".join(f"{k}{fmt_float(v)}" for k, v in zip(keys, combo))
        sub = cfg.outdir / f"case_{i:03d}_{label}"
        pdict = {
            "N": cfg.params.N,
            "p": cfg.params.p,
            "mu": cfg.params.mu,
            "m": cfg.params.m,
        }
        pdict.update(dict(zip(keys, combo)))
        entry = {"case": i, "dir": sub.name}
        entry.update(pdict)
        try:
            params = ProblemParams(**pdict)
            f = Nonlinearity.powers(cfg.f.terms, params)
            case_cfg = replace_config(cfg, params=params, f=f, outdir=sub)
            code = cmd_solve(case_cfg)
            if code == EXIT_OK:
                code = cmd_verify(case_cfg)
            entry["exit_code"] = code
            entry["passed"] = code == EXIT_OK
        except (InvalidParams, BracketingError) as exc:
            entry["exit_code"] = EXIT_INVALID
            entry["passed"] = False
            entry["error"] = str(exc)
        except NoConvergence as exc:
            entry["exit_code"] = EXIT_NO_CONVERGENCE
            entry["passed"] = False
            entry["error"] = str(exc)
        index.append(entry)
    index_path = cfg.outdir / "index.json"
    with open(index_path, "w") as fh:
        fh.write(dumps_json({"cases": index}) + "\n")
    print(f"index written to {index_path}")
    return EXIT_OK if all(e["passed"] for e in index) else EXIT_VERIFY_FAILED


def replace_config(cfg: RunConfig, **kw) -> RunConfig:
    data = dict(
        params=cfg.params,
        f=cfg.f,
        solver=cfg.solver,
        expansion_order=cfg.expansion_order,
        origin_window=cfg.origin_window,
        infinity_window=cfg.infinity_window,
        outdir=cfg.outdir,
        stem=cfg.stem,
        sweep=cfg.sweep,
    )
    data.update(kw)
    return RunConfig(**data)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plhardy",
        description="Radial asymptotics for the p-Laplace equation with Hardy potential",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("exponents", "coeffs", "solve", "verify", "sweep"):
        sp = sub.add_parser(name)
        _common_flags(sp)
    sp = sub.add_parser("barriers")
    _common_flags(sp)
    sp.add_argument("--barrier", choices=("origin", "exp", "v_gamma"), default="origin")
    sp.add_argument("--gamma", type=float, default=-1.0)
    sp.add_argument("--barrier-delta", dest="bdelta", type=float, default=0.3)
    sp.add_argument("--r-lo", dest="r_lo", type=float, default=1.0)
    sp.add_argument("--r-hi", dest="r_hi", type=float, default=100.0)
    sp.add_argument("--n-radii", dest="n_radii", type=int, default=25)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        if args.command == "exponents":
            return cmd_exponents(cfg)
        if args.command == "coeffs":
            return cmd_coeffs(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "barriers":
            radii = np.geomspace(args.r_lo, args.r_hi, args.n_radii)
            return cmd_barriers(cfg, args.barrier, args.gamma, args.bdelta, radii)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        raise InvalidParams(f"unknown command {args.command!r}")
    except (InvalidParams, BracketingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NoConvergence as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
