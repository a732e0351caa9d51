"""On-disk formats: self-describing trajectory CSV and deterministic JSON.

A trajectory file carries its own metadata in "# key=value" header lines
followed by r,logu,v columns.  Floats are written with 17 significant
digits so a round trip preserves at least 15 of them (in fact this format
round-trips doubles exactly).

JSON output formats every float the same way and sorts keys, so identical
inputs produce bit-identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParams
from .exponents import ProblemParams
from .radial_ode import Nonlinearity, RadialSolution

__all__ = [
    "fmt_float",
    "dumps_json",
    "solution_to_csv",
    "solution_from_csv",
]


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        x = 0.0  # collapse negative zero for stable output
    return format(x, ".17g")


def dumps_json(obj, indent: int = 0) -> str:
    """Minimal deterministic JSON writer with fixed float formatting."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
        return f'"{out}"'
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [dumps_json(x, indent) for x in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, dict):
        keys = sorted(obj.keys())
        inner = ",\n".join(
            f'{pad}  "{k}": {dumps_json(obj[k], indent + 2)}' for k in keys
        )
        return "{\n" + inner + f"\n{pad}}}"
    raise InvalidParams(f"cannot serialize {type(obj)} to JSON")


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps_json(obj))
        fh.write("\n")


def _terms_to_str(f: Nonlinearity) -> str:
    return ";".join(f"{fmt_float(a)}:{fmt_float(e)}" for a, e in f.terms)


def _terms_from_str(s: str):
    if not s:
        return ()
    out = []
    for chunk in s.split(";"):
        a, e = chunk.split(":")
        out.append((float(a), float(e)))
    return tuple(out)


def solution_to_csv(sol: RadialSolution, path):
    """Write one trajectory as a self-describing CSV file."""
    meta = {
        "chart": sol.chart,
        "N": fmt_float(sol.params.N),
        "p": fmt_float(sol.params.p),
        "mu": fmt_float(sol.params.mu),
        "m": fmt_float(sol.params.m),
        "terms": _terms_to_str(sol.f),
        "amplitude": "" if sol.amplitude is None else fmt_float(sol.amplitude),
        "gamma1": "" if sol.gamma1 is None else fmt_float(sol.gamma1),
        "termination": sol.termination,
    }
    with open(path, "w") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}={v}\n")
        fh.write("r,logu,v\n")
        for r, lu, v in zip(sol.r, sol.logu, sol.v):
            fh.write(f"{fmt_float(r)},{fmt_float(lu)},{fmt_float(v)}\n")


def solution_from_csv(path) -> RadialSolution:
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val
            elif line.startswith("r,"):
                continue
            else:
                rows.append([float(x) for x in line.split(",")])
    required = {"chart", "N", "p", "mu", "m"}
    missing = required - meta.keys()
    if missing:
        raise InvalidParams(f"trajectory file missing metadata keys {sorted(missing)}")
    params = ProblemParams(
        N=float(meta["N"]), p=float(meta["p"]), mu=float(meta["mu"]), m=float(meta["m"])
    )
    f = Nonlinearity.powers(_terms_from_str(meta.get("terms", "")), params)
    data = np.asarray(rows, dtype=float)
    amplitude = meta.get("amplitude", "")
    gamma1 = meta.get("gamma1", "")
    return RadialSolution(
        chart=meta["chart"],
        r=data[:, 0],
        logu=data[:, 1],
        v=data[:, 2],
        params=params,
        f=f,
        amplitude=float(amplitude) if amplitude else None,
        gamma1=float(gamma1) if gamma1 else None,
        termination=meta.get("termination", "reached_r_end"),
    )
