"""Command-line front end.

Subcommands are thin wrappers over the library: ``sample``, ``density``,
``cond-copula``, ``check-simplified``, ``tau``, ``mixture-check`` and
``mo-grid``. Output is CSV or JSON on stdout (or ``--out``); floats print
with shortest round-trip precision. Exit codes: 0 success, 2 validation
error, 1 numerical failure.

Model spec files are JSON with a ``type`` tag:

* ``{"type": "pcc", "dim": 3, "order": [...], "edges": [...]}``
* ``{"type": "archimedean", "family": "gumbel", "theta": 2.0, "dim": 3}``
* ``{"type": "elliptical", "generator": "pearson7", "dim": 3,
    "R": [...row-major...], "shape": 3.0}``
* ``{"type": "mo", "lambda": 2.0}``
"""

import argparse
import json
import sys

import numpy as np

from . import __version__, archimedean, bicop, elliptical, mo, pcc
from .errors import (BoundaryError, ConvergenceError, NoDensityError,
                     ParameterError)


def _fmt(x):
    return repr(float(x))


def _write(text, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) if not isinstance(x, str) else x
                              for x in row))
    return "\n".join(lines) + "\n"


def _json_report(payload):
    return json.dumps(payload, indent=2) + "\n"


def load_model(path):
    """Parse a model spec file into its library object."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read spec file: {exc}")
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed spec JSON in {path}: {exc}")
    kind = raw.get("type")
    if kind == "pcc":
        return "pcc", pcc.PccSpec.from_dict(raw), raw
    if kind == "archimedean":
        for field in ("family", "theta"):
            if field not in raw:
                raise ParameterError(f"archimedean spec: missing {field!r}")
        gen = archimedean.ArchimedeanGenerator(
            raw["family"], raw["theta"], max_dim=raw.get("dim", 3))
        return "archimedean", gen, raw
    if kind == "elliptical":
        spec = elliptical.EllipticalSpec.from_dict(raw)
        return "elliptical", spec, raw
    if kind == "mo":
        return "mo", mo.MoSpec.from_dict(raw), raw
    raise ParameterError(
        f"spec field 'type' must be pcc|archimedean|elliptical|mo, "
        f"got {kind!r}")


def _density_callable(kind, model):
    if kind == "pcc":
        if model.dim != 3:
            raise ParameterError("conditional extraction needs dim = 3")
        return pcc._as_density_callable(model)
    if kind == "archimedean":
        return archimedean.trivariate_copula_density(model)
    if kind == "elliptical":
        return elliptical.copula_density_callable(model)
    raise ParameterError(f"{kind} models have no trivariate density")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args):
    kind, model, _ = load_model(args.spec)
    if kind == "pcc":
        u = pcc.pcc_sample(model, args.n, args.seed)
        header = [f"u{j + 1}" for j in range(model.dim)]
        _write(_csv(header, u), args.out)
    elif kind == "mo":
        x, u = mo.mo_sample(model, args.n, args.seed)
        header = ["x1", "x2", "x3", "u1", "u2", "u3"]
        _write(_csv(header, np.column_stack([x, u])), args.out)
    else:
        raise ParameterError(f"sampling is not supported for {kind} specs")
    return 0


def cmd_density(args):
    kind, model, _ = load_model(args.spec)
    pts = np.array([[float(t) for t in p.split(",")] for p in args.point])
    if kind == "pcc":
        if pts.shape[1] != model.dim:
            raise ParameterError(f"points need {model.dim} coordinates")
        vals = pcc.pcc_density(model, pts)
    elif kind == "archimedean":
        if pts.shape[1] != 3:
            raise ParameterError("points need 3 coordinates")
        dens = archimedean.trivariate_copula_density(model)
        vals = dens(pts[:, 0], pts[:, 1], pts[:, 2])
    elif kind == "elliptical":
        if pts.shape[1] != 3:
            raise ParameterError("points need 3 coordinates")
        dens = elliptical.copula_density_callable(model)
        vals = dens(pts[:, 0], pts[:, 1], pts[:, 2])
    else:
        raise ParameterError("mo specs have no density (singular copula)")
    vals = np.atleast_1d(vals)
    header = [f"u{j + 1}" for j in range(pts.shape[1])] + ["density"]
    _write(_csv(header, np.column_stack([pts, vals])), args.out)
    return 0


def cmd_cond_copula(args):
    kind, model, raw = load_model(args.spec)
    dens = _density_callable(kind, model)
    grid = pcc.extract_conditional_copula(dens, args.cond_index - 1,
                                          args.cond_value, n=args.grid,
                                          mesh=args.mesh)
    if args.format == "json":
        _write(_json_report({"tool_version": __version__, "spec": raw,
                             "cond_index": args.cond_index,
                             **grid.to_dict()}), args.out)
    else:
        rows = []
        for i, v1 in enumerate(grid.levels):
            for j, v2 in enumerate(grid.levels):
                rows.append((v1, v2, grid.grid[i, j]))
        _write(_csv(["v1", "v2", "value"], rows), args.out)
    return 0


def cmd_check_simplified(args):
    kind, model, raw = load_model(args.spec)
    dens = _density_callable(kind, model)
    k = int(args.cond_grid)
    cond_grid = np.arange(1, k + 1) / (k + 1.0)
    report = pcc.simplified_assumption_check(dens, args.cond_index - 1,
                                             cond_grid, n=args.grid,
                                             mesh=args.mesh)
    payload = {"tool_version": __version__, "spec": raw}
    payload.update(report.to_dict())
    if not args.full_grids:
        del payload["grids"]
    _write(_json_report(payload), args.out)
    return 0


_TAU_PARAM_FLAGS = {
    "clayton": ("theta",), "gumbel": ("theta",), "amh": ("theta",),
    "frank": ("alpha",), "cuadrasauge": ("alpha",),
    "gaussian": ("rho",), "studentt": ("rho", "nu"), "indep": (),
}


def cmd_tau(args):
    fam = args.family
    if fam not in _TAU_PARAM_FLAGS:
        raise ParameterError(f"unknown family {fam!r}")
    if args.params is not None:
        params = tuple(float(x) for x in args.params.split(","))
    else:
        params = []
        for flag in _TAU_PARAM_FLAGS[fam]:
            val = getattr(args, flag)
            if val is None:
                raise ParameterError(
                    f"family {fam} needs --{flag} (or --params)")
            params.append(val)
        params = tuple(params)
    spec = bicop.BivariateCopulaSpec(fam, params)
    sys.stdout.write(_fmt(bicop.kendall_tau(spec)) + "\n")
    return 0


def _parse_t_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError("--t-grid must be start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or stop < start or start < 0:
        raise ParameterError(f"bad --t-grid {text!r}")
    return np.linspace(start, stop, count)


def cmd_mixture_check(args):
    params = tuple(float(x) for x in args.params.split(","))
    mix = elliptical.MixingDistribution(args.mixing, params)
    mix.validate()
    t_grid = _parse_t_grid(args.t_grid)
    variants = (("e4", "f3_first", "f3_second") if args.variant == "all"
                else (args.variant,))
    profiles = {}
    for var in variants:
        prof = elliptical.simplified_ratio_profile(mix, args.d, t_grid, var)
        profiles[var] = {
            "profile": prof.tolist(),
            "relative_spread": elliptical.relative_spread(prof)}
    payload = {"tool_version": __version__,
               "spec": {"mixing": args.mixing, "params": list(params),
                        "d": args.d, "t_grid": t_grid.tolist()},
               "profiles": profiles}
    _write(_json_report(payload), args.out)
    return 0


def cmd_mo_grid(args):
    spec = mo.MoSpec(args.lam)
    rows = mo.mo_grid(spec, args.u3, n=args.grid)
    out_rows = [(r[0], r[1], r[2], "true" if r[3] else "false")
                for r in rows]
    _write(_csv(["v1", "v2", "value", "unique"], out_rows), args.out)
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="paircop",
        description="Pair copula constructions and conditional-copula "
                    "diagnostics")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw vine / MO copula samples")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True,
                    help="explicit seed (no hidden entropy)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("density", help="evaluate a copula density")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--point", action="append", required=True,
                    help="comma-separated coordinates; repeatable")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("cond-copula",
                        help="numerically extract a conditional copula")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--cond-index", type=int, default=3,
                    help="1-based index of the conditioning variable")
    sp.add_argument("--cond-value", type=float, required=True)
    sp.add_argument("--grid", type=int, default=pcc.DEFAULT_GRID_N)
    sp.add_argument("--mesh", type=int, default=pcc.DEFAULT_MESH)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cond_copula)

    sp = sub.add_parser("check-simplified",
                        help="test the simplifying assumption numerically")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--cond-index", type=int, default=3)
    sp.add_argument("--cond-grid", type=int, default=9,
                    help="number of conditioning values k/(K+1)")
    sp.add_argument("--grid", type=int, default=pcc.DEFAULT_GRID_N)
    sp.add_argument("--mesh", type=int, default=pcc.DEFAULT_MESH)
    sp.add_argument("--full-grids", action="store_true",
                    help="embed all extracted lattices in the report")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_check_simplified)

    sp = sub.add_parser("tau", help="population Kendall's tau of a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--params", help="comma-separated parameter vector")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("mixture-check",
                        help="scale-mixture moment-ratio profiles")
    sp.add_argument("--mixing", required=True,
                    choices=("gamma", "two_point", "log_normal"))
    sp.add_argument("--params", required=True)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--t-grid", default="0:5:11")
    sp.add_argument("--variant", default="all",
                    choices=("all", "e4", "f3_first", "f3_second"))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_mixture_check)

    sp = sub.add_parser("mo-grid",
                        help="Marshall-Olkin conditional-copula lattice")
    sp.add_argument("--lam", "--lambda", dest="lam", type=float,
                    required=True)
    sp.add_argument("--u3", type=float, required=True)
    sp.add_argument("--grid", type=int, default=pcc.DEFAULT_GRID_N)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_mo_grid)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except (ParameterError, BoundaryError, NoDensityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
