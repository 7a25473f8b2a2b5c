"""Command-line interface: ``fnorm <command> [options]``.

Results are printed as a JSON object ``{command, inputs, outputs, diagnostics}``.
Exit codes: 0 success, 1 domain error, 2 numeric failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import LogFNorm, ProductFNorm, clt_fnorm_demo, signed_from_dict
from .distributions import Empirical, SampleMatrix, _load_json, load_spec, spec_from_dict, validate_H
from .empirical import clt_covariance, empirical_eval, empirical_pickands, simulate_limit_path
from .errors import (
    BridgeRepresentationUnavailable,
    CdfUnavailable,
    DomainError,
    FNormError,
    IntegrationFailure,
    InvalidSpecError,
    NotConvexError,
    ProductUnavailable,
)
from .geometry import SpherePointCloud, hausdorff, hr_sphere_param, parse_lambda_grid, trace_sphere
from .inversion import builtin_norm, classify_2d, extremal_fit, invert_to_cdf
from .metrics import wasserstein_equivalence_experiment, wasserstein_product
from .norms import make_handle
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _points(text: str) -> list[list[float]]:
    """Semicolon-separated points, e.g. ``0.5,1;0.7,1``."""
    return [_vector(p) for p in text.split(";") if p.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_quad(p):
    g = p.add_argument_group("quadrature")
    g.add_argument("--abs-tol", type=float, default=1e-10, help="absolute tolerance of adaptive quadrature (default 1e-10)")
    g.add_argument("--max-subdivisions", type=int, default=10_000, help="bisection budget (default 10000)")
    g.add_argument("--truncation-growth", type=float, default=2.0, help="geometric growth of the cutoff (default 2)")
    g.add_argument("--tail-tol", type=float, default=1e-12, help="neglected tail mass (default 1e-12)")


def _config(args) -> QuadratureConfig:
    return QuadratureConfig(args.abs_tol, args.max_subdivisions, args.truncation_growth, args.tail_tol)


def _add_format(p):
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format for tables (default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fnorm", description="F-norms of nonnegative random vectors.")
    parser.add_argument("--version", action="version", version=f"fnorm {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    spec_help = "distribution spec: inline JSON, a JSON file, or a bare type name such as 'uniform'"

    p = sub.add_parser("eval", help="evaluate an F-norm at a point")
    p.add_argument("--spec", required=True, help=spec_help)
    p.add_argument("--point", required=True, type=_vector, help="x0,x1,...,xd (any signs; only |xi| matter)")
    p.add_argument("--method", choices=("auto", "closed", "quad", "mc"), default="auto")
    p.add_argument("--mc-n", type=int, default=10**6, help="Monte Carlo sample size (default 1e6)")
    p.add_argument("--seed", type=int, help="seed, required for --method mc")
    _add_quad(p)

    p = sub.add_parser("invert", help="recover F(x) from the F-norm")
    p.add_argument("--spec", required=True, help=spec_help)
    p.add_argument("--at", required=True, type=_points, help="x1,...,xd (> 0); several points separated by ';'")
    p.add_argument("--method", choices=("auto", "closed", "quad"), default="auto")
    _add_quad(p)

    p = sub.add_parser("classify", help="decide whether a norm on R^2 is an F-norm")
    p.add_argument("--norm", required=True, help="builtin:lp | builtin:l1 | builtin:l2 | builtin:sup, or a spec for its F-norm")
    p.add_argument("--p", type=float, default=2.0, help="order of builtin:lp (default 2)")
    p.add_argument("--scale", type=float, default=1.0, help="multiply the builtin norm by this factor (default 1)")
    p.add_argument("--grid", action="store_true", help="include the recovered df grid in JSON output")
    _add_format(p)

    p = sub.add_parser("extremal", help="extremal coefficient of a copula F-norm")
    p.add_argument("--copula", choices=("independence", "comonotone"), required=True)
    p.add_argument("--dim", type=int, default=2, help="copula dimension d (default 2)")
    p.add_argument("--window", type=float, default=0.95, help="fit on x in [window, 1) (default 0.95)")
    p.add_argument("--grid-count", type=int, default=50, help="fit nodes (default 50)")

    p = sub.add_parser("estimate", help="empirical F-norm of a CSV sample")
    p.add_argument("--sample", required=True, help="CSV file with header x1..xd")
    p.add_argument("--point", type=_vector, help="x0,x1,...,xd")
    p.add_argument("--pickands", type=_vector, help="simplex point t1..td for the empirical Pickands function")

    p = sub.add_parser("clt", help="covariance of the d=1 limit process")
    p.add_argument("--spec", required=True, help=spec_help)
    p.add_argument("--p1", required=True, type=_vector, help="x,y with x > 0, y >= 0")
    p.add_argument("--p2", required=True, type=_vector, help="x,y with x > 0, y >= 0")
    _add_quad(p)

    p = sub.add_parser("limit-sim", help="simulate the limit process through a Brownian bridge")
    p.add_argument("--spec", required=True, help=spec_help)
    p.add_argument("--paths", type=int, default=10_000, help="number of simulated paths (default 10000)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=_points, default=_points("0.5,1;0.7,1"), help="points x,y separated by ';'")
    p.add_argument("--bridge-steps", type=int, default=2**14, help="bridge lattice size (default 2^14)")
    p.add_argument("--out", help="write the per-point table to this CSV file")
    _add_format(p)

    p = sub.add_parser("product", help="product of two F-norms")
    p.add_argument("--specA", required=True, help=spec_help)
    p.add_argument("--specB", required=True, help=spec_help)
    p.add_argument("--point", required=True, type=_vector)
    p.add_argument("--method", choices=("auto", "tonelli", "tonelli-left", "tonelli-right", "mc"), default="auto")
    p.add_argument("--mc-n", type=int, default=10**6)
    p.add_argument("--seed", type=int, help="seed, required for --method mc")
    _add_quad(p)

    p = sub.add_parser("logfnorm", help="F-norm of exp(X) for a signed X")
    p.add_argument("--spec", required=True, help="normal | neg-gumbel | rademacher | mvnormal, as JSON or name")
    p.add_argument("--point", required=True, type=_vector)
    p.add_argument("--seed", type=int, help="needed when only Monte Carlo applies")
    _add_quad(p)

    p = sub.add_parser("clt-demo", help="log F-norms of normalized sums against their normal limit")
    p.add_argument("--base", default="rademacher", help="rademacher or a centered normal spec")
    p.add_argument("--ns", type=_ints, default=_ints("100,10000"), help="sample sizes n (default 100,10000)")
    p.add_argument("--points", type=_points, default=_points("1,1"), help="points x0,x1 separated by ';'")
    p.add_argument("--reps", type=int, default=10**6, help="Monte Carlo replications (default 1e6)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="write the table to this CSV file")
    _add_format(p)

    p = sub.add_parser("sphere", help="trace the positive-orthant unit sphere")
    p.add_argument("--spec", required=True, help=spec_help)
    p.add_argument("--m", type=int, default=512, help="directions per axis (default 512)")
    p.add_argument("--method", choices=("auto", "closed", "quad"), default="auto")
    p.add_argument("--out", help="write points to this CSV file")
    _add_format(p)
    _add_quad(p)

    p = sub.add_parser("hr-sphere", help="Husler-Reiss unit sphere from its parametrization")
    p.add_argument("--sigma", type=float, required=True, help="sigma (not sigma^2), >= 0")
    p.add_argument("--lambda-grid", default="log:0.01:100:512", help="log:a:b:n, lin:a:b:n or a comma list")
    p.add_argument("--out", help="write points to this CSV file")
    _add_format(p)

    p = sub.add_parser("hausdorff", help="Hausdorff distance between two point clouds")
    p.add_argument("--a", required=True, help="CSV cloud")
    p.add_argument("--b", required=True, help="CSV cloud")
    p.add_argument("--metric", default="l2", help="sup | l1 | l2 | a spec whose F-norm is the metric")

    p = sub.add_parser("wasserstein", help="Wasserstein-1 distance of two specs")
    p.add_argument("--a", required=True, help=spec_help)
    p.add_argument("--b", required=True, help=spec_help)
    _add_quad(p)

    p = sub.add_parser("converge", help="F-norm deviation and Wasserstein distance along a sequence")
    p.add_argument("--sequence", required=True, help="JSON list of specs (inline or file)")
    p.add_argument("--limit", required=True, help=spec_help)
    p.add_argument("--probes", type=_points, help="probe points separated by ';' (default grid on [0,2]^(d+1))")
    p.add_argument("--sphere-m", type=int, help="also report the L2 Hausdorff distance of traced spheres")
    p.add_argument("--out", help="write the table to this CSV file")
    _add_format(p)
    _add_quad(p)

    p = sub.add_parser("validate", help="check condition (H): finite positive marginal means")
    p.add_argument("--spec", required=True, help=spec_help)
    return parser


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="")


def cmd_eval(args):
    spec = load_spec(args.spec)
    if args.method == "mc" and args.seed is None:
        raise UsageError("--method mc requires --seed")
    cfg = _config(args)
    handle = make_handle(spec, args.method, cfg, args.mc_n, args.seed)
    res = handle.evaluate(args.point)
    diag = {"handle": handle.describe()}
    if handle.method == "quad":
        diag["config"] = cfg.to_dict()
    if handle.method == "mc":
        diag.update(seed=args.seed, n=args.mc_n)
    return {"spec": spec.to_dict(), "point": args.point}, res.to_dict(), diag


def cmd_invert(args):
    spec = load_spec(args.spec)
    handle = make_handle(spec, args.method, _config(args))
    rows = [{"x": x, "cdf": invert_to_cdf(handle, x)} for x in args.at]
    out = rows[0] if len(rows) == 1 else {"values": rows}
    out["method"] = handle.method
    return {"spec": spec.to_dict(), "at": args.at}, out, {"steps": [1e-3, 1e-4, 1e-5], "extrapolation": "richardson"}


def cmd_classify(args):
    if args.norm.startswith("builtin:") or args.norm in ("lp", "l1", "l2", "sup"):
        norm = builtin_norm(args.norm, args.p, args.scale)
        inputs = {"norm": args.norm, "p": args.p, "scale": args.scale}
    else:
        spec = load_spec(args.norm)
        h = make_handle(spec)
        if h.dim != 1:
            raise DomainError("classification works on norms of R^2 (d = 1)")
        norm = lambda a, b: args.scale * h.eval([a, b])  # noqa: E731
        inputs = {"norm": spec.to_dict(), "scale": args.scale}
    rep = classify_2d(norm)
    if args.format == "csv":
        return inputs, rep.to_dict(include_grid=False), {}, _table_csv(["t", "F"], rep.recovered_cdf)
    return inputs, rep.to_dict(include_grid=args.grid), {}


def cmd_extremal(args):
    from .distributions import Copula

    spec = Copula(args.copula, args.dim)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = extremal_fit(make_handle(spec), args.window, args.grid_count)
    out = {"theta": fit.theta, "method": "closed"}
    diag = fit.to_dict()
    diag["warnings"] = [str(w.message) for w in caught]
    return {"copula": args.copula, "dim": args.dim, "window": args.window}, out, diag


def cmd_estimate(args):
    sample = SampleMatrix.from_csv(args.sample)
    out = {"method": "empirical", "n": sample.n, "d": sample.d}
    if args.point is None and args.pickands is None:
        raise UsageError("give --point and/or --pickands")
    if args.point is not None:
        out["value"] = empirical_eval(sample, args.point)
        out["error_bound"] = 0.0
    if args.pickands is not None:
        out["pickands"] = empirical_pickands(sample, args.pickands)
    h = validate_H(Empirical(sample))
    diag = {"condition_H": h.to_dict()}
    return {"sample": args.sample, "point": args.point, "pickands": args.pickands}, out, diag


def cmd_clt(args):
    spec = load_spec(args.spec)
    cfg = _config(args)
    val = clt_covariance(spec, args.p1, args.p2, cfg)
    return {"spec": spec.to_dict(), "p1": args.p1, "p2": args.p2}, {"covariance": val, "method": "quad"}, {"config": cfg.to_dict()}


def cmd_limit_sim(args):
    spec = load_spec(args.spec)
    path = simulate_limit_path(spec, args.grid, args.seed, n_paths=args.paths, bridge_steps=args.bridge_steps)
    table = path.table()
    header = ["x", "y", "mean", "variance"]
    cov = np.atleast_2d(path.covariance()).tolist()
    inputs = {"spec": spec.to_dict(), "grid": args.grid, "paths": args.paths}
    diag = {"seed": args.seed, "bridge_steps": args.bridge_steps, "truncation": path.truncation, "method": "mc"}
    text = _table_csv(header, table)
    out = {"covariance": cov, "method": "mc", "rows": [dict(zip(header, r)) for r in table]}
    if args.out:
        _write(args.out, text)
        out["file"] = args.out
    if args.format == "csv":
        return inputs, out, diag, text
    return inputs, out, diag


def cmd_product(args):
    a, b = load_spec(args.specA), load_spec(args.specB)
    if args.method == "mc" and args.seed is None:
        raise UsageError("--method mc requires --seed")
    cfg = _config(args)
    prod = ProductFNorm(make_handle(a, config=cfg), make_handle(b, config=cfg), args.method, cfg, args.mc_n, args.seed)
    res = prod.evaluate(args.point)
    diag = {"product": prod.describe()}
    if res.method == "mc":
        diag["seed"] = args.seed
    return {"specA": a.to_dict(), "specB": b.to_dict(), "point": args.point}, res.to_dict(), diag


def cmd_logfnorm(args):
    obj, _ = _load_json(args.spec)
    signed = signed_from_dict(obj)
    h = LogFNorm(signed, _config(args), args.seed)
    res = h.evaluate(args.point)
    diag = {"generator": h.spec.to_dict()}
    if res.method == "mc":
        diag["seed"] = args.seed
    return {"spec": signed.to_dict(), "point": args.point}, res.to_dict(), diag


def cmd_clt_demo(args):
    obj, _ = _load_json(args.base)
    base = signed_from_dict(obj)
    rows = clt_fnorm_demo(base, args.ns, args.points, args.seed, args.reps)
    header = list(rows[0].keys())
    text = _table_csv(header, [[r[k] for k in header] for r in rows])
    out = {"rows": rows, "method": "mc"}
    if args.out:
        _write(args.out, text)
        out["file"] = args.out
    diag = {"seed": args.seed, "reps": args.reps, "deviation_from": "exact binomial sum" if obj.get("type") == "rademacher" else "exact"}
    inputs = {"base": base.to_dict(), "ns": args.ns, "points": args.points}
    if args.format == "csv":
        return inputs, out, diag, text
    return inputs, out, diag


def _cloud_output(cloud: SpherePointCloud, args, inputs, diag):
    buf = io.StringIO()
    cloud.write_csv(buf)
    text = buf.getvalue()
    out = {"count": len(cloud), "dim": cloud.dim}
    if args.out:
        _write(args.out, text)
        out["file"] = args.out
    else:
        out["points"] = cloud.points.tolist()
    if args.format == "csv":
        return inputs, out, diag, text
    return inputs, out, diag


def cmd_sphere(args):
    spec = load_spec(args.spec)
    handle = make_handle(spec, args.method, _config(args))
    cloud = trace_sphere(handle, args.m)
    diag = {"method": handle.method, "max_residual": cloud.max_residual}
    return _cloud_output(cloud, args, {"spec": spec.to_dict(), "m": args.m}, diag)


def cmd_hr_sphere(args):
    cloud = hr_sphere_param(args.sigma, parse_lambda_grid(args.lambda_grid))
    return _cloud_output(cloud, args, {"sigma": args.sigma, "lambda_grid": args.lambda_grid}, {"method": "closed"})


def cmd_hausdorff(args):
    a = SpherePointCloud.from_csv(args.a)
    b = SpherePointCloud.from_csv(args.b)
    metric = args.metric
    if metric not in ("sup", "l1", "l2"):
        metric = make_handle(load_spec(metric))
    d = hausdorff(a, b, metric)
    return {"a": args.a, "b": args.b, "metric": args.metric}, {"hausdorff": d, "method": "exact"}, {"sizes": [len(a), len(b)]}


def cmd_wasserstein(args):
    a, b = load_spec(args.a), load_spec(args.b)
    cfg = _config(args)
    w = wasserstein_product(a, b, cfg)
    return {"a": a.to_dict(), "b": b.to_dict()}, {"wasserstein": w, "method": "quad"}, {"config": cfg.to_dict()}


def cmd_converge(args):
    obj, base = _load_json(args.sequence)
    if not isinstance(obj, list) or not obj:
        raise InvalidSpecError("--sequence must be a non-empty JSON list of specs")
    seq = [spec_from_dict(o, base) for o in obj]
    limit = load_spec(args.limit)
    cfg = _config(args)
    if args.probes:
        probes = np.array(args.probes)
    else:
        axes = [np.linspace(0.0, 2.0, 5)] * (limit.dim + 1)
        probes = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, limit.dim + 1)
    rows = [r.to_dict() for r in wasserstein_equivalence_experiment(seq, limit, probes, cfg)]
    if args.sphere_m:
        lim_cloud = trace_sphere(make_handle(limit, config=cfg), args.sphere_m)
        for r, s in zip(rows, seq):
            r["hausdorff_l2"] = hausdorff(trace_sphere(make_handle(s, config=cfg), args.sphere_m), lim_cloud, "l2")
    header = list(rows[0].keys())
    text = _table_csv(header, [[r[k] for k in header] for r in rows])
    out = {"rows": rows, "method": "quad"}
    if args.out:
        _write(args.out, text)
        out["file"] = args.out
    inputs = {"sequence": [s.to_dict() for s in seq], "limit": limit.to_dict(), "probe_count": int(len(probes))}
    if args.format == "csv":
        return inputs, out, {"config": cfg.to_dict()}, text
    return inputs, out, {"config": cfg.to_dict()}


def cmd_validate(args):
    spec = load_spec(args.spec)
    rep = validate_H(spec)
    out = rep.to_dict()
    out["means"] = [spec.mean(i) for i in range(spec.dim)]
    return {"spec": spec.to_dict()}, out, {}, None, (EXIT_OK if rep.passed else EXIT_DOMAIN)


COMMANDS = {
    "eval": cmd_eval,
    "invert": cmd_invert,
    "classify": cmd_classify,
    "extremal": cmd_extremal,
    "estimate": cmd_estimate,
    "clt": cmd_clt,
    "limit-sim": cmd_limit_sim,
    "product": cmd_product,
    "logfnorm": cmd_logfnorm,
    "clt-demo": cmd_clt_demo,
    "sphere": cmd_sphere,
    "hr-sphere": cmd_hr_sphere,
    "hausdorff": cmd_hausdorff,
    "wasserstein": cmd_wasserstein,
    "converge": cmd_converge,
    "validate": cmd_validate,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(payload, stream):
    stream.write(json.dumps(_jsonable(payload), indent=2) + "\n")


def _error_code(exc) -> str:
    if hasattr(exc, "code"):
        return exc.code
    if isinstance(exc, InvalidSpecError):
        return "invalid-spec"
    return "domain-error"


def run(argv=None, stdout=None) -> int:
    """Parse ``argv``, run the command, print the result; returns the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    command = args.command
    try:
        result = COMMANDS[command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"fnorm {command}: error: {exc}\n")
        return EXIT_USAGE
    except IntegrationFailure as exc:
        _emit(
            {
                "command": command,
                "error": {"code": exc.code, "message": str(exc)},
                "outputs": {"estimate": exc.estimate, "error_bound": exc.error_bound},
            },
            stdout,
        )
        return EXIT_NUMERIC
    except NotConvexError as exc:
        _emit({"command": command, "error": {"code": exc.code, "message": str(exc)}}, stdout)
        return EXIT_NUMERIC
    except (DomainError, CdfUnavailable, ProductUnavailable, BridgeRepresentationUnavailable, FNormError) as exc:
        _emit({"command": command, "error": {"code": _error_code(exc), "message": str(exc)}}, stdout)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        code = "invalid-spec" if isinstance(exc, json.JSONDecodeError) else "invalid-input"
        _emit({"command": command, "error": {"code": code, "message": str(exc)}}, stdout)
        return EXIT_DOMAIN

    inputs, outputs, diagnostics, *rest = result
    text = rest[0] if rest else None
    code = rest[1] if len(rest) > 1 else EXIT_OK
    if getattr(args, "format", "json") == "csv" and text is not None:
        stdout.write(text)
    else:
        _emit({"command": command, "inputs": inputs, "outputs": outputs, "diagnostics": diagnostics}, stdout)
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
