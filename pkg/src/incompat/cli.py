"""Command-line interface: ``incompat <command> ...``.

Results go to standard output as JSON (default) or CSV.  Exit codes: 0 on
success, 1 when an inequality check fails, 2 on input errors, 3 when the
SDP solver does not reach an optimal certificate.
"""
import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import measures, objects, tradeoffs
from .config import load_settings
from .errors import InputError, ParseError, ShapeError, SolverError
from .io import parse_device, serialize_device, write_device
from .objects import ChoiChannel, JointChannel, Povm

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

SWEEP_COLUMNS = {
    "unbiased-eta": ("eta", "rom", "roi_id_povm", "bound_prop3", "bound_corollary", "bound_hm", "dominance_slack",
                     "disturbance"),
    "sixfold-p": ("p", "rom", "roi_id_povm", "bound_prop3", "bound_corollary", "bound_hm", "dominance_slack",
                  "effect_norm", "complement_norm", "disturbance"),
}
SWEEP_DEFAULTS = {
    "unbiased-eta": ("eta", "rom", "roi_id_povm", "bound_corollary", "bound_hm"),
    "sixfold-p": ("p", "rom", "bound_corollary", "bound_hm", "effect_norm", "complement_norm"),
}


def _fmt(v):
    return format(v, ".12g") if isinstance(v, float) else str(v)


def _device(path, *types):
    obj = parse_device(path)
    if types and not isinstance(obj, types):
        names = " or ".join(t.__name__ for t in types)
        raise ShapeError(f"{path}: expected a {names} file, got {type(obj).__name__}")
    return obj


def _channel(path):
    """A channel file; POVM files are accepted and read as their measurement channel."""
    obj = _device(path, ChoiChannel, Povm)
    return objects.measurement_channel_choi(obj) if isinstance(obj, Povm) else obj


# ------------------------------------------------------------------ sweeps

def sweep_grid(start, end, steps):
    if steps < 2:
        raise InputError("--steps must be at least 2")
    if not (0.0 <= start < end <= 1.0):
        raise InputError("grid must satisfy 0 <= start < end <= 1")
    return [float(v) for v in np.linspace(start, end, steps)]


def sweep_row(family, value, columns, settings=None):
    """One grid point of a figure sweep as a dict keyed by column name."""
    if family == "unbiased-eta":
        e = objects.example_unbiased_qubit_povm(value)
        row = {"eta": value}
    else:
        e = objects.example_sixfold_povm(value)
        row = {"p": value}
        eye = np.eye(2)
        row["effect_norm"] = max(np.linalg.norm(m, 2) for m in e.effects)
        row["complement_norm"] = max(np.linalg.norm(eye - m, 2) for m in e.effects)
    row["rom"] = measures.robustness_of_measurement(e)
    row["bound_prop3"] = tradeoffs.prop3_bound(e)
    row["bound_corollary"] = 2 * row["bound_prop3"]
    row["bound_hm"] = tradeoffs.hm_bound(e)
    row["dominance_slack"] = row["bound_corollary"] - row["bound_hm"]
    if "roi_id_povm" in columns:
        row["roi_id_povm"] = measures.roi_channel_povm(objects.identity_channel(2), e, settings).value
    if "disturbance" in columns:
        row["disturbance"] = tradeoffs.minimize_disturbance(objects.lueders_channel(e), settings).recovered_distance
    return {c: float(row[c]) for c in columns}


def _sweep_task(args):
    return sweep_row(*args)


def run_sweep(family, start, end, steps, columns=None, settings=None, jobs=1):
    columns = tuple(columns or SWEEP_DEFAULTS[family])
    unknown = [c for c in columns if c not in SWEEP_COLUMNS[family]]
    if unknown:
        raise InputError(f"unknown column(s) for {family}: {', '.join(unknown)}")
    tasks = [(family, v, columns, settings) for v in sweep_grid(start, end, steps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))  # map keeps grid order
    else:
        rows = [_sweep_task(t) for t in tasks]
    return columns, rows


def sweep_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


# ------------------------------------------------------------------ commands

def _report_out(rep):
    d = rep.as_dict()
    d.pop("method", None)
    return d


def cmd_roi(args, settings):
    if args.flavor == "channel-channel":
        rep = measures.roi_channel_channel(_channel(args.first), _channel(args.second), settings, dual=not args.no_dual)
    elif args.flavor == "channel-povm":
        rep = measures.roi_channel_povm(_channel(args.first), _device(args.second, Povm), settings,
                                        dual=not args.no_dual, cross_check=not args.no_dual)
    else:
        rep = measures.roi_povm_povm(_device(args.first, Povm), _device(args.second, Povm), settings,
                                     dual=not args.no_dual, cross_check=not args.no_dual)
    return _report_out(rep), EXIT_OK


def cmd_woi(args, settings):
    rep = measures.woi_channel_channel(_channel(args.first), _channel(args.second), settings, dual=not args.no_dual)
    return _report_out(rep), EXIT_OK


def cmd_diamond(args, settings):
    rep = measures.diamond_distance(_channel(args.first), _channel(args.second), settings, dual=not args.no_dual)
    return _report_out(rep), EXIT_OK


def cmd_rom(args, settings):
    return {"value": measures.robustness_of_measurement(_device(args.povm, Povm))}, EXIT_OK


def cmd_l1(args, settings):
    return {"value": measures.l1_povm_error(_device(args.first, Povm), _device(args.second, Povm))}, EXIT_OK


def cmd_disturbance(args, settings):
    lam = _channel(args.channel)
    res = tradeoffs.minimize_disturbance(lam, settings)
    if args.recovery_out:
        write_device(res.best_recovery, args.recovery_out)
    return {"value": res.recovered_distance, "check": res.lower_check, "iterations": res.iterations}, EXIT_OK


def cmd_verify(args, settings):
    f = args.files
    need = {"theorem1": 3, "theorem2": 3, "prop3": 1, "theorem4": 3, "corollary": 2, "hm-dominance": 1,
            "lipschitz": 4}[args.which]
    if len(f) != need:
        raise InputError(f"verify {args.which} takes {need} device file(s), got {len(f)}")
    if args.which == "theorem1":
        rep = tradeoffs.verify_theorem1(_channel(f[0]), _channel(f[1]), _device(f[2], JointChannel), settings)
    elif args.which == "theorem2":
        rep = tradeoffs.verify_theorem2(*(_device(p, Povm) for p in f), settings=settings)
    elif args.which == "prop3":
        rep = tradeoffs.verify_prop3(_device(f[0], Povm), settings)
    elif args.which == "theorem4":
        rep = tradeoffs.verify_theorem4(_device(f[0], Povm), _device(f[1], Povm), _channel(f[2]), settings)
    elif args.which == "corollary":
        rep = tradeoffs.verify_corollary(_device(f[0], Povm), _channel(f[1]), settings)
    elif args.which == "hm-dominance":
        rep = tradeoffs.verify_hm_dominance(_device(f[0], Povm))
    else:
        rep = tradeoffs.verify_lipschitz(*(_channel(p) for p in f), settings=settings)
    return rep.as_dict(), EXIT_OK if rep.passed else EXIT_FAILED


def cmd_sweep(args, settings):
    cols = args.columns.split(",") if args.columns else None
    columns, rows = run_sweep(args.family, args.start, args.end, args.steps, cols, settings, args.jobs)
    if args.format == "json":
        return {"columns": list(columns), "rows": rows}, EXIT_OK
    return sweep_csv(columns, rows), EXIT_OK


def cmd_random(args, settings):
    if args.kind == "povm":
        obj = objects.sample_random_povm(args.dim, args.outcomes, args.seed)
    elif args.kind == "channel":
        obj = objects.sample_random_channel(args.dim, args.dim_out or args.dim, args.seed)
    else:
        d_out = args.dim_out or args.dim
        obj = objects.sample_random_joint_channel(args.dim, d_out, d_out, args.seed)
    return serialize_device(obj), EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser():
    # shared options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--config", default=sup, help="JSON settings file (default: the per-user config path if present)")
    common.add_argument("--gap-tol", type=float, default=sup, help="relative duality-gap tolerance")
    common.add_argument("--res-tol", type=float, default=sup, help="feasibility residual tolerance")
    common.add_argument("--max-iters", type=int, default=sup, help="interior-point iteration limit")
    common.add_argument("--format", choices=("json", "csv"), default=sup, help="output format (sweeps default to csv)")
    common.add_argument("--seed", type=int, default=sup, help="random seed (default 0)")
    p = argparse.ArgumentParser(prog="incompat", description="Incompatibility measures and tradeoff checks.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    r = sub.add_parser("roi", help="generalized robustness of incompatibility")
    r.add_argument("flavor", choices=("channel-channel", "channel-povm", "povm-povm"))
    r.add_argument("first")
    r.add_argument("second")
    r.add_argument("--no-dual", action="store_true", help="skip the dual program and cross-checks")
    r.set_defaults(func=cmd_roi)

    for name, func, hlp in (("woi", cmd_woi, "weight of incompatibility of two channels"),
                            ("diamond", cmd_diamond, "diamond-norm distance of two channels")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("first")
        s.add_argument("second")
        s.add_argument("--no-dual", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("rom", help="robustness of measurement of a POVM")
    s.add_argument("povm")
    s.set_defaults(func=cmd_rom)

    s = sub.add_parser("l1-error", help="sum of operator-norm effect differences")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_l1)

    s = sub.add_parser("disturbance", help="minimal diamond distance of a recovered channel to the identity")
    s.add_argument("channel")
    s.add_argument("--recovery-out", help="write the optimal recovery channel to this file")
    s.set_defaults(func=cmd_disturbance)

    s = sub.add_parser("verify", help="evaluate both sides of a tradeoff inequality")
    s.add_argument("which", choices=("theorem1", "theorem2", "prop3", "theorem4", "corollary", "hm-dominance",
                                     "lipschitz"))
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="figure data for the worked examples")
    s.add_argument("family", choices=tuple(SWEEP_COLUMNS))
    s.add_argument("--start", type=float, default=0.0)
    s.add_argument("--end", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=11)
    s.add_argument("--columns", help="comma-separated column list")
    s.add_argument("--jobs", type=int, default=1, help="evaluate grid points in parallel processes")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("random", help="write a seeded random device file to stdout")
    s.add_argument("kind", choices=("povm", "channel", "joint-channel"))
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--dim-out", type=int)
    s.add_argument("--outcomes", type=int, default=2)
    s.set_defaults(func=cmd_random)
    return p


def _emit(result, fmt, out):
    if isinstance(result, str):
        out.write(result)
        return
    if fmt == "csv":
        flat = {}
        for k, v in result.items():
            if isinstance(v, dict):
                flat.update({f"{k}.{kk}": vv for kk, vv in v.items()})
            else:
                flat[k] = v
        w = csv.writer(out, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow([_fmt(v) if v is not None else "" for v in flat.values()])
        return
    out.write(json.dumps(result, default=_json_default) + "\n")


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"cannot encode {type(v).__name__}")


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    for key, default in (("config", None), ("gap_tol", None), ("res_tol", None), ("max_iters", None),
                         ("format", None), ("seed", 0)):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        settings = load_settings(args.config, {"gap_tol": args.gap_tol, "res_tol": args.res_tol,
                                               "max_iters": args.max_iters})
        result, code = args.func(args, settings)
    except (InputError, ParseError) as exc:
        print(f"incompat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"incompat: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(result, args.format, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
