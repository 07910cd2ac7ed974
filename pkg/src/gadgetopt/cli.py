"""``gadget`` command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 computational failure. Data goes
to ``--output`` (default stdout), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
import warnings

import numpy as np

from . import __version__
from .dense import DenseCapExceeded, dump_matrix, materialize, spectral_report
from .gadget import build_gadget, check_gap_precondition, default_z_star, require_gap
from .optimize import OptimizeRequest, alpha_sweep, optimize_delta
from .pauli import TargetSyntaxError, read_target
from .sw import fd_sw_compare
from .walks import total_error_bound


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


class Emitter:
    def __init__(self, path, argv):
        self.path = path
        self.argv = argv

    def _write(self, text):
        if self.path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)

    def json(self, obj):
        self._write(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n")

    def csv(self, header, rows):
        buf = io.StringIO()
        buf.write(f"# gadget {__version__}\n")
        buf.write(f"# command: gadget {shlex.join(self.argv)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        self._write(buf.getvalue())


def _load(args):
    return read_target(args.input, compact=args.compact)


def _z_star(args, target):
    slack = args.z_slack if args.z_slack is not None else getattr(args, "epsilon", None)
    return default_z_star(target, 0.0 if slack is None else slack)


def _model(args, target, delta):
    model = build_gadget(target, delta, normalize=not args.raw_couplings)
    if not check_gap_precondition(model):
        warnings.warn(f"||V|| upper bound exceeds delta/2 at delta={delta:g}", stacklevel=2)
    return model


def _grid(args):
    if args.delta_from >= args.delta_to and args.points > 1:
        raise UsageError("--delta-from must be below --delta-to")
    return np.geomspace(args.delta_from, args.delta_to, args.points)


def _threads(args) -> int:
    env = os.environ.get("GADGET_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"GADGET_THREADS must be an integer, got {env!r}") from None
    else:
        n = args.threads if args.threads is not None else (os.cpu_count() or 1)
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_build(args, out):
    target = _load(args)
    out.json(_model(args, target, args.delta).to_dict())


def cmd_bound(args, out):
    target = _load(args)
    model = _model(args, target, args.delta)
    z_star = _z_star(args, target)
    require_gap(model, z_star)
    out.json(total_error_bound(model, z_star, args.order_tol, args.max_order).to_dict())


def cmd_sweep(args, out):
    target = _load(args)
    z_star = _z_star(args, target)
    header = ["delta", "total_bound_walk", "total_bound_simple", "tail_bound", "truncation_order"]
    if args.with_dense:
        header += ["dense_sigma_err", "dense_spectral_err"]
    rows = []
    for delta in _grid(args):
        model = _model(args, target, delta)
        require_gap(model, z_star)
        rep = total_error_bound(model, z_star, args.order_tol, args.max_order)
        row = [delta, rep.total_bound, rep.simple_bound, rep.tail_bound, rep.truncation_order]
        if args.with_dense:
            dense = spectral_report(model, z_star, n_z=args.n_z, threads=_threads(args))
            row += [dense.max_sigma_err, dense.spectral_err]
        rows.append(row)
    out.csv(header, rows)


def _request_kwargs(args):
    return dict(delta_lo=args.delta_lo, delta_hi=args.delta_hi, rel_tol=args.rel_tol,
                z_slack=args.z_slack, normalize=not args.raw_couplings, order_tol=args.order_tol,
                max_order=args.max_order, dense_metric=args.dense_metric, n_z=args.n_z,
                threads=_threads(args))


def cmd_optimize(args, out):
    target = _load(args)
    req = OptimizeRequest(target, args.epsilon, args.method, **_request_kwargs(args))
    out.json(optimize_delta(req).to_dict())


def cmd_alpha_sweep(args, out):
    target = _load(args)
    if not 0 <= args.index < target.m:
        raise UsageError(f"--index must be in 0..{target.m - 1}")
    alphas = np.linspace(args.alpha_from, args.alpha_to, args.alpha_points)
    rows = alpha_sweep(target, alphas, args.epsilon, index=args.index, with_dense=args.with_dense,
                       **_request_kwargs(args))
    out.csv(["alpha", "delta_simple", "delta_walkbound", "delta_dense", "ratio"],
            [[r.alpha, r.delta_simple, r.delta_walkbound, r.delta_dense, r.ratio] for r in rows])


def cmd_verify(args, out):
    target = _load(args)
    model = _model(args, target, args.delta)
    z_star = _z_star(args, target)
    require_gap(model, z_star)
    dense = materialize(model)
    if args.dump_matrix:
        dump_matrix(args.dump_matrix, dense.H_total)
    orders = range(2, args.max_report_order + 1)
    rep = spectral_report(model, z_star, n_z=args.n_z, orders=orders, threads=_threads(args), dense=dense)
    out.json(rep.to_dict())


def cmd_sw_compare(args, out):
    target = _load(args)
    model = _model(args, target, args.delta_from)
    rows = fd_sw_compare(model, args.order, _grid(args), mode=args.sw_mode,
                         normalize=not args.raw_couplings, threads=_threads(args))
    out.csv(["delta", "fd_error", "sw_error", "spectral_error"],
            [[r.delta, r.fd_error, r.sw_error, r.spectral_error] for r in rows])


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gadget", description="Perturbative gadget error bounds and gap optimization.")
    p.add_argument("--version", action="version", version=f"gadget {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, delta=False, epsilon=False, grid=False):
        sp.add_argument("-i", "--input", required=True, help="target Hamiltonian file")
        sp.add_argument("-o", "--output", default="-", help="output path (default stdout)")
        sp.add_argument("--compact", action="store_true",
                        help="relabel used qubit indices to 0..n-1 (for 1-based files)")
        sp.add_argument("--raw-couplings", action="store_true",
                        help="use lambda_i = |c_i|^(1/k) instead of normalized couplings")
        sp.add_argument("--z-slack", type=float, default=None,
                        help="z window half-width beyond sum|c_i| (default: epsilon, else 0)")
        sp.add_argument("--order-tol", type=_positive(float), default=1e-8)
        sp.add_argument("--max-order", type=_positive(int), default=60)
        sp.add_argument("--n-z", type=_positive(int), default=11, help="z grid points for dense checks")
        sp.add_argument("--threads", type=_positive(int), default=None)
        sp.add_argument("--seed", type=int, default=0, help="accepted for reproducible scripted runs")
        if delta:
            sp.add_argument("--delta", type=_positive(float), required=True)
        if epsilon:
            sp.add_argument("--epsilon", type=_positive(float), required=True)
        if grid:
            sp.add_argument("--delta-from", type=_positive(float), required=True)
            sp.add_argument("--delta-to", type=_positive(float), required=True)
            sp.add_argument("--points", type=_positive(int), default=20)

    def search(sp):
        sp.add_argument("--delta-lo", type=_positive(float), default=None)
        sp.add_argument("--delta-hi", type=_positive(float), default=None)
        sp.add_argument("--rel-tol", type=_positive(float), default=1e-3)
        sp.add_argument("--dense-metric", choices=("sigma", "spectral"), default="sigma")

    s = sub.add_parser("build", help="emit the gadget model as JSON")
    common(s, delta=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("bound", help="walk-enumeration error bound as JSON")
    common(s, delta=True)
    s.add_argument("--epsilon", type=_positive(float), default=None)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("sweep", help="bounds over a log-spaced delta grid (CSV)")
    common(s, grid=True)
    s.add_argument("--epsilon", type=_positive(float), default=None)
    s.add_argument("--with-dense", action="store_true", help="add dense oracle columns")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("optimize", help="smallest delta meeting epsilon (JSON)")
    common(s, epsilon=True)
    search(s)
    s.add_argument("--method", choices=("walkbound", "simple", "dense"), default="walkbound")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("alpha-sweep", help="optimized delta per method as one coefficient varies (CSV)")
    common(s, epsilon=True)
    search(s)
    s.add_argument("--index", type=int, default=0, help="term whose coefficient is swept")
    s.add_argument("--alpha-from", type=float, required=True)
    s.add_argument("--alpha-to", type=float, required=True)
    s.add_argument("--alpha-points", type=_positive(int), default=6)
    s.add_argument("--with-dense", action="store_true")
    s.set_defaults(func=cmd_alpha_sweep)

    s = sub.add_parser("verify", help="dense oracle report (JSON)")
    common(s, delta=True)
    s.add_argument("--epsilon", type=_positive(float), default=None)
    s.add_argument("--max-report-order", type=int, default=6, help="record ||T_r(0)|| for r = 2..this")
    s.add_argument("--dump-matrix", default=None, help="write H + V in the GGDM binary format")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sw-compare", help="FD vs SW truncation error over delta (CSV)")
    common(s, grid=True)
    s.add_argument("--order", type=int, default=8, help="highest SW order computed")
    s.add_argument("--sw-mode", choices=("truncated", "exact-blockdiag"), default="truncated")
    s.set_defaults(func=cmd_sw_compare)
    return p


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        out = Emitter(args.output, argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            args.func(args, out)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, TargetSyntaxError, DenseCapExceeded, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
