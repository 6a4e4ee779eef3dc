"""Command-line front end.

Every subcommand writes its outputs atomically next to a JSON manifest and
prints only the manifest path.  Failures print one line,
``error: <code>: <message>``, to stderr and exit with 2 (bad input),
3 (numerical failure) or 4 (internal invariant).
"""

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .errors import DomainError, InputError, NpgraphError
from .fileio import GRAPH_FORMATS, atomic_write, model_to_json, read_graph, write_graph
from .forest import fit_forest
from .glasso import GlassoConfig, glasso_fit, glasso_path, graph_from_precision, lambda_grid
from .graphs import graph_diff
from .ingest import log_returns, read_csv, standardize, winsorize_mad
from .marginals import IdentificationMode, fit_transform, transformed_covariance


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(path, command, params, inputs, outputs, results):
    manifest = {
        "tool": "npgraph",
        "tool_version": __version__,
        "command": command,
        "parameters": params,
        "inputs": {p: {"sha256": _digest(p)} for p in inputs},
        "outputs": outputs,
        "results": results,
    }
    atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(path)


def _parse_grid(text):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise DomainError(f"lambda grid must look like lo:hi:count, got {text!r}") from None
    if count < 1 or not 0 < lo <= hi:
        raise DomainError("lambda grid needs 0 < lo <= hi and count >= 1")
    return lambda_grid(lo, hi, count)


def _parse_floats(text, what):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"bad {what} list {text!r}") from None


def _graph_path(prefix, fmt, tag=None):
    return f"{prefix}{'_' + tag if tag else ''}.{fmt}"


def cmd_npn(args):
    data = read_csv(args.input)
    if (args.lam is None) == (args.lambda_grid is None):
        raise DomainError("give exactly one of --lambda and --lambda-grid")
    mode = IdentificationMode(args.mode)
    t = fit_transform(data, args.delta, mode)
    s = transformed_covariance(t, data.values)
    if args.lam is not None:
        lambdas = np.array([args.lam])
    else:
        lambdas = _parse_grid(args.lambda_grid)
    # the path runs from large to small lambda for warm starts
    order = np.argsort(-lambdas, kind="stable")
    fits = glasso_path(s, lambdas[order])
    by_index = dict(zip(order.tolist(), fits))
    outputs, results = [], []
    for k, lam in enumerate(lambdas):
        est = by_index[k]
        g = graph_from_precision(est, labels=data.names)
        tag = None if len(lambdas) == 1 else f"{k:03d}"
        path = _graph_path(args.output_prefix, args.format, tag)
        write_graph(path, g, args.format)
        outputs.append(path)
        results.append({"index": k, "lambda": float(lam), "edges": g.n_edges,
                        "kkt_residual": est.kkt_residual, "iterations": est.iterations})
    params = {"input": args.input, "lambda": args.lam, "lambda_grid": args.lambda_grid,
              "lambdas": [float(v) for v in lambdas], "delta": t.delta,
              "delta_given": args.delta, "mode": mode.value,
              "output_prefix": args.output_prefix, "format": args.format}
    _write_manifest(f"{args.output_prefix}_manifest.json", "npn", params, [args.input],
                    outputs, {"n": data.n, "d": data.d, "path": results})


def _parse_bandwidth(text):
    if text == "auto":
        return None
    vals = _parse_floats(text, "bandwidth")
    if len(vals) != 2 or not all(v > 0 for v in vals):
        raise DomainError("--bandwidth takes 'auto' or two positive values h1,h2")
    return tuple(vals)


def cmd_forest(args):
    data = read_csv(args.input)
    bw = _parse_bandwidth(args.bandwidth)
    model = fit_forest(data, split_fraction=args.split, seed=args.seed,
                       grid_size=args.grid_size, bandwidth=bw)
    sel = model.selection
    graph_path = _graph_path(args.output_prefix, args.format)
    curve_path = f"{args.output_prefix}_curve.tsv"
    model_path = f"{args.output_prefix}_model.json"
    write_graph(graph_path, model.forest, args.format)
    lines = ["k\tloglik"] + [f"{k}\t{v!r}" for k, v in enumerate(sel.curve.loglik)]
    atomic_write(curve_path, "\n".join(lines) + "\n")
    atomic_write(model_path, model_to_json(model))
    padded = len({g.n_edges for g in sel.stages}) < len(sel.stages)
    params = {"input": args.input, "split": args.split, "seed": args.seed,
              "grid_size": args.grid_size, "bandwidth": args.bandwidth,
              "bandwidths_used": model.tables.bandwidths.tolist(),
              "pair_bandwidths_used": model.tables.pair_bandwidths.tolist(),
              "floor": model.tables.floor, "output_prefix": args.output_prefix,
              "format": args.format}
    results = {"n": data.n, "d": data.d, "n1": sel.n1, "n2": sel.n2, "k_hat": sel.k_hat,
               "edges": model.forest.n_edges, "stages_padded": padded}
    _write_manifest(f"{args.output_prefix}_manifest.json", "forest", params, [args.input],
                    [graph_path, curve_path, model_path], results)


def cmd_diff(args):
    a = read_graph(args.a)
    b = read_graph(args.b)
    sym, common = graph_diff(a, b)
    sym_path = _graph_path(args.out_prefix + "_symdiff", args.format)
    common_path = _graph_path(args.out_prefix + "_common", args.format)
    write_graph(sym_path, sym, args.format)
    write_graph(common_path, common, args.format)
    params = {"a": args.a, "b": args.b, "out_prefix": args.out_prefix, "format": args.format}
    _write_manifest(f"{args.out_prefix}_manifest.json", "diff", params, [args.a, args.b],
                    [sym_path, common_path],
                    {"symdiff_edges": sym.n_edges, "common_edges": common.n_edges})


def cmd_glasso(args):
    cov = read_csv(args.input)
    if cov.n != cov.d:
        raise DomainError(f"covariance file must be square, got {cov.n} x {cov.d}")
    cfg = GlassoConfig(args.lam, max_outer_iters=args.max_iter, tol=args.tol)
    est = glasso_fit(cov.values, cfg)
    g = graph_from_precision(est, labels=cov.names)
    graph_path = _graph_path(args.output_prefix, args.format)
    omega_path = f"{args.output_prefix}_precision.csv"
    write_graph(graph_path, g, args.format)
    rows = [",".join(cov.names)] + [",".join(repr(float(v)) for v in r) for r in est.omega]
    atomic_write(omega_path, "\n".join(rows) + "\n")
    params = {"input": args.input, "lambda": args.lam, "max_iter": args.max_iter,
              "tol": args.tol, "penalize_diagonal": cfg.penalize_diagonal,
              "output_prefix": args.output_prefix, "format": args.format}
    _write_manifest(f"{args.output_prefix}_manifest.json", "glasso", params, [args.input],
                    [graph_path, omega_path],
                    {"edges": g.n_edges, "kkt_residual": est.kkt_residual,
                     "iterations": est.iterations})


def cmd_gen(args):
    from .datagen import NpnSpec, Transform, sample_npn

    inputs = []
    if args.sigma:
        sig = read_csv(args.sigma)
        if sig.n != sig.d:
            raise DomainError(f"sigma file must be square, got {sig.n} x {sig.d}")
        sigma, names = sig.values, sig.names
        inputs.append(args.sigma)
    else:
        d = args.d
        if d < 1:
            raise DomainError("--d must be positive")
        sigma = np.full((d, d), args.rho)
        np.fill_diagonal(sigma, 1.0)
        names = None
    d = sigma.shape[0]
    alphas = _parse_floats(args.alpha, "alpha") if args.alpha else [1.0]
    if len(alphas) == 1:
        alphas = alphas * d
    if len(alphas) != d:
        raise DomainError(f"--alpha needs 1 or {d} values, got {len(alphas)}")
    transforms = tuple(Transform(args.family, a, discontinuous=args.discontinuous)
                       for a in alphas)
    spec = NpnSpec(np.zeros(d), sigma, transforms)
    data = sample_npn(spec, args.n, args.seed, names)
    atomic_write(args.output, _csv_text(data))
    params = {"family": args.family, "alpha": alphas, "sigma": args.sigma,
              "d": d, "rho": None if args.sigma else args.rho, "n": args.n, "seed": args.seed,
              "discontinuous": args.discontinuous, "output": args.output}
    _write_manifest(f"{args.output}.manifest.json", "gen", params, inputs, [args.output],
                    {"rows": data.n, "columns": data.d})


def _csv_text(data):
    rows = [",".join(data.names)]
    rows += [",".join(repr(float(v)) for v in r) for r in data.values]
    return "\n".join(rows) + "\n"


def cmd_ingest(args):
    data = read_csv(args.input)
    steps = []
    if args.log_returns:
        data = log_returns(data)
        steps.append("log_returns")
    constant = []
    if args.winsorize_mad is not None:
        data = winsorize_mad(data, args.winsorize_mad)
        constant = data.meta.get("winsorize_constant_columns", [])
        steps.append("winsorize_mad")
    if args.standardize:
        data = standardize(data)
        steps.append("standardize")
    atomic_write(args.output, _csv_text(data))
    params = {"input": args.input, "log_returns": args.log_returns,
              "winsorize_mad": args.winsorize_mad, "standardize": args.standardize,
              "output": args.output}
    _write_manifest(f"{args.output}.manifest.json", "ingest", params, [args.input],
                    [args.output], {"rows": data.n, "columns": data.d, "steps": steps,
                                    "winsorize_constant_columns": list(constant)})


def build_parser():
    p = argparse.ArgumentParser(prog="npgraph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"npgraph {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=GRAPH_FORMATS, default="tsv", help="graph file format")

    sp = sub.add_parser("npn", help="nonparanormal graph estimation")
    sp.add_argument("--input", required=True, help="data CSV with a header row")
    sp.add_argument("--lambda", dest="lam", type=float, help="a single penalty")
    sp.add_argument("--lambda-grid", help="evenly spaced penalties, lo:hi:count")
    sp.add_argument("--delta", type=float, help="CDF truncation level (default from n)")
    sp.add_argument("--mode", choices=[m.value for m in IdentificationMode],
                    default=IdentificationMode.NORMAL_SCORES.value,
                    help="Normal scores or matched sample moments")
    sp.add_argument("--output-prefix", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_npn)

    sp = sub.add_parser("forest", help="forest density estimation")
    sp.add_argument("--input", required=True, help="data CSV with a header row")
    sp.add_argument("--split", type=float, default=0.5, help="share of rows used for fitting")
    sp.add_argument("--seed", type=int, default=0, help="seed for the row shuffle")
    sp.add_argument("--grid-size", type=int, default=100, help="grid nodes per axis")
    sp.add_argument("--bandwidth", default="auto",
                    help="'auto' (normal reference per column) or h1,h2")
    sp.add_argument("--output-prefix", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_forest)

    sp = sub.add_parser("diff", help="symmetric difference and common edges of two graphs")
    sp.add_argument("--a", required=True, help="first graph file")
    sp.add_argument("--b", required=True, help="second graph file")
    sp.add_argument("--out-prefix", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_diff)

    sp = sub.add_parser("glasso", help="graphical lasso on a covariance CSV")
    sp.add_argument("--input", required=True, help="covariance CSV with a header row")
    sp.add_argument("--lambda", dest="lam", type=float, required=True, help="penalty")
    sp.add_argument("--max-iter", type=int, default=200, help="outer sweeps before giving up")
    sp.add_argument("--tol", type=float, default=1e-6, help="KKT residual tolerance")
    sp.add_argument("--output-prefix", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_glasso)

    sp = sub.add_parser("gen", help="sample nonparanormal data")
    sp.add_argument("--family", choices=["identity", "power", "logistic", "sinusoid"],
                    default="identity")
    sp.add_argument("--alpha", help="one value, or one per column, comma separated")
    sp.add_argument("--sigma", help="CSV covariance with a header row")
    sp.add_argument("--d", type=int, default=2, help="columns when --sigma is absent")
    sp.add_argument("--rho", type=float, default=0.5,
                    help="common correlation when --sigma is absent")
    sp.add_argument("--discontinuous", action="store_true",
                    help="logistic family without rescaling: jumps at every integer")
    sp.add_argument("--n", type=int, required=True, help="rows to draw")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--output", required=True, help="CSV to write")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("ingest", help="prepare a price or measurement table")
    sp.add_argument("--input", required=True, help="CSV with a header row")
    sp.add_argument("--log-returns", action="store_true", help="replace prices by log returns")
    sp.add_argument("--winsorize-mad", type=float, nargs="?", const=3.0, metavar="C",
                    help="clip at mean +/- C mean absolute deviations (C defaults to 3)")
    sp.add_argument("--standardize", action="store_true", help="center and scale to unit sd")
    sp.add_argument("--output", required=True, help="CSV to write")
    sp.set_defaults(func=cmd_ingest)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NpgraphError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"error: io_error: {exc}", file=sys.stderr)
        return InputError.exit_status
    return 0


if __name__ == "__main__":
    sys.exit(main())
