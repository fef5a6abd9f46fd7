"""Command line interface: ``waxman <subcommand> ...``.

Subcommands: generate, estimate, crbound, sweep, robustness, ingest.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, estimators
from .errors import WaxmanError
from .estimators import Method
from .generator import generate_dastb, generate_waxman, q_for_target_degree
from .geometry import DistanceLaw, Metric, Region, RegionKind, all_pair_distances
from .io import ingest, stats_dict, write_graph
from .sweep import ExperimentSpec, matched_shape, run_robustness, run_sweep


# ---------------------------------------------------------------------------
# region arguments


def add_region_args(p, required=True):
    g = p.add_argument_group("region")
    g.add_argument("--region", choices=[k.value for k in RegionKind], required=required)
    g.add_argument("--side", type=float, help="square / hypercube side")
    g.add_argument("--length", type=float, help="line segment length")
    g.add_argument("--a", type=float, help="rectangle side a")
    g.add_argument("--b", type=float, help="rectangle side b")
    g.add_argument("--diameter", type=float, help="disk / ball / hyperball diameter")
    g.add_argument("--radius", type=float, help="sphere radius")
    g.add_argument("--dim", type=int, help="hypercube / hyperball dimension")
    g.add_argument("--metric", choices=[m.value for m in Metric])


def region_from_args(args) -> Region:
    kind = RegionKind(args.region)
    size = {
        RegionKind.LINE: args.length, RegionKind.SQUARE: args.side,
        RegionKind.HYPERCUBE: args.side, RegionKind.RECTANGLE: args.a,
        RegionKind.DISK: args.diameter, RegionKind.BALL: args.diameter,
        RegionKind.HYPERBALL: args.diameter, RegionKind.SPHERE: args.radius,
    }[kind]
    if size is None:
        size = 1.0
    metric = args.metric
    if metric is None:
        metric = "great_circle" if kind is RegionKind.SPHERE else "euclidean"
    return Region(kind, size, args.b if kind is RegionKind.RECTANGLE else None, args.dim,
                  Metric(metric))


def _floats(text):
    return [float(x) for x in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(float(x)) for x in str(text).replace(",", " ").split()]


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return str(o)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args):
    region = region_from_args(args)
    if (args.q is None) == (args.k_bar is None):
        raise SystemExit("give exactly one of --q or --k-bar")
    q = args.q if args.q is not None else q_for_target_degree(region, args.n, args.k_bar, args.s)
    gen = generate_dastb if args.model == "dastb" else generate_waxman
    g = gen(region, args.n, q, args.s, args.seed)
    meta = write_graph(g, args.out, args.nodes, args.length_unit,
                       {"k_bar_target": args.k_bar})
    _emit({"edges": str(args.out), "nodes": args.nodes, "metadata": str(meta), "n": g.n,
           "e": g.e, "q": q, "s": args.s})


def cmd_ingest(args):
    g, st = ingest(args.edges, args.nodes, args.metric, args.length_unit, args.n)
    _emit(stats_dict(st, g.meta["length_unit"]), args.out)


def cmd_estimate(args):
    g, st = ingest(args.edges, args.nodes, args.metric, args.length_unit, args.n)
    method = Method(args.method)
    window = tuple(args.window) if args.window else None
    needs_pairs = method in (Method.MLE_E, Method.MLE_T, Method.LOGLINEAR_E, Method.GLM)
    region = region_from_args(args) if args.region else None
    if region is None and method in (Method.MLE, Method.MLE_N, Method.LOGLINEAR):
        raise SystemExit(f"--region is required for --method {method.value}")
    pairs = None
    if needs_pairs:
        if g.coords is None:
            raise SystemExit(f"--method {method.value} needs node coordinates (--nodes)")
        if region is not None:
            pairs = all_pair_distances(region, g.coords)
        else:
            m = Metric(args.metric or "euclidean")
            i, j = np.triu_indices(len(g.coords), 1)
            from .geometry import pair_distance
            radius = float(np.linalg.norm(g.coords[0])) if m is Metric.GREAT_CIRCLE else 1.0
            pairs = pair_distance(g.coords[i], g.coords[j], m, radius)
    law = DistanceLaw.analytic(region) if region is not None and region.kind.value in {
        "line", "square", "rect", "disk", "sphere", "ball"} else None
    if method is Method.MLE:
        res = estimators.mle_s(st, law)
    elif method is Method.MLE_N:
        res = estimators.mle_n(st, region, args.grid)
    elif method is Method.MLE_E:
        res = estimators.mle_e(st, pairs, args.grid)
    elif method is Method.MLE_T:
        res = estimators.mle_truncated(g.length, pairs, window or (0.0, math.inf), args.grid)
    elif method is Method.LOGLINEAR:
        res = estimators.loglinear_s(g.length, law, args.bins, window, n=g.n)
    elif method is Method.LOGLINEAR_E:
        res = estimators.loglinear_s(g.length, pairs, args.bins, window, n=g.n)
    else:
        res = estimators.glm_fit(pairs, g.adjacency_indicator())
    if law is not None and 0 < res.q_hat <= 1 and g.n >= 2:
        res.cr_bound = analysis.fisher_information(g.n, res.q_hat, res.s_hat, law).cr_sd
    _emit({**res.as_dict(), **stats_dict(st, g.meta["length_unit"]),
           "region": region.describe() if region else None}, args.out)


def cmd_crbound(args):
    region = region_from_args(args)
    law = DistanceLaw.analytic(region)
    if args.s_grid:
        grid = _floats(args.s_grid)
    else:
        grid = np.geomspace(args.s_min, args.s_max, args.num).tolist()
    rows = analysis.crbound_table(args.n, grid, law, q=args.q, k_bar=args.k_bar)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "q", "info", "cr_sd"])
        for r in rows:
            w.writerow([repr(float(x)) for x in r])
    finally:
        if args.out:
            fh.close()


SPEC_KEYS = {"n": _ints, "s_grid": _floats, "k_bar": float, "q": float, "replicates": int,
             "methods": lambda t: [m.strip() for m in str(t).replace(",", " ").split()],
             "seed": int, "model": str, "workers": int, "timing": None, "window": _floats,
             "output": str}


def load_config(path) -> dict:
    """Read a sweep config: JSON, or INI-style ``key = value`` lines under ``[sweep]``.

    Region keys (``region``, ``side``, ``a``, ``b``, ``diameter``, ...) sit
    next to the ExperimentSpec keys.
    """
    text = Path(path).read_text()
    if path.endswith(".json"):
        return json.loads(text)
    cp = configparser.ConfigParser()
    if not text.lstrip().startswith("["):
        text = "[sweep]\n" + text
    cp.read_string(text)
    return dict(cp["sweep"])


def spec_from(args, config: dict) -> ExperimentSpec:
    def pick(key, cli_value):
        return cli_value if cli_value is not None else config.get(key)

    region_keys = ("region", "side", "length", "a", "b", "diameter", "radius", "dim", "metric")
    ns = argparse.Namespace(**{k: pick(k, getattr(args, k, None)) for k in region_keys})
    for k in ("side", "length", "a", "b", "diameter", "radius"):
        if getattr(ns, k) is not None:
            setattr(ns, k, float(getattr(ns, k)))
    if ns.dim is not None:
        ns.dim = int(ns.dim)
    ns.region = ns.region or "square"
    kw = {}
    for key, conv in SPEC_KEYS.items():
        val = pick(key, getattr(args, key, None))
        if val is None:
            continue
        if key == "timing":
            kw[key] = val if isinstance(val, bool) else str(val).lower() in ("1", "true", "yes")
        elif isinstance(val, (list, tuple)) or conv is None:
            kw[key] = val
        else:
            kw[key] = conv(val)
    if "window" in kw:
        kw["window"] = tuple(kw["window"])
    if "q" in kw and "k_bar" not in kw:
        kw["k_bar"] = None
    return ExperimentSpec(region=region_from_args(ns), **kw)


def cmd_sweep(args):
    config = load_config(args.config) if args.config else {}
    spec = spec_from(args, config)
    res = run_sweep(spec)
    if not spec.output:
        _print_rows(res.rows)


def cmd_robustness(args):
    config = load_config(args.config) if args.config else {}
    spec = spec_from(args, config)
    assumed = None
    if args.mode == "shape":
        names = args.assumed or ["square", "disk", "rect"]
        assumed = {f"as_{nm}": matched_shape(nm, spec.region) for nm in names}
    res = run_robustness(spec, args.mode, assumed)
    if not spec.output:
        _print_rows(res.rows)


def _print_rows(rows):
    from .sweep import columns_for, _fmt
    cols = columns_for(rows)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])


def _add_spec_args(p):
    p.add_argument("--config", help="JSON or key=value sweep config")
    p.add_argument("--n", type=str, help="node count(s), comma separated")
    p.add_argument("--s-grid", dest="s_grid", type=str, help="true s values, comma separated")
    p.add_argument("--k-bar", dest="k_bar", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--replicates", type=int)
    p.add_argument("--methods", type=str, help="comma separated estimator names")
    p.add_argument("--seed", type=int)
    p.add_argument("--model", choices=["waxman", "dastb"])
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", default=None)
    p.add_argument("--output", "-o")
    add_region_args(p, required=False)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="waxman", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a Waxman or DASTB graph to CSV")
    add_region_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float)
    p.add_argument("--k-bar", dest="k_bar", type=float)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=["waxman", "dastb"], default="waxman")
    p.add_argument("--out", required=True, help="edge CSV path")
    p.add_argument("--nodes", help="node CSV path")
    p.add_argument("--length-unit", default="region-unit")
    p.set_defaults(func=cmd_generate)

    def add_input(p):
        p.add_argument("--edges", required=True)
        p.add_argument("--nodes")
        p.add_argument("--length-unit", dest="length_unit")
        p.add_argument("--n", type=int, help="node count when no node file or metadata")
        p.add_argument("--out")

    p = sub.add_parser("ingest", help="summary statistics (n, e, d_bar) of an edge list")
    add_input(p)
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("estimate", help="estimate (q, s) from an edge list")
    add_input(p)
    add_region_args(p, required=False)
    p.add_argument("--method", choices=[m.value for m in Method], default="mle")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--bins", type=int, default=estimators.DEFAULT_BINS)
    p.add_argument("--grid", type=int, default=estimators.DEFAULT_GRID)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("crbound", help="Cramer-Rao bound over an s grid (CSV)")
    add_region_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float)
    p.add_argument("--k-bar", dest="k_bar", type=float)
    p.add_argument("--s-grid", dest="s_grid")
    p.add_argument("--s-min", dest="s_min", type=float, default=0.1)
    p.add_argument("--s-max", dest="s_max", type=float, default=100.0)
    p.add_argument("--num", type=int, default=25)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crbound)

    p = sub.add_parser("sweep", help="replicated estimator accuracy sweep (CSV)")
    _add_spec_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("robustness", help="MLE under misspecified shape, size or model")
    _add_spec_args(p)
    p.add_argument("--mode", choices=["shape", "size", "model"], required=True)
    p.add_argument("--assumed", nargs="+", choices=["square", "disk", "rect"])
    p.set_defaults(func=cmd_robustness)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "crbound" and (args.q is None) == (args.k_bar is None):
        raise SystemExit("give exactly one of --q or --k-bar")
    try:
        args.func(args)
    except WaxmanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
