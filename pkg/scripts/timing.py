"""Median estimator wall time against n (GLM grows quadratically, MLE stays flat)."""

import time

import numpy as np
from _common import out_path, parser

from waxman.estimators import glm_fit, loglinear_s, mle_e, mle_s
from waxman.generator import generate_waxman, q_for_target_degree, summary_stats
from waxman.geometry import DistanceLaw, Region, all_pair_distances
from waxman.sweep import write_rows


def median_time(fn, repeats):
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


def main():
    ap = parser(__doc__, replicates=5)
    ap.add_argument("--ns", default="250,500,1000,2000,4000")
    ap.add_argument("--s", type=float, default=3.0)
    args = ap.parse_args()
    region = Region.square()
    law = DistanceLaw.analytic(region)
    rows = []
    for n in (int(x) for x in args.ns.split(",")):
        q = q_for_target_degree(law, n, 3.0, args.s)
        g = generate_waxman(region, n, q, args.s, seed=(args.seed, n))
        pairs = all_pair_distances(region, g.coords)
        y = g.adjacency_indicator()
        jobs = {
            "mle": lambda: mle_s(summary_stats(g), law),
            "mle-e": lambda: mle_e(summary_stats(g), pairs),
            "loglin": lambda: loglinear_s(g.length, law, n=n),
            "glm": lambda: glm_fit(pairs, y),
        }
        for name, fn in jobs.items():
            fn()
            t = median_time(fn, args.replicates)
            rows.append({"n": n, "e": g.e, "method": name, "median_time_s": t})
            print(f"n={n:5d} e={g.e:5d} {name:>7} {t * 1e3:9.2f} ms")
    path = out_path(args, "timing.csv")
    write_rows(path, rows, ["n", "e", "method", "median_time_s"])
    print("wrote", path)


if __name__ == "__main__":
    main()
