"""MLE error when the region shape, the region size or the model is wrong."""

from _common import out_path, parser

from waxman.geometry import Region
from waxman.sweep import ExperimentSpec, matched_shape, run_robustness


def main():
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=1000)
    args = ap.parse_args()
    common = dict(n=(args.n,), replicates=args.replicates, seed=args.seed, workers=args.workers)

    for true in ("square", "disk", "rect"):
        others = {f"as_{k}": matched_shape(k, Region.square()) for k in ("square", "disk", "rect")
                  if k != true}
        spec = ExperimentSpec(region=matched_shape(true, Region.square()), s_grid=(3.0, 20.0), **common,
                              output=str(out_path(args, f"robust_shape_{true}.csv")))
        for r in run_robustness(spec, "shape", others).rows:
            print(f"shape true={true:6} s={r['s_true']:4g} {r['variant']:>9} "
                  f"rms={r['rms']:.3f} inflation={r['inflation']:+.1%}")

    spec = ExperimentSpec(region=Region.disk(1.0), s_grid=(3.0, 10.0, 20.0), **common,
                          output=str(out_path(args, "robust_size.csv")))
    for r in run_robustness(spec, "size").rows:
        print(f"size  s={r['s_true']:4g} {r['variant']:>9} rms={r['rms']:.3f} "
              f"inflation={r['inflation']:+.1%}")

    spec = ExperimentSpec(region=Region.square(), s_grid=(1.0, 3.0, 10.0), **common,
                          output=str(out_path(args, "robust_model.csv")))
    for r in run_robustness(spec, "model").rows:
        print(f"model s={r['s_true']:4g} {r['variant']:>9} bias={r['bias']:+.3f} rms={r['rms']:.3f}")


if __name__ == "__main__":
    main()
