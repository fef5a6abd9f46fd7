"""RMS error and bias of each estimator against s, next to the CR bound.

    python scripts/rms_vs_s.py --replicates 200 --workers 4
"""

from _common import out_path, parser

from waxman.geometry import Region
from waxman.sweep import ExperimentSpec, run_sweep


def main():
    ap = parser(__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k-bar", type=float, default=3.0)
    ap.add_argument("--methods", default="mle,mle-n,mle-e,loglin,loglin-e,glm")
    args = ap.parse_args()
    spec = ExperimentSpec(
        region=Region.square(), n=(args.n,), k_bar=args.k_bar,
        s_grid=(0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0), replicates=args.replicates,
        methods=tuple(args.methods.split(",")), seed=args.seed, workers=args.workers,
        output=str(out_path(args, "rms_vs_s.csv")),
    )
    res = run_sweep(spec)
    print(f"{'s':>6} {'method':>9} {'mean':>8} {'bias':>8} {'rms':>8} {'cr':>8}")
    for r in res.rows:
        print(f"{r['s_true']:6g} {r['method']:>9} {r['mean_s_hat']:8.3f} {r['bias']:+8.3f} "
              f"{r['rms']:8.3f} {r['cr_sd']:8.3f}")
    print("wrote", spec.output)


if __name__ == "__main__":
    main()
