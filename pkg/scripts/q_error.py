"""Relative RMS error of q_hat, using s_hat and using the true s."""

from _common import out_path, parser

from waxman.geometry import Region
from waxman.sweep import ExperimentSpec, run_sweep


def main():
    ap = parser(__doc__, replicates=1000)
    args = ap.parse_args()
    spec = ExperimentSpec(region=Region.square(), n=(1000,), k_bar=3.0,
                          s_grid=(0.5, 1.0, 2.0, 3.0, 4.0, 8.0, 16.0), replicates=args.replicates,
                          seed=args.seed, workers=args.workers,
                          output=str(out_path(args, "q_error.csv")))
    for r in run_sweep(spec).rows:
        print(f"s={r['s_true']:5g} q={r['q']:.5f} rel_rms={r['q_rel_rms']:.2%} "
              f"true_s={r['q_rel_rms_true_s']:.2%} factor={r['q_rel_rms'] / r['q_rel_rms_true_s']:.2f}")


if __name__ == "__main__":
    main()
