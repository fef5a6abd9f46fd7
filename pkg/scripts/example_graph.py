"""Generate one graph, write it as CSV and fit it with every estimator."""

from _common import RESULTS, parser

from waxman.analysis import fisher_information
from waxman.estimators import glm_fit, loglinear_s, mle_e, mle_n, mle_s
from waxman.generator import generate_waxman, q_for_target_degree, summary_stats
from waxman.geometry import DistanceLaw, Region, all_pair_distances
from waxman.io import write_graph


def main():
    ap = parser(__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--s", type=float, default=4.0)
    args = ap.parse_args()
    region = Region.square()
    law = DistanceLaw.analytic(region)
    q = q_for_target_degree(law, args.n, 3.0, args.s)
    g = generate_waxman(region, args.n, q, args.s, seed=args.seed)
    RESULTS.mkdir(exist_ok=True)
    write_graph(g, RESULTS / "example_edges.csv", RESULTS / "example_nodes.csv")
    st = summary_stats(g)
    pairs = all_pair_distances(region, g.coords)
    cr = fisher_information(g.n, q, args.s, law).cr_sd
    print(f"n={st.n} e={st.e} d_bar={st.d_bar:.4f} true s={args.s} q={q:.5f} CR sd={cr:.3f}")
    for res in (mle_s(st, law), mle_n(st, region), mle_e(st, pairs),
                loglinear_s(g.length, law, n=g.n), loglinear_s(g.length, pairs, n=g.n),
                glm_fit(pairs, g.adjacency_indicator())):
        print(f"{res.method.value:>9}: s_hat={res.s_hat:.4f} q_hat={res.q_hat:.5f}")


if __name__ == "__main__":
    main()
