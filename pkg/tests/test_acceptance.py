"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

Seeds are fixed per criterion (criterion number) and never tuned.  Run with
``pytest tests/test_acceptance.py`` to see the summary block, or execute the
file directly to print the lines as they are produced.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from waxman.analysis import fisher_information, kld_direct, kld_from_ger
from waxman.estimators import mle_s
from waxman.generator import SummaryStats, generate_waxman, q_for_target_degree, summary_stats
from waxman.geometry import (
    DistanceLaw,
    Metric,
    Region,
    all_pair_distances,
    analytic_inverse_cdf,
    line_picking_cdf,
    line_picking_moments,
    sample_pair_distances,
)
from waxman.io import ingest, write_graph
from waxman.estimators import glm_fit
from waxman.sweep import ExperimentSpec, matched_shape, run_robustness, run_sweep
from waxman.transforms import laplace, mean_link_length

try:
    from conftest import CRITERIA
except ImportError:  # executed as a script
    CRITERIA = []

pytestmark = pytest.mark.slow

FIXTURES = Path(__file__).parent / "fixtures"
SQUARE = Region.square()
SQ_LAW = DistanceLaw.analytic(SQUARE)


def report(cid, ok, label, detail=""):
    ok = bool(ok)
    CRITERIA.append((str(cid), ok, label, detail))
    print(f"{'PASS' if ok else 'FAIL'}  C{cid:<5} {label:<58} {detail}")
    return ok


def check_all(results):
    """Assert after every sub-check has been reported, so all lines print."""
    assert all(results), "failed sub-criteria: see the PASS/FAIL lines above"


# ---------------------------------------------------------------------------
# 1. distance laws


ANALYTIC_REGIONS = {
    "line": Region.line(),
    "square": Region.square(),
    "rect 2x1": Region.rectangle(2.0, 1.0),
    "disk d=1": Region.disk(1.0),
    "sphere arc": Region.sphere(1.0),
    "sphere chord": Region.sphere(1.0, Metric.EUCLIDEAN),
    "ball d=1": Region.ball(1.0),
}


def _chi_square(d, region, bins=50):
    edges = np.linspace(0.0, region.max_distance, bins + 1)
    obs, _ = np.histogram(d, edges)
    cdf = np.array([line_picking_cdf(region, t) for t in edges])
    exp = np.diff(cdf) * d.size
    # pool sparse tail bins so every expected count is at least 5
    o, e = [], []
    acc_o = acc_e = 0.0
    for a, b in zip(obs, exp):
        acc_o += a
        acc_e += b
        if acc_e >= 5:
            o.append(acc_o)
            e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        o[-1] += acc_o
        e[-1] += acc_e
    e = np.array(e) * (np.sum(o) / np.sum(e))
    return stats.chisquare(o, e).pvalue


def test_c1_distance_laws():
    t0 = time.perf_counter()
    results = []
    for k, (name, region) in enumerate(ANALYTIC_REGIONS.items()):
        d = sample_pair_distances(region, 10**6, seed=(1, k))
        p = _chi_square(d, region)
        mean = line_picking_moments(region)[0]
        z = (d.mean() - mean) / (d.std() / math.sqrt(d.size))
        results.append(report(f"1.{k + 1}", p > 1e-3 and abs(z) < 3,
                              f"line-picking law vs 1e6 pairs: {name}", f"chi2 p={p:.3g} mean z={z:+.2f}"))
    dt = time.perf_counter() - t0
    results.append(report("1.8", dt < 60, "distance-law validation runtime < 60 s", f"{dt:.1f} s"))
    check_all(results)


# ---------------------------------------------------------------------------
# 2. transforms


def test_c2_transform_consistency():
    results = []
    worst = 0.0
    laws = [SQ_LAW, DistanceLaw.analytic(Region.line()), DistanceLaw.analytic(Region.disk(1.0))]
    for law in laws:
        for s in (0.05, 0.5, 2.0, 8.0, 30.0):
            eps = 1e-4 * max(s, 1.0)
            for order in (1, 2):
                fd = (laplace(law, s + eps, order - 1) - laplace(law, s - eps, order - 1)) / (2 * eps)
                worst = max(worst, abs(laplace(law, s, order) - fd) / abs(fd))
    results.append(report("2.1", worst <= 1e-5, "G', G'' match central differences", f"max rel err {worst:.2e}"))

    grid = np.geomspace(1e-3, 1e3, 80)
    mono = all(np.all(np.diff([mean_link_length(law, s) for s in grid]) < 0) for law in laws)
    results.append(report("2.2", mono, "h(s) strictly decreasing on [1e-3, 1e3]", "80-point grid, 3 laws"))

    worst = 0.0
    for region in (SQUARE, Region.disk(1.0), Region.line(), Region.rectangle(2.0, 1.0)):
        g = analytic_inverse_cdf(region, m=1000)
        law = DistanceLaw.analytic(region)
        for s in np.linspace(0, 10, 21):
            worst = max(worst, abs(laplace(g, s) - laplace(law, s)) / laplace(law, s))
    results.append(report("2.3", worst <= 1e-3, "grid (m=1000) vs quadrature G, s <= 10", f"max rel err {worst:.2e}"))
    check_all(results)


# ---------------------------------------------------------------------------
# 3, 5. MLE accuracy and log-linear bias (shared sweep)


@pytest.fixture(scope="module")
def main_sweep():
    spec = ExperimentSpec(region=SQUARE, n=(1000,), k_bar=3.0, s_grid=(1.0, 2.0, 4.0, 8.0),
                          replicates=200, methods=("mle", "loglin"), seed=3)
    t0 = time.perf_counter()
    res = run_sweep(spec)
    return res, time.perf_counter() - t0


def test_c3_mle_accuracy(main_sweep):
    res, dt = main_sweep
    results = []
    for s in (1.0, 2.0, 4.0, 8.0):
        r = res.row(s_true=s, method="mle")
        rel = abs(r["mean_s_hat"] / s - 1)
        ratio = r["rms"] / r["cr_sd"]
        results.append(report(f"3.{int(s)}", rel <= 0.05 and ratio <= 1.5,
                              f"MLE n=1000 k=3 s={s:g}: mean within 5%, RMS <= 1.5 CR",
                              f"mean={r['mean_s_hat']:.3f} rms/cr={ratio:.3f}"))
    results.append(report("3.9", dt < 300, "MLE accuracy sweep runtime < 5 min", f"{dt:.0f} s"))
    check_all(results)


def test_c5_loglinear_bias(main_sweep):
    res, _ = main_sweep
    ll = res.row(s_true=8.0, method="loglin")["bias"]
    ml = res.row(s_true=8.0, method="mle")["bias"]
    biases = [res.row(s_true=s, method="loglin")["bias"] for s in (1.0, 2.0, 4.0, 8.0)]
    results = [
        report("5.1", ll < -0.1 and abs(ll) > abs(ml), "log-linear bias at s=8 < -0.1 and |.| > |MLE bias|",
               f"loglin={ll:+.3f} mle={ml:+.3f}"),
        report("5.2", all(np.diff(biases) < 0), "log-linear bias grows more negative with s",
               " ".join(f"{b:+.3f}" for b in biases)),
    ]
    check_all(results)


# ---------------------------------------------------------------------------
# 4. boundary behaviour


def test_c4_boundary_behaviour():
    spec = ExperimentSpec(region=SQUARE, n=(1000,), k_bar=3.0, s_grid=(0.0, 0.25),
                          replicates=1000, methods=("mle",), seed=4)
    res = run_sweep(spec)
    r25, r0 = res.row(s_true=0.25), res.row(s_true=0.0)
    results = [
        report("4.1", r25["boundary_fraction"] > 0, "s=0.25: some replicates hit s_hat = 0",
               f"boundary fraction {r25['boundary_fraction']:.3f}"),
        # the plain Monte Carlo bias has a standard error of about 0.004, so
        # the sign is judged with the control-variate estimate (see README)
        report("4.2", r25["bias_cv"] > 0, "s=0.25: positive bias (control-variate estimate)",
               f"bias_cv={r25['bias_cv']:+.5f} se={r25['bias_cv_se']:.5f} plain={r25['bias']:+.4f}"),
        report("4.3", r0["boundary_fraction"] >= 0.25, "s=0: at least 25% of replicates give s_hat = 0",
               f"boundary fraction {r0['boundary_fraction']:.3f}"),
    ]
    check_all(results)


# ---------------------------------------------------------------------------
# 6. GLM


def test_c6_glm():
    s = 3.0
    spec = ExperimentSpec(region=SQUARE, n=(500,), k_bar=3.0, s_grid=(s,), replicates=100,
                          methods=("mle", "glm"), seed=6)
    res = run_sweep(spec, keep_raw=True)
    g = res.row(method="glm")
    cr = g["cr_sd"]
    by_rep = {}
    for r in res.raw:
        by_rep.setdefault(r["rep"], {})[r["method"]] = r["s_hat"]
    close = np.mean([abs(v["glm"] - v["mle"]) <= 3 * cr for v in by_rep.values()])
    results = [
        report("6.1", abs(g["mean_s_hat"] / s - 1) <= 0.10, "GLM n=500 s=3: mean within 10%",
               f"mean={g['mean_s_hat']:.3f}"),
        report("6.2", g["rms"] <= 2 * cr, "GLM RMS <= 2 x CR", f"rms/cr={g['rms'] / cr:.3f}"),
        report("6.3", close >= 0.95, "|GLM - MLE| <= 3 CR in >= 95% of replicates", f"{close:.0%}"),
    ]
    check_all(results)


# ---------------------------------------------------------------------------
# 7. q estimate error


def test_c7_q_error():
    spec = ExperimentSpec(region=SQUARE, n=(1000,), k_bar=3.0, s_grid=(1.0, 2.0, 4.0, 8.0),
                          replicates=1000, methods=("mle",), seed=7)
    res = run_sweep(spec)
    results = []
    for r in res.rows:
        rel, true_s = r["q_rel_rms"], r["q_rel_rms_true_s"]
        factor = rel / true_s
        results.append(report(f"7.{int(r['s_true'])}", 0.01 <= rel <= 0.08 and 1.3 <= factor <= 3,
                              f"q_hat rel RMS in [1%,8%], true-s factor in [1.3,3], s={r['s_true']:g}",
                              f"rel={rel:.2%} true_s={true_s:.2%} factor={factor:.2f}"))
    check_all(results)


# ---------------------------------------------------------------------------
# 8. sufficiency and determinism


def test_c8_sufficiency_and_determinism(tmp_path):
    q = q_for_target_degree(SQ_LAW, 1000, 3.0, 4.0)
    g = generate_waxman(SQUARE, 1000, q, 4.0, seed=8)
    full = mle_s(summary_stats(g), SQ_LAW)
    stats_only = mle_s(SummaryStats(g.n, g.e, summary_stats(g).d_bar), SQ_LAW)
    shuffled = mle_s(summary_stats(np.random.default_rng(8).permutation(g.length), g.n), SQ_LAW)
    same = full.s_hat == stats_only.s_hat == shuffled.s_hat
    results = [report("8.1", same, "s_hat from edge list == s_hat from (e, d_bar), bit-exact",
                      f"{full.s_hat!r}")]
    paths = []
    for w in (1, 2):
        p = tmp_path / f"w{w}.csv"
        run_sweep(ExperimentSpec(region=SQUARE, n=(300,), s_grid=(1.0, 4.0), replicates=12,
                                 methods=("mle", "mle-e", "loglin", "glm"), seed=8, workers=w,
                                 output=str(p)))
        paths.append(p)
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    results.append(report("8.2", identical, "sweep CSV byte-identical for 1 and 2 workers",
                          f"{len(paths[0].read_bytes())} bytes"))
    check_all(results)


# ---------------------------------------------------------------------------
# 9, 10. asymptotics and KLD


def test_c9_asymptotics():
    results = []
    for cid, name, law, k in (("9.1", "square", SQ_LAW, 2),
                              ("9.2", "line", DistanceLaw.analytic(Region.line()), 1)):
        dev = abs(50 * mean_link_length(law, 50.0) / k - 1)
        results.append(report(cid, dev <= 0.05, f"|s h(s)/k - 1| <= 0.05 at s=50, {name}", f"{dev:.4f}"))
    check_all(results)


def test_c10_kld():
    results = []
    for k, s in enumerate((0.5, 2.0, 10.0)):
        a, b = kld_from_ger(s, SQ_LAW), kld_direct(s, SQ_LAW)
        results.append(report(f"10.{k + 1}", abs(a - b) <= 1e-6, f"KLD decomposition vs direct integral, s={s:g}",
                              f"{a:.9f} vs {b:.9f}"))
    results.append(report("10.4", kld_from_ger(0.0, SQ_LAW) == 0.0, "KLD(0) == 0 exactly", ""))
    check_all(results)


# ---------------------------------------------------------------------------
# 11. robustness


def test_c11_robustness():
    results = []
    infl = {}
    for k, (true, wrong) in enumerate((("rect", "square"), ("disk", "square"), ("square", "disk"))):
        spec = ExperimentSpec(region=matched_shape(true, SQUARE), n=(1000,), s_grid=(3.0,),
                              replicates=200, seed=11 + 100 * k)
        res = run_robustness(spec, "shape", {f"as_{wrong}": matched_shape(wrong, SQUARE)})
        infl[(true, wrong)] = res.row(variant=f"as_{wrong}")["inflation"]
    rect = infl[("rect", "square")]
    other = max(infl[("disk", "square")], infl[("square", "disk")])
    results.append(report("11.1", rect > other, "rect-as-square inflation > disk<->square inflation, s=3",
                          f"rect {rect:.1%} vs disk/square {infl[('disk', 'square')]:.1%}, "
                          f"{infl[('square', 'disk')]:.1%}"))

    spec = ExperimentSpec(region=Region.disk(1.0), n=(1000,), s_grid=(3.0, 10.0, 20.0),
                          replicates=200, seed=11)
    res = run_robustness(spec, "size")
    pair = [res.row(s_true=s, variant="max_pair")["inflation"] for s in (3.0, 10.0, 20.0)]
    link = [res.row(s_true=s, variant="max_link")["inflation"] for s in (3.0, 10.0, 20.0)]
    results.append(report("11.2", max(pair) < 0.05, "size from max pair distance: inflation < 5%",
                          " ".join(f"{x:+.2%}" for x in pair)))
    results.append(report("11.3", all(np.diff(link) > 0), "size from max link: inflation grows with s",
                          " ".join(f"{x:.2f}" for x in link)))
    check_all(results)


# ---------------------------------------------------------------------------
# 12. complexity


def _median_time(fn, repeats):
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


def test_c12_complexity():
    e_target = 1500
    graphs = {}
    for n in (250, 1000, 4000):
        q = q_for_target_degree(SQ_LAW, n, 2 * e_target / n, 3.0)
        graphs[n] = generate_waxman(SQUARE, n, q, 3.0, seed=(12, n))
    mle_s(summary_stats(graphs[250]), SQ_LAW)  # warm caches before timing
    times = {n: [] for n in graphs}
    for _ in range(5):  # interleave rounds so drift hits every n alike
        for n, g in graphs.items():
            times[n].append(_median_time(lambda: mle_s(summary_stats(g), SQ_LAW), 5))
    med = {n: float(np.median(v)) for n, v in times.items()}
    spread = max(med.values()) / min(med.values())
    results = [report("12.1", spread <= 2.0, "median MLE time flat within 2x, n in {250,1000,4000}",
                      " ".join(f"n={n}:{t * 1e3:.2f}ms" for n, t in med.items()) + f" ratio={spread:.2f}")]

    ns = (250, 500, 1000, 2000)
    gtimes = []
    for n in ns:
        q = q_for_target_degree(SQ_LAW, n, 3.0, 3.0)
        g = generate_waxman(SQUARE, n, q, 3.0, seed=(12, n, 1))
        d, y = all_pair_distances(SQUARE, g.coords), g.adjacency_indicator()
        glm_fit(d, y)
        gtimes.append(_median_time(lambda: glm_fit(d, y), 5))
    slope = np.polyfit(np.log(ns), np.log(gtimes), 1)[0]
    results.append(report("12.2", abs(slope - 2) <= 0.3, "GLM log-log time slope in n = 2 +- 0.3",
                          f"slope={slope:.2f}"))
    check_all(results)


# ---------------------------------------------------------------------------
# 13. ingestion


def test_c13_ingestion(tmp_path):
    q = q_for_target_degree(SQ_LAW, 800, 3.0, 2.0)
    g = generate_waxman(SQUARE, 800, q, 2.0, seed=13)
    write_graph(g, tmp_path / "e.csv", tmp_path / "v.csv", length_unit="region-unit")
    _, st = ingest(tmp_path / "e.csv")
    same = st == summary_stats(g)
    results = [report("13.1", same, "generate -> serialize -> ingest keeps (n, e, d_bar) exactly",
                      f"{st.n} {st.e} {st.d_bar!r}")]
    _, z = ingest(FIXTURES / "zoo_aarnet_like.csv")
    ok = (z.n, z.e, round(z.d_bar, 1)) == (19, 24, 695.6)
    results.append(report("13.2", ok, "Zoo-style fixture gives (19, 24, 695.6 km)",
                          f"({z.n}, {z.e}, {z.d_bar:.1f})"))
    check_all(results)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
