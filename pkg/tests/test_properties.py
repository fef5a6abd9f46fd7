import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from waxman.estimators import mle_s
from waxman.generator import SummaryStats, generate_waxman, summary_stats
from waxman.geometry import (
    DistanceLaw,
    Metric,
    Region,
    empirical_inverse_cdf,
    line_picking_pdf,
    pair_distance,
)
from waxman.transforms import laplace, mean_link_length

LAWS = {
    "line": DistanceLaw.analytic(Region.line()),
    "square": DistanceLaw.analytic(Region.square()),
    "disk": DistanceLaw.analytic(Region.disk(1.0)),
    "ball": DistanceLaw.analytic(Region.ball(1.0)),
}

coord = st.floats(-10, 10, allow_nan=False)
point2 = st.tuples(coord, coord)
unit3 = st.tuples(coord, coord, coord).filter(lambda p: math.hypot(*p) > 1e-3)


@given(point2, point2, point2)
def test_euclidean_metric_axioms(a, b, c):
    ab, ba = pair_distance(a, b), pair_distance(b, a)
    assert ab == ba and ab >= 0
    assert pair_distance(a, c) <= ab + pair_distance(b, c) + 1e-9


@given(unit3, unit3)
def test_great_circle_bounded_and_symmetric(a, b):
    a = np.array(a) / np.linalg.norm(a)
    b = np.array(b) / np.linalg.norm(b)
    d = pair_distance(a, b, Metric.GREAT_CIRCLE, 1.0)
    assert 0 <= d <= math.pi + 1e-12
    assert d == pair_distance(b, a, Metric.GREAT_CIRCLE, 1.0)
    assert d >= pair_distance(a, b) - 1e-12  # arc is never shorter than the chord


@given(st.sampled_from(["line", "square", "disk", "ball"]),
       st.floats(0.05, 20.0), st.floats(0.0, 1.0))
def test_pdf_scaling(name, c, frac):
    region = LAWS[name].region
    t = frac * region.max_distance
    big = region.scaled(c)
    assert math.isclose(line_picking_pdf(big, c * t), line_picking_pdf(region, t) / c,
                        rel_tol=1e-10, abs_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(LAWS)), st.floats(1e-3, 300.0))
def test_mle_inverts_h(name, s):
    law = LAWS[name]
    d_bar = mean_link_length(law, s)
    res = mle_s(SummaryStats(50, 20, d_bar), law)
    assert abs(mean_link_length(law, res.s_hat) - d_bar) <= 1e-8
    assert not res.boundary


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(LAWS)), st.floats(0.0, 50.0), st.floats(0.01, 50.0))
def test_transform_monotone(name, s, ds):
    law = LAWS[name]
    assert laplace(law, s + ds) < laplace(law, s) or laplace(law, s) == 0
    assert mean_link_length(law, s + ds) < mean_link_length(law, s)


@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(0, 1e3)),
       st.integers(2, 300))
def test_empirical_quantiles_ordered_and_bounded(x, m):
    law = empirical_inverse_cdf(x, m)
    q = law.quantiles
    assert len(q) == m
    assert np.all(np.diff(q) >= 0)
    assert q[0] >= x.min() and q[-1] <= x.max() <= law.d_sup


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=300), st.randoms())
def test_summary_stats_permutation_invariant(xs, rnd):
    a = summary_stats(xs, 10)
    ys = list(xs)
    rnd.shuffle(ys)
    b = summary_stats(ys, 10)
    assert a == b
    assert min(xs) * (1 - 1e-15) <= a.d_bar <= max(xs) * (1 + 1e-15)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 120), st.floats(0.01, 1.0), st.floats(0.0, 20.0), st.integers(0, 2**32 - 1),
       st.integers(1, 200))
def test_generator_partition_invariant(n, q, s, seed, block_rows):
    a = generate_waxman(Region.square(), n, q, s, seed)
    b = generate_waxman(Region.square(), n, q, s, seed, block_rows=block_rows, workers=2)
    assert np.array_equal(a.i, b.i) and np.array_equal(a.j, b.j)
    assert np.array_equal(a.length, b.length)
    assert np.all(a.i < a.j) and np.all(a.j < n)
