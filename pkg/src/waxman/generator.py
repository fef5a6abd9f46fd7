"""Waxman and DASTB random graphs, and their sufficient statistics.

Random streams are counter based: node positions come from the child
``SeedSequence(seed, spawn_key=(0,))`` and the link draws for rows
``[64 b, 64 b + 64)`` from ``spawn_key=(1, b)``.  Work is split along these
fixed stream blocks, so any partition into worker blocks gives the same graph.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import InfeasibleParametersError, ParameterError
from .geometry import DistanceLaw, Region, region_distance, sample_points
from .transforms import laplace

WAXMAN = "waxman"
DASTB = "dastb"


@dataclass
class Graph:
    """Undirected graph with per-edge lengths, ``i < j`` for every edge."""

    n: int
    i: np.ndarray
    j: np.ndarray
    length: np.ndarray
    coords: Optional[np.ndarray] = None
    model: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def e(self) -> int:
        return int(len(self.length))

    def edges(self):
        return zip(self.i.tolist(), self.j.tolist(), self.length.tolist())

    def adjacency_indicator(self) -> np.ndarray:
        """0/1 vector over the condensed i<j pair ordering of ``np.triu_indices``."""
        y = np.zeros(self.n * (self.n - 1) // 2, dtype=np.int8)
        n = self.n
        idx = self.i * n - self.i * (self.i + 1) // 2 + (self.j - self.i - 1)
        y[idx] = 1
        return y


@dataclass(frozen=True)
class SummaryStats:
    n: int
    e: int
    d_bar: float

    @property
    def empty(self) -> bool:
        return self.e == 0


def summary_stats(graph_or_lengths, n: Optional[int] = None) -> SummaryStats:
    """(n, e, mean length) from a graph or any iterable of edge lengths.

    The mean uses ``math.fsum`` so it is exactly rounded and therefore
    independent of edge order.
    """
    if isinstance(graph_or_lengths, Graph):
        n = graph_or_lengths.n if n is None else n
        lengths: Iterable = graph_or_lengths.length.tolist()
    else:
        lengths = graph_or_lengths
        if isinstance(lengths, np.ndarray):
            lengths = lengths.tolist()
    count = 0

    def counted():
        nonlocal count
        for x in lengths:
            count += 1
            yield x

    total = math.fsum(counted())
    d_bar = total / count if count else 0.0
    return SummaryStats(0 if n is None else int(n), count, d_bar)


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _child(ss: np.random.SeedSequence, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + key)


STREAM_ROWS = 64


def _link_rows(region, pts, link_prob, ss, blocks):
    """Link draws for whole stream blocks; block b covers rows [64b, 64b+64)."""
    n = len(pts)
    ii, jj, ll = [], [], []
    for b in blocks:
        rows = np.arange(b * STREAM_ROWS, min((b + 1) * STREAM_ROWS, n - 1))
        counts = n - 1 - rows
        i = np.repeat(rows, counts)
        offs = np.arange(i.size) - np.repeat(np.cumsum(counts) - counts, counts)
        j = i + 1 + offs
        d = region_distance(region, pts[i], pts[j])
        u = np.random.default_rng(_child(ss, 1, int(b))).random(i.size)
        hit = u < link_prob(d)
        ii.append(i[hit])
        jj.append(j[hit])
        ll.append(d[hit])
    return ii, jj, ll


def _generate(region, n, link_prob, seed, model, params, block_rows=None, workers=1):
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    ss = _seed_sequence(seed)
    pts = sample_points(region, n, _child(ss, 0))
    nblocks = -(-(n - 1) // STREAM_ROWS)
    per = max(1, -(-(block_rows or n) // STREAM_ROWS))
    parts_idx = [range(a, min(a + per, nblocks)) for a in range(0, nblocks, per)]
    if workers > 1 and len(parts_idx) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda r: _link_rows(region, pts, link_prob, ss, r), parts_idx))
    else:
        parts = [_link_rows(region, pts, link_prob, ss, r) for r in parts_idx]
    ii = [a for p in parts for a in p[0]]
    jj = [a for p in parts for a in p[1]]
    ll = [a for p in parts for a in p[2]]
    meta = {"region": region.describe(), "n": n, "model": model, **params}
    if not isinstance(seed, np.random.SeedSequence):
        meta["seed"] = seed
    return Graph(n, np.concatenate(ii).astype(np.int64), np.concatenate(jj).astype(np.int64),
                 np.concatenate(ll), pts, model, meta)


def _check_s(s):
    if not (s >= 0 and math.isfinite(s)):
        raise ParameterError(f"s must be finite and >= 0, got {s}")


def generate_waxman(region: Region, n: int, q: float, s: float, seed=None,
                    block_rows: Optional[int] = None, workers: int = 1) -> Graph:
    """Link each pair independently with probability ``q exp(-s d)``."""
    if not (0 < q <= 1):
        raise ParameterError(f"q must lie in (0, 1], got {q}")
    _check_s(s)
    return _generate(region, n, lambda d: q * np.exp(-s * d), seed, WAXMAN,
                     {"q": q, "s": s}, block_rows, workers)


def generate_dastb(region: Region, n: int, q: float, s: float, seed=None,
                   block_rows: Optional[int] = None, workers: int = 1) -> Graph:
    """Link each pair with probability ``1 - exp(-q exp(-s d))``.

    This is the chance of at least one Poisson contact at rate ``q exp(-s d)``,
    so ``q`` may exceed one.
    """
    if not q > 0:
        raise ParameterError(f"q must be positive, got {q}")
    _check_s(s)
    return _generate(region, n, lambda d: -np.expm1(-q * np.exp(-s * d)), seed, DASTB,
                     {"q": q, "s": s}, block_rows, workers)


def q_for_target_degree(law_or_region, n: int, k_bar: float, s: float) -> float:
    """q giving expected degree ``k_bar``: k_bar / ((n-1) G(s))."""
    law = law_or_region if isinstance(law_or_region, DistanceLaw) else DistanceLaw.analytic(law_or_region)
    G = laplace(law, s)
    q = k_bar / ((n - 1) * G) if G > 0 else math.inf
    if q > 1:
        raise InfeasibleParametersError(
            f"k_bar={k_bar} at n={n}, s={s} needs q={q:.4g} > 1"
        )
    return q
