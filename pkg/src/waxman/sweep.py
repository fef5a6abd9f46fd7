"""Replicated simulation sweeps over (n, s) and robustness experiments.

Every replicate gets its own ``SeedSequence(seed, spawn_key=(cell, rep))``
so results do not depend on how replicates are spread across workers, and
aggregation happens after sorting by (cell, replicate).
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .analysis import fisher_information
from .errors import InfeasibleParametersError, WaxmanError
from .estimators import (
    Method,
    glm_fit,
    loglinear_s,
    mle_e,
    mle_n,
    mle_q,
    mle_s,
    mle_truncated,
)
from .generator import DASTB, WAXMAN, generate_dastb, generate_waxman, q_for_target_degree, summary_stats
from .geometry import DistanceLaw, Region, all_pair_distances, line_picking_moments
from .transforms import dh_ds, mean_link_length

PAIR_METHODS = {Method.MLE_E, Method.MLE_T, Method.LOGLINEAR_E, Method.GLM}

SWEEP_COLUMNS = [
    "s_true", "n", "k_bar", "q", "method", "replicates", "failures", "mean_s_hat", "bias",
    "rms", "cr_sd", "median_time_s", "boundary_fraction", "q_rel_rms", "q_rel_rms_true_s",
    "bias_cv", "bias_cv_se", "note",
]


@dataclass
class ExperimentSpec:
    region: Region = field(default_factory=Region.square)
    n: Sequence[int] = (1000,)
    s_grid: Sequence[float] = (1.0, 2.0, 4.0, 8.0)
    k_bar: Optional[float] = 3.0
    q: Optional[float] = None
    replicates: int = 200
    methods: Sequence[str] = ("mle",)
    seed: int = 0
    model: str = WAXMAN
    workers: int = 1
    timing: bool = False
    window: Optional[tuple] = None
    output: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.n, int):
            self.n = (self.n,)
        self.n = tuple(int(x) for x in self.n)
        self.s_grid = tuple(float(x) for x in self.s_grid)
        self.methods = tuple(Method(m) for m in self.methods)
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.n or not self.s_grid or not self.methods:
            raise ValueError("n, s_grid and methods must be non-empty")
        if (self.k_bar is None) == (self.q is None):
            raise ValueError("give exactly one of k_bar or q")

    def cells(self):
        return [(n, s) for n in self.n for s in self.s_grid]

    def describe(self) -> dict:
        d = asdict(self)
        d["region"] = self.region.describe()
        d["methods"] = [m.value for m in self.methods]
        d.pop("workers")
        return d


@dataclass
class SweepResult:
    rows: List[dict]
    raw: List[dict]
    spec: dict

    def row(self, **match) -> dict:
        for r in self.rows:
            if all(r.get(k) == v for k, v in match.items()):
                return r
        raise KeyError(match)

    def write(self, path) -> Path:
        path = Path(path)
        write_rows(path, self.rows, columns_for(self.rows))
        meta = path.with_suffix(".json")
        meta.write_text(json.dumps(self.spec, indent=2, sort_keys=True, default=str) + "\n")
        return path


def columns_for(rows):
    cols = list(SWEEP_COLUMNS)
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def write_rows(path, rows, columns):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])


# ---------------------------------------------------------------------------
# single replicate


def _seed(master, cell, rep):
    return np.random.SeedSequence(master, spawn_key=(cell, rep))


def _generate(model, region, n, q, s, seed):
    if model == DASTB:
        return generate_dastb(region, n, q, s, seed)
    return generate_waxman(region, n, q, s, seed)


def run_estimator(method: Method, graph, law: DistanceLaw, pairs=None, window=None,
                  timing: bool = False):
    """Run one estimator on a graph; returns (EstimateResult, seconds)."""
    stats = summary_stats(graph)
    y = graph.adjacency_indicator() if method is Method.GLM else None
    t0 = time.perf_counter()
    if method is Method.MLE:
        res = mle_s(stats, law)
    elif method is Method.MLE_N:
        res = mle_n(stats, law.region)
    elif method is Method.MLE_E:
        res = mle_e(stats, pairs)
    elif method is Method.MLE_T:
        res = mle_truncated(graph.length, pairs, window or (0.0, math.inf))
    elif method is Method.LOGLINEAR:
        res = loglinear_s(graph.length, law, window=window, n=graph.n)
    elif method is Method.LOGLINEAR_E:
        res = loglinear_s(graph.length, pairs, window=window, n=graph.n)
    else:
        res = glm_fit(pairs, y)
    dt = time.perf_counter() - t0
    return res, (dt if timing else None)


def _replicate(task):
    (cell, rep, n, s, q, region, model, methods, master, window, timing, h, dh) = task
    graph = _generate(model, region, n, q, s, _seed(master, cell, rep))
    law = DistanceLaw.analytic(region)
    pairs = all_pair_distances(region, graph.coords) if PAIR_METHODS & set(methods) else None
    q_true_s = mle_q(s, n, graph.e, law)
    # first-order inversion of h around the true s; its mean is exactly s
    s_lin = s + (summary_stats(graph).d_bar - h) / dh if graph.e else math.nan
    out = []
    for m in methods:
        rec = {"cell": cell, "rep": rep, "method": m.value, "e": graph.e, "q_true_s": q_true_s,
               "s_lin": s_lin}
        try:
            res, dt = run_estimator(m, graph, law, pairs, window, timing)
            rec.update(s_hat=res.s_hat, q_hat=res.q_hat, boundary=res.boundary, time=dt)
        except WaxmanError as exc:
            rec.update(s_hat=math.nan, q_hat=math.nan, boundary=False, time=None,
                       error=type(exc).__name__)
        out.append(rec)
    return out


def _map(fn, tasks, workers):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------------------
# aggregation


def aggregate(s_true: float, q: float, s_hat: np.ndarray, q_hat=None, q_true_s=None,
              times=None, boundary=None, s_lin=None) -> dict:
    """Bias, RMS and friends for one cell; bias is NaN for a single replicate.

    ``s_lin`` (a control variate with known mean ``s_true``) gives the
    lower-variance bias estimate ``bias_cv = mean(s_hat - s_lin)``.
    """
    ok = np.isfinite(s_hat)
    x = s_hat[ok]
    r = {"replicates": int(len(s_hat)), "failures": int((~ok).sum())}
    if x.size == 0:
        r.update(mean_s_hat=math.nan, bias=math.nan, rms=math.nan, boundary_fraction=math.nan)
        return r
    err = x - s_true
    r["mean_s_hat"] = float(np.mean(x))
    r["bias"] = float(np.mean(err)) if x.size > 1 else math.nan
    r["rms"] = float(np.sqrt(np.mean(err ** 2)))
    if boundary is not None:
        r["boundary_fraction"] = float(np.mean(np.asarray(boundary)[ok]))
    if q_hat is not None and q and q > 0:
        qh = np.asarray(q_hat)[ok]
        r["q_rel_rms"] = float(np.sqrt(np.mean((qh / q - 1) ** 2)))
    if q_true_s is not None and q and q > 0:
        qt = np.asarray(q_true_s)
        r["q_rel_rms_true_s"] = float(np.sqrt(np.mean((qt / q - 1) ** 2)))
    if s_lin is not None and x.size > 1:
        sl = np.asarray(s_lin, dtype=float)[ok]
        good = np.isfinite(sl)
        diff = x[good] - sl[good]
        r["bias_cv"] = float(np.mean(diff))
        r["bias_cv_se"] = float(np.std(diff, ddof=1) / math.sqrt(diff.size))
    r["median_time_s"] = None
    if times is not None:
        t = [v for v, good in zip(times, ok) if good and v is not None]
        r["median_time_s"] = float(np.median(t)) if t else None
    return r


def _cell_q(spec, law, n, s):
    if spec.q is not None:
        return spec.q, ""
    try:
        return q_for_target_degree(law, n, spec.k_bar, s), ""
    except InfeasibleParametersError as exc:
        return None, f"infeasible: {exc}"


def run_sweep(spec: ExperimentSpec, keep_raw: bool = False) -> SweepResult:
    """Simulate every (n, s) cell and aggregate each estimator's error."""
    law = DistanceLaw.analytic(spec.region)
    cells = spec.cells()
    tasks, cell_q = [], {}
    for c, (n, s) in enumerate(cells):
        q, note = _cell_q(spec, law, n, s)
        cell_q[c] = (q, note)
        if q is None:
            continue
        h, dh = mean_link_length(law, s), dh_ds(law, s)
        for rep in range(spec.replicates):
            tasks.append((c, rep, n, s, q, spec.region, spec.model, spec.methods, spec.seed,
                          spec.window, spec.timing, h, dh))
    recs = [r for out in _map(_replicate, tasks, spec.workers) for r in out]
    recs.sort(key=lambda r: (r["cell"], r["rep"], r["method"]))
    rows = []
    for c, (n, s) in enumerate(cells):
        q, note = cell_q[c]
        cr = fisher_information(n, q, s, law).cr_sd if q is not None else None
        for m in spec.methods:
            base = {"s_true": s, "n": n, "k_bar": spec.k_bar, "q": q, "method": m.value,
                    "cr_sd": cr, "note": note}
            if q is None:
                rows.append(base)
                continue
            rr = [r for r in recs if r["cell"] == c and r["method"] == m.value]
            agg = aggregate(
                s, q, np.array([r["s_hat"] for r in rr], dtype=float),
                [r["q_hat"] for r in rr], [r["q_true_s"] for r in rr],
                [r["time"] for r in rr] if spec.timing else None,
                [r["boundary"] for r in rr],
                [r["s_lin"] for r in rr],
            )
            rows.append({**base, **agg})
    result = SweepResult(rows, recs if keep_raw else [], spec.describe())
    if spec.output:
        result.write(spec.output)
    return result


# ---------------------------------------------------------------------------
# robustness


def equal_area(kind: str, area: float = 1.0) -> Region:
    """Square, disk or 2:1 rectangle with the given area."""
    if kind == "square":
        return Region.square(math.sqrt(area))
    if kind == "disk":
        return Region.disk(2 * math.sqrt(area / math.pi))
    if kind == "rect":
        return Region.rectangle(math.sqrt(2 * area), math.sqrt(area / 2))
    raise ValueError(f"unknown shape {kind!r}")


def matched_shape(kind: str, reference: Region) -> Region:
    """Square, disk or 2:1 rectangle with the same mean pair distance as ``reference``.

    Used for wrong-shape studies: with the mean distance held fixed, the
    estimate at s near 0 is unaffected and only the shape of the distance
    law differs.
    """
    base = equal_area(kind)
    return base.scaled(line_picking_moments(reference)[0] / line_picking_moments(base)[0])


def _robust_replicate(task):
    (cell, rep, n, s, q, mode, true_region, assumed, master) = task
    seed = _seed(master, cell, rep)
    law_true = DistanceLaw.analytic(true_region)
    out = []
    if mode == "model":
        for model in (WAXMAN, DASTB):
            g = _generate(model, true_region, n, q, s, seed)
            res = mle_s(summary_stats(g), law_true)
            out.append({"cell": cell, "rep": rep, "variant": model, "s_hat": res.s_hat,
                        "boundary": res.boundary})
        return out
    g = generate_waxman(true_region, n, q, s, seed)
    stats = summary_stats(g)
    variants = {"correct": law_true}
    if mode == "shape":
        for name, region in assumed.items():
            variants[name] = DistanceLaw.analytic(region)
    else:
        dmax = true_region.max_distance
        max_link = float(g.length.max()) if g.e else dmax
        max_pair = float(all_pair_distances(true_region, g.coords).max())
        variants["known"] = law_true
        del variants["correct"]
        variants["max_link"] = DistanceLaw.analytic(true_region.scaled(max_link / dmax))
        variants["max_pair"] = DistanceLaw.analytic(true_region.scaled(max_pair / dmax))
    for name, law in variants.items():
        try:
            res = mle_s(stats, law)
            out.append({"cell": cell, "rep": rep, "variant": name, "s_hat": res.s_hat,
                        "boundary": res.boundary})
        except WaxmanError as exc:
            out.append({"cell": cell, "rep": rep, "variant": name, "s_hat": math.nan,
                        "boundary": False, "error": type(exc).__name__})
    return out


def run_robustness(spec: ExperimentSpec, mode: str, assumed: Optional[dict] = None) -> SweepResult:
    """MLE error under a misspecified region shape, region size or model.

    ``mode`` is ``"shape"`` (``assumed`` maps labels to wrong regions),
    ``"size"`` (region scale from the longest link or the longest node-pair
    distance) or ``"model"`` (DASTB graphs fitted as Waxman).  Each row
    reports ``inflation = rms / rms_reference - 1`` against the correctly
    specified estimate on the same graphs.
    """
    if mode not in ("shape", "size", "model"):
        raise ValueError(f"unknown robustness mode {mode!r}")
    if mode == "shape" and not assumed:
        raise ValueError("shape mode needs assumed regions")
    law = DistanceLaw.analytic(spec.region)
    cells = spec.cells()
    tasks, cell_q = [], {}
    for c, (n, s) in enumerate(cells):
        q, note = _cell_q(spec, law, n, s)
        cell_q[c] = (q, note)
        if q is None:
            continue
        for rep in range(spec.replicates):
            tasks.append((c, rep, n, s, q, mode, spec.region, assumed or {}, spec.seed))
    recs = [r for out in _map(_robust_replicate, tasks, spec.workers) for r in out]
    recs.sort(key=lambda r: (r["cell"], r["rep"], r["variant"]))
    reference = {"shape": "correct", "size": "known", "model": WAXMAN}[mode]
    rows = []
    for c, (n, s) in enumerate(cells):
        q, note = cell_q[c]
        names = sorted({r["variant"] for r in recs if r["cell"] == c},
                       key=lambda v: (v != reference, v))
        aggs = {}
        for v in names:
            rr = [r for r in recs if r["cell"] == c and r["variant"] == v]
            aggs[v] = aggregate(s, q, np.array([r["s_hat"] for r in rr], dtype=float),
                                boundary=[r["boundary"] for r in rr])
        cr = fisher_information(n, q, s, law).cr_sd if q is not None else None
        if not names:
            rows.append({"s_true": s, "n": n, "k_bar": spec.k_bar, "q": q, "method": "mle",
                         "cr_sd": cr, "note": note, "mode": mode})
        for v in names:
            ref = aggs[reference]["rms"]
            rows.append({"s_true": s, "n": n, "k_bar": spec.k_bar, "q": q, "method": "mle",
                         "cr_sd": cr, "note": note, "mode": mode, "variant": v, **aggs[v],
                         "inflation": aggs[v]["rms"] / ref - 1 if ref > 0 else math.nan})
    desc = spec.describe()
    desc["robustness"] = {"mode": mode,
                          "assumed": {k: r.describe() for k, r in (assumed or {}).items()}}
    result = SweepResult(rows, recs, desc)
    if spec.output:
        result.write(spec.output)
    return result
