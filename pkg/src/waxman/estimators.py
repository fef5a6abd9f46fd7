"""Estimators of the Waxman parameters (q, s).

The maximum-likelihood family needs only the edge count and mean edge
length; the log-linear and GLM estimators also look at non-edges.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, InsufficientDataError, ParameterError
from .generator import SummaryStats, summary_stats
from .geometry import (
    DistanceLaw,
    LawKind,
    Region,
    analytic_inverse_cdf,
    empirical_inverse_cdf,
    line_picking_cdf,
)
from .transforms import laplace, log_laplace, mean_link_length, mle_equation

S_TOL = 1e-8
MAX_DOUBLINGS = 60
DEFAULT_GRID = 1000
DEFAULT_BINS = 30


class Method(str, enum.Enum):
    MLE = "mle"
    MLE_N = "mle-n"
    MLE_E = "mle-e"
    MLE_T = "mle-t"
    LOGLINEAR = "loglin"
    LOGLINEAR_E = "loglin-e"
    GLM = "glm"


@dataclass
class EstimateResult:
    s_hat: float
    q_hat: float
    method: Method
    boundary: bool = False
    diagnostics: dict = field(default_factory=dict)
    cr_bound: Optional[float] = None

    @property
    def q_out_of_range(self) -> bool:
        return not (0.0 <= self.q_hat <= 1.0)

    def as_dict(self) -> dict:
        d = {
            "method": self.method.value,
            "s_hat": self.s_hat,
            "q_hat": self.q_hat,
            "boundary": self.boundary,
            "q_out_of_range": self.q_out_of_range,
        }
        if self.cr_bound is not None:
            d["cr_sd"] = self.cr_bound
        d.update({k: v for k, v in self.diagnostics.items() if np.isscalar(v)})
        return d


Window = Tuple[float, float]


# ---------------------------------------------------------------------------
# maximum likelihood


def mle_q(s_hat: float, n: int, e: int, law: DistanceLaw) -> float:
    """q_hat = 2e / (n (n-1) G(s_hat)).  Values above one are returned as is."""
    if n < 2:
        raise ParameterError("need n >= 2")
    if e == 0:
        return 0.0
    logq = math.log(2 * e) - math.log(n) - math.log(n - 1) - log_laplace(law, s_hat)
    return math.exp(logq) if logq < 700 else math.inf


def _dimension(law: DistanceLaw, k: Optional[int]) -> int:
    if k is not None:
        return k
    if law.region is not None:
        return law.region.dimension
    return 2


def mle_s(stats: SummaryStats, law: DistanceLaw, tol: float = S_TOL,
          k: Optional[int] = None, method: Method = Method.MLE) -> EstimateResult:
    """Maximum-likelihood s from the sufficient statistics (e, d_bar).

    Solves LT[(d_bar - t) g(t); s] = 0, i.e. h(s) = d_bar, on the bracket
    [0, k/d_bar], doubling the upper end until the sign changes.  When
    d_bar >= h(0) the estimate is s = 0 and ``boundary`` is set.
    """
    if stats.e < 1:
        raise InsufficientDataError("MLE needs at least one edge")
    d_bar = stats.d_bar
    if not (d_bar >= 0 and math.isfinite(d_bar)):
        raise ParameterError(f"invalid mean edge length {d_bar}")
    h0 = mean_link_length(law, 0.0)
    diag = {"h0": h0, "iterations": 0, "doublings": 0}
    if d_bar >= h0:
        s_hat, boundary = 0.0, True
        diag["residual"] = d_bar - h0
    else:
        if d_bar <= 0:
            raise InsufficientDataError("mean edge length is zero; s is unbounded")
        lo, hi = 0.0, _dimension(law, k) / d_bar
        f_hi = mle_equation(law, hi, d_bar)
        while f_hi <= 0:
            if diag["doublings"] >= MAX_DOUBLINGS:
                raise ConvergenceError("could not bracket the likelihood root", diag)
            lo, hi = hi, 2 * hi
            f_hi = mle_equation(law, hi, d_bar)
            diag["doublings"] += 1
        s_hat, rr = optimize.brentq(
            lambda x: mle_equation(law, x, d_bar), lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
            full_output=True,
        )
        boundary = False
        diag["iterations"] = rr.iterations
        diag["residual"] = mean_link_length(law, s_hat) - d_bar
    q_hat = mle_q(s_hat, stats.n, stats.e, law) if stats.n >= 2 else math.nan
    return EstimateResult(s_hat, q_hat, method, boundary, diag)


@lru_cache(maxsize=32)
def grid_law(region: Region, m: int = DEFAULT_GRID) -> DistanceLaw:
    """Cached fixed inverse-CDF grid for a region."""
    return analytic_inverse_cdf(region, m)


def mle_n(stats: SummaryStats, region: Region, m: int = DEFAULT_GRID, **kw) -> EstimateResult:
    """MLE on a precomputed m-point quantile grid of the region's distance law."""
    return mle_s(stats, grid_law(region, m), method=Method.MLE_N,
                 k=kw.pop("k", region.dimension), **kw)


def mle_e(stats: SummaryStats, pair_distances, m: int = DEFAULT_GRID, **kw) -> EstimateResult:
    """MLE with the distance law estimated from all node-pair distances."""
    law = empirical_inverse_cdf(pair_distances, m)
    return mle_s(stats, law, method=Method.MLE_E, **kw)


def _censor(x, window: Optional[Window]):
    x = np.asarray(x, dtype=float)
    if window is None:
        return x
    lo, hi = window
    return x[(x >= lo) & (x <= hi)]


def mle_truncated(edge_lengths, pair_distances, window: Window = (0.0, math.inf),
                  m: int = DEFAULT_GRID, **kw) -> EstimateResult:
    """MLE-E with both edges and potential edges restricted to ``window``.

    ``q_hat`` refers to the censored population: 2 e_w / (N_w G_w(s)), with
    ``N_w`` the number of node pairs whose distance falls in the window.
    """
    edges = _censor(edge_lengths, window)
    pairs = _censor(pair_distances, window)
    if edges.size == 0 or pairs.size == 0:
        raise InsufficientDataError(f"no data left inside window {window}")
    law = empirical_inverse_cdf(pairs, m)
    stats = summary_stats(edges)
    res = mle_s(stats, law, method=Method.MLE_T, **kw)
    res.q_hat = edges.size / (pairs.size * math.exp(log_laplace(law, res.s_hat)))
    res.diagnostics.update({"window_lo": window[0], "window_hi": window[1],
                            "edges_used": int(edges.size), "pairs_used": int(pairs.size)})
    return res


def sample_edges(edge_lengths, m: int, seed=None) -> np.ndarray:
    """Uniform sample of ``m`` edge lengths without replacement (all if m >= e)."""
    if m < 1:
        raise ParameterError("sample size must be >= 1")
    x = np.asarray(edge_lengths, dtype=float)
    if m >= x.size:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x[np.sort(rng.choice(x.size, size=m, replace=False))]


# ---------------------------------------------------------------------------
# log-linear regression


def loglinear_fit(centers, observed, expected) -> Tuple[float, dict]:
    """Slope fit of log(observed/expected) against bin centre.

    Bins with a zero observed or expected count are dropped.  Returns the
    raw estimate ``-slope`` (not clamped) and diagnostics.
    """
    c = np.asarray(centers, dtype=float)
    o = np.asarray(observed, dtype=float)
    x = np.asarray(expected, dtype=float)
    use = (o > 0) & (x > 0)
    if use.sum() < 2:
        raise InsufficientDataError(f"only {int(use.sum())} usable bins")
    y = np.log(o[use] / x[use])
    slope, icept = np.polyfit(c[use], y, 1)
    resid = y - (slope * c[use] + icept)
    return -float(slope), {"bins_used": int(use.sum()), "intercept": float(icept),
                           "rss": float(resid @ resid)}


@lru_cache(maxsize=64)
def _analytic_bin_masses(region: Region, edges: tuple) -> np.ndarray:
    cdf = np.array([line_picking_cdf(region, t) for t in edges])
    return np.diff(cdf)


def loglinear_s(edge_lengths, law_or_pairs: Union[DistanceLaw, Sequence[float], np.ndarray],
                bins: int = DEFAULT_BINS, window: Optional[Window] = None,
                n: Optional[int] = None) -> EstimateResult:
    """Log-linear regression estimate of s.

    ``law_or_pairs`` is either an analytic :class:`DistanceLaw` (expected
    bin counts from the exact line-picking law) or the array of all node-pair
    distances (expected counts from their histogram).
    """
    d = _censor(edge_lengths, window)
    empirical = not isinstance(law_or_pairs, DistanceLaw)
    if empirical:
        pairs = _censor(law_or_pairs, window)
        if pairs.size == 0:
            raise InsufficientDataError("no pair distances")
        d_sup = float(pairs.max())
    else:
        law = law_or_pairs
        if law.kind is not LawKind.ANALYTIC:
            raise ParameterError("log-linear needs an analytic law or pair distances")
        d_sup = law.d_sup
    lo = 0.0 if window is None else window[0]
    hi = d_sup if window is None else min(window[1], d_sup)
    edges = np.linspace(lo, hi, bins + 1)
    observed, _ = np.histogram(d, edges)
    if empirical:
        expected, _ = np.histogram(pairs, edges)
        law = empirical_inverse_cdf(pairs, DEFAULT_GRID)
    else:
        expected = _analytic_bin_masses(law.region, tuple(edges.tolist()))
    centers = (edges[:-1] + edges[1:]) / 2
    raw, diag = loglinear_fit(centers, observed, expected)
    s_hat = max(raw, 0.0)
    method = Method.LOGLINEAR_E if empirical else Method.LOGLINEAR
    diag["raw_s"] = raw
    if n is not None and d.size:
        q_hat = mle_q(s_hat, n, int(d.size), law)
    else:
        q_hat = math.nan
    return EstimateResult(s_hat, q_hat, method, raw < 0, diag)


# ---------------------------------------------------------------------------
# Bernoulli GLM with log link


GLM_GTOL = 1e-8
GLM_MAXITER = 100


def _separated(d_edges, d_non) -> bool:
    return d_edges.size > 0 and d_non.size > 0 and d_edges.max() < d_non.min()


def glm_fit(distances, y, max_iter: int = GLM_MAXITER, gtol: float = GLM_GTOL) -> EstimateResult:
    """Fit log p = b0 + b1 d to 0/1 edge indicators by Newton's method.

    ``distances`` and ``y`` run over every node pair.  Steps are halved to
    keep p <= 1 on the observed distance range (and p < 1 for non-edges)
    and to never decrease the log-likelihood.  Returns q = exp(b0), s = -b1.
    """
    d = np.asarray(distances, dtype=float)
    y = np.asarray(y).astype(bool)
    if d.shape != y.shape:
        raise ParameterError("distances and indicators differ in length")
    e = int(y.sum())
    N = y.size
    if e == 0:
        raise InsufficientDataError("GLM needs at least one edge")
    d1 = d[y]
    d0 = d[~y]
    diag = {"separation": _separated(d1, d0), "iterations": 0, "at_constraint": False}
    if e == N:
        # constant response: likelihood is maximised at p = 1 everywhere
        diag["degenerate"] = "all pairs linked"
        return EstimateResult(0.0, 1.0, Method.GLM, True, diag)

    sum1 = np.array([e, d1.sum()], dtype=float)
    dlo, dhi = float(d.min()), float(d.max())
    d0lo, d0hi = float(d0.min()), float(d0.max())

    def feasible(b):
        return (b[0] + b[1] * dlo <= 0 and b[0] + b[1] * dhi <= 0
                and b[0] + b[1] * d0lo < 0 and b[0] + b[1] * d0hi < 0)

    def loglik(b):
        eta0 = b[0] + b[1] * d0
        return sum1 @ b + float(np.sum(np.log(-np.expm1(eta0))))

    b = np.array([math.log(e / N), 0.0])
    ll = loglik(b)
    gnorm = math.inf
    for it in range(1, max_iter + 1):
        eta0 = b[0] + b[1] * d0
        p0 = np.exp(eta0)
        r = p0 / (-np.expm1(eta0))  # p/(1-p)
        w = r / (-np.expm1(eta0))   # p/(1-p)^2
        grad = sum1 - np.array([r.sum(), r @ d0])
        gnorm = float(np.hypot(*grad))
        diag["iterations"] = it
        if gnorm < gtol:
            break
        A = np.array([[w.sum(), w @ d0], [w @ d0, (w * d0) @ d0]])
        try:
            step = np.linalg.solve(A, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(A, grad, rcond=None)[0]
        t = 1.0
        for _ in range(60):
            bn = b + t * step
            if feasible(bn):
                lln = loglik(bn)
                if lln >= ll - 1e-12 * abs(ll):
                    break
            t *= 0.5
        else:
            diag["at_constraint"] = True
            break
        moved = float(np.max(np.abs(bn - b)))
        b, ll = bn, lln
        if moved <= 1e-13 * (1 + float(np.max(np.abs(b)))):
            diag["at_constraint"] = t < 1.0
            break
    else:
        if not diag["separation"]:
            raise ConvergenceError(
                f"GLM did not converge in {max_iter} iterations (|grad|={gnorm:.3g})",
                {**diag, "beta0": b[0], "beta1": b[1]},
            )
    diag.update({"beta0": float(b[0]), "beta1": float(b[1]), "grad_norm": gnorm,
                 "loglik": ll})
    s_raw = -float(b[1])
    return EstimateResult(max(s_raw, 0.0), math.exp(b[0]), Method.GLM, s_raw < 0, diag)
