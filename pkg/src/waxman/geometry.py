"""Regions, uniform point sampling, distance metrics and line-picking laws.

A :class:`Region` owns its line-picking density ``g(t)`` (the pdf of the
distance between two independent uniform points).  A :class:`DistanceLaw`
wraps either that analytic density or a set of quantiles of it, and is the
object consumed by :mod:`waxman.transforms`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DataError, ParameterError

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-9


class RegionKind(str, enum.Enum):
    LINE = "line"
    SQUARE = "square"
    RECTANGLE = "rect"
    DISK = "disk"
    SPHERE = "sphere"
    BALL = "ball"
    # sample-only kinds; their laws come from empirical_inverse_cdf
    HYPERCUBE = "hypercube"
    HYPERBALL = "hyperball"


class Metric(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    GREAT_CIRCLE = "great_circle"


ANALYTIC_KINDS = frozenset(
    {RegionKind.LINE, RegionKind.SQUARE, RegionKind.RECTANGLE,
     RegionKind.DISK, RegionKind.SPHERE, RegionKind.BALL}
)


@dataclass(frozen=True)
class Region:
    """A bounded domain with uniform node placement.

    Scale parameters, by kind:

    * ``line``: ``a`` is the segment length
    * ``square``: ``a`` is the side
    * ``rect``: ``a`` x ``b`` side lengths
    * ``disk``, ``ball``, ``hyperball``: ``a`` is the *diameter*
    * ``sphere``: ``a`` is the radius; distances are great-circle by default
    * ``hypercube``: ``a`` is the side, ``dim`` the dimension
    """

    kind: RegionKind
    a: float = 1.0
    b: Optional[float] = None
    dim: Optional[int] = None
    metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "kind", RegionKind(self.kind))
        object.__setattr__(self, "metric", Metric(self.metric))
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ParameterError(f"region scale must be positive, got a={self.a}")
        if self.kind is RegionKind.RECTANGLE:
            if self.b is None or not (self.b > 0 and math.isfinite(self.b)):
                raise ParameterError(f"rectangle needs positive b, got b={self.b}")
        if self.kind in (RegionKind.HYPERCUBE, RegionKind.HYPERBALL):
            if self.dim is None or self.dim < 1:
                raise ParameterError("hypercube/hyperball need dim >= 1")
        if self.metric is Metric.GREAT_CIRCLE and self.kind is not RegionKind.SPHERE:
            raise ParameterError("great-circle metric only applies to a sphere")

    # convenience constructors
    @classmethod
    def line(cls, length: float = 1.0) -> "Region":
        return cls(RegionKind.LINE, length)

    @classmethod
    def square(cls, side: float = 1.0) -> "Region":
        return cls(RegionKind.SQUARE, side)

    @classmethod
    def rectangle(cls, a: float, b: float) -> "Region":
        return cls(RegionKind.RECTANGLE, a, b)

    @classmethod
    def disk(cls, diameter: float = 1.0) -> "Region":
        return cls(RegionKind.DISK, diameter)

    @classmethod
    def sphere(cls, radius: float = 1.0, metric: Metric = Metric.GREAT_CIRCLE) -> "Region":
        return cls(RegionKind.SPHERE, radius, metric=metric)

    @classmethod
    def ball(cls, diameter: float = 1.0) -> "Region":
        return cls(RegionKind.BALL, diameter)

    @classmethod
    def hypercube(cls, dim: int, side: float = 1.0) -> "Region":
        return cls(RegionKind.HYPERCUBE, side, dim=dim)

    @classmethod
    def hyperball(cls, dim: int, diameter: float = 1.0) -> "Region":
        return cls(RegionKind.HYPERBALL, diameter, dim=dim)

    def scaled(self, c: float) -> "Region":
        b = None if self.b is None else self.b * c
        return Region(self.kind, self.a * c, b, self.dim, self.metric)

    @property
    def dimension(self) -> int:
        """Dimension k of the point set (2 for a sphere surface)."""
        return {
            RegionKind.LINE: 1, RegionKind.SQUARE: 2, RegionKind.RECTANGLE: 2,
            RegionKind.DISK: 2, RegionKind.SPHERE: 2, RegionKind.BALL: 3,
        }.get(self.kind, self.dim)

    @property
    def ambient_dimension(self) -> int:
        if self.kind is RegionKind.SPHERE:
            return 3
        return self.dimension

    @property
    def volume(self) -> float:
        """Length, area or volume of the region (the measure nodes are uniform on)."""
        a = self.a
        k = self.kind
        if k is RegionKind.LINE:
            return a
        if k is RegionKind.SQUARE:
            return a * a
        if k is RegionKind.RECTANGLE:
            return a * self.b
        if k is RegionKind.DISK:
            return math.pi * a * a / 4
        if k is RegionKind.SPHERE:
            return 4 * math.pi * a * a
        if k is RegionKind.BALL:
            return math.pi * a ** 3 / 6
        if k is RegionKind.HYPERCUBE:
            return a ** self.dim
        r = a / 2
        return math.pi ** (self.dim / 2) / math.gamma(self.dim / 2 + 1) * r ** self.dim

    @property
    def max_distance(self) -> float:
        """Largest possible distance between two points of the region."""
        a = self.a
        k = self.kind
        if k in (RegionKind.LINE, RegionKind.DISK, RegionKind.BALL, RegionKind.HYPERBALL):
            return a
        if k is RegionKind.SQUARE:
            return a * math.sqrt(2)
        if k is RegionKind.RECTANGLE:
            return math.hypot(a, self.b)
        if k is RegionKind.SPHERE:
            return math.pi * a if self.metric is Metric.GREAT_CIRCLE else 2 * a
        return a * math.sqrt(self.dim)

    @property
    def breakpoints(self) -> tuple:
        """Interior points where g(t) is not smooth."""
        if self.kind is RegionKind.SQUARE:
            return (self.a,)
        if self.kind is RegionKind.RECTANGLE:
            lo, hi = sorted((self.a, self.b))
            return tuple(sorted({lo, hi}))
        return ()

    def describe(self) -> dict:
        d = {"kind": self.kind.value, "a": self.a}
        if self.b is not None:
            d["b"] = self.b
        if self.dim is not None:
            d["dim"] = self.dim
        if self.kind is RegionKind.SPHERE:
            d["metric"] = self.metric.value
        if self.kind in (RegionKind.DISK, RegionKind.BALL, RegionKind.HYPERBALL):
            d["a_is"] = "diameter"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Region":
        return cls(
            RegionKind(d["kind"]), float(d["a"]),
            None if d.get("b") is None else float(d["b"]),
            None if d.get("dim") is None else int(d["dim"]),
            Metric(d.get("metric", "great_circle" if d["kind"] == "sphere" else "euclidean")),
        )


# ---------------------------------------------------------------------------
# sampling and distances


def sample_points(region: Region, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` i.i.d. uniform points; returns an ``(n, ambient_dim)`` array.

    ``seed`` may be an int, a :class:`numpy.random.SeedSequence` or a
    :class:`numpy.random.Generator`.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2 points, got {n}")
    rng = np.random.default_rng(seed)
    k = region.kind
    a = region.a
    if k is RegionKind.LINE:
        return rng.uniform(0.0, a, size=(n, 1))
    if k is RegionKind.SQUARE:
        return rng.uniform(0.0, a, size=(n, 2))
    if k is RegionKind.RECTANGLE:
        return rng.uniform(0.0, 1.0, size=(n, 2)) * np.array([a, region.b])
    if k is RegionKind.HYPERCUBE:
        return rng.uniform(0.0, a, size=(n, region.dim))
    if k is RegionKind.SPHERE:
        x = rng.standard_normal((n, 3))
        return a * x / np.linalg.norm(x, axis=1, keepdims=True)
    # disk, ball, hyperball: uniform direction times radius ~ U^(1/d)
    d = region.dimension
    x = rng.standard_normal((n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    r = (a / 2) * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / d)
    return x * r


def pair_distance(a, b, metric: Metric = Metric.EUCLIDEAN, radius: float = 1.0):
    """Distance between points ``a`` and ``b`` (broadcasts over leading axes).

    For the great-circle metric the points must lie on a sphere of the given
    ``radius`` centred at the origin.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ParameterError("points live in different ambient spaces")
    metric = Metric(metric)
    if metric is Metric.EUCLIDEAN:
        return np.sqrt(np.sum((a - b) ** 2, axis=-1))
    if a.shape[-1] != 3:
        raise ParameterError("great-circle distance needs 3-D points on a sphere")
    # atan2 form is accurate for both tiny and antipodal separations
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return radius * np.arctan2(cross, dot)


def region_distance(region: Region, a, b):
    return pair_distance(a, b, region.metric, region.a)


def all_pair_distances(region: Region, points: np.ndarray) -> np.ndarray:
    """Condensed vector of the n(n-1)/2 pairwise distances (i<j, row-major)."""
    n = len(points)
    i, j = np.triu_indices(n, k=1)
    return region_distance(region, points[i], points[j])


def sample_pair_distances(region: Region, npairs: int, seed=None) -> np.ndarray:
    """Distances of ``npairs`` independent point pairs (not sharing nodes)."""
    rng = np.random.default_rng(seed)
    p = sample_points(region, max(npairs, 2), rng)[:npairs]
    q = sample_points(region, max(npairs, 2), rng)[:npairs]
    return region_distance(region, p, q)


# ---------------------------------------------------------------------------
# line-picking densities (scalar; the quadrature hot path calls these)


def _pdf_line(t, L):
    return 2.0 * (L - t) / (L * L)


def _pdf_rect(t, a, b):
    # polar integral of the product of the two coordinate-difference
    # densities 2(a-x)/a^2 and 2(b-y)/b^2 over the feasible angles
    th1 = 0.0 if t <= a else math.acos(a / t)
    th2 = math.pi / 2 if t <= b else math.asin(b / t)
    if th1 >= th2:
        return 0.0

    def prim(th):
        return (a * b * th + a * t * math.cos(th) - b * t * math.sin(th)
                + 0.5 * t * t * math.sin(th) ** 2)

    return 4.0 * t * (prim(th2) - prim(th1)) / (a * a * b * b)


def _pdf_disk(t, D):
    R = D / 2
    x = t / (2 * R)
    return 4.0 * t / (math.pi * R * R) * (math.acos(x) - x * math.sqrt(1.0 - x * x))


def _pdf_sphere_chord(t, R):
    return t / (2 * R * R)


def _pdf_sphere_arc(t, R):
    return math.sin(t / R) / (2 * R)


def _pdf_ball(t, D):
    R = D / 2
    x = t / R
    return (3 * x * x - 2.25 * x ** 3 + 0.1875 * x ** 5) / R


def _scalar_pdf(region: Region) -> Callable[[float], float]:
    k = region.kind
    a = region.a
    dmax = region.max_distance
    if k is RegionKind.LINE:
        base = lambda t: _pdf_line(t, a)
    elif k is RegionKind.SQUARE:
        base = lambda t: _pdf_rect(t, a, a)
    elif k is RegionKind.RECTANGLE:
        b = region.b
        base = lambda t: _pdf_rect(t, a, b)
    elif k is RegionKind.DISK:
        base = lambda t: _pdf_disk(t, a)
    elif k is RegionKind.SPHERE:
        if region.metric is Metric.GREAT_CIRCLE:
            base = lambda t: _pdf_sphere_arc(t, a)
        else:
            base = lambda t: _pdf_sphere_chord(t, a)
    elif k is RegionKind.BALL:
        base = lambda t: _pdf_ball(t, a)
    else:
        raise ParameterError(
            f"no analytic line-picking law for {k.value}; build an empirical law"
        )

    def pdf(t: float) -> float:
        if t < 0.0 or t > dmax:
            return 0.0
        return base(t)

    return pdf


def line_picking_pdf(region: Region, t):
    """Density of the distance between two uniform points of ``region``."""
    f = _scalar_pdf(region)
    if np.ndim(t) == 0:
        t = float(t)
        if t < 0:
            raise ParameterError("distance must be non-negative")
        return f(t)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("distance must be non-negative")
    return np.fromiter((f(x) for x in t.ravel()), float, t.size).reshape(t.shape)


def _quad(func, lo, hi, points=()):
    pts = [p for p in points if lo < p < hi]
    val, _ = integrate.quad(
        func, lo, hi, points=pts or None, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
    )
    return val


def line_picking_cdf(region: Region, t: float) -> float:
    f = _scalar_pdf(region)
    t = min(max(float(t), 0.0), region.max_distance)
    return _quad(f, 0.0, t, region.breakpoints)


def line_picking_moments(region: Region) -> tuple:
    """(mean, second moment) of the line-picking distance."""
    f = _scalar_pdf(region)
    L = region.max_distance
    m1 = _quad(lambda t: t * f(t), 0.0, L, region.breakpoints)
    m2 = _quad(lambda t: t * t * f(t), 0.0, L, region.breakpoints)
    return m1, m2


# ---------------------------------------------------------------------------
# distance laws


class LawKind(str, enum.Enum):
    ANALYTIC = "analytic"
    GRID = "grid"
    EMPIRICAL = "empirical"


@dataclass(frozen=True, eq=False)
class DistanceLaw:
    """A representation of the distance density consumed by the transforms.

    Analytic laws carry the region and integrate its density by adaptive
    quadrature; grid and empirical laws carry ``m`` quantiles at the
    probabilities ``(i + 0.5)/m``.
    """

    kind: LawKind
    d_sup: float
    region: Optional[Region] = None
    quantiles: Optional[np.ndarray] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.quantiles is not None:
            q = np.asarray(self.quantiles, dtype=float)
            q.setflags(write=False)
            object.__setattr__(self, "quantiles", q)

    @classmethod
    def analytic(cls, region: Region) -> "DistanceLaw":
        _scalar_pdf(region)  # validates the kind
        return cls(LawKind.ANALYTIC, region.max_distance, region,
                   label=f"analytic:{region.kind.value}")

    @cached_property
    def pdf(self) -> Callable[[float], float]:
        if self.kind is not LawKind.ANALYTIC:
            raise ParameterError("only analytic laws have a pointwise density")
        return _scalar_pdf(self.region)

    @property
    def breakpoints(self) -> tuple:
        return self.region.breakpoints if self.region is not None else ()

    @property
    def m(self) -> int:
        return 0 if self.quantiles is None else len(self.quantiles)

    @cached_property
    def mean(self) -> float:
        if self.kind is LawKind.ANALYTIC:
            return line_picking_moments(self.region)[0]
        return float(np.mean(self.quantiles))

    def quantile_probabilities(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) / self.m


def empirical_inverse_cdf(distances: Sequence[float], m: int = 1000,
                          d_sup: Optional[float] = None) -> DistanceLaw:
    """Quantiles of a distance sample at probabilities ``(i + 0.5)/m``.

    Uses linear interpolation of the sorted sample with the midpoint (Hazen)
    plotting positions, so a sorted sample of size ``m`` maps to itself.
    """
    x = np.asarray(distances, dtype=float).ravel()
    if x.size == 0:
        raise DataError("cannot build an inverse CDF from an empty sample")
    if m < 2:
        raise ParameterError("need m >= 2 quantiles")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DataError("distances must be finite and non-negative")
    p = (np.arange(m) + 0.5) / m
    q = np.quantile(x, p, method="hazen")
    q = np.maximum.accumulate(q)
    sup = float(x.max()) if d_sup is None else float(d_sup)
    return DistanceLaw(LawKind.EMPIRICAL, sup, None, q, label=f"empirical:m={m}")


_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _cdf_table(region: Region, nodes: int = 2048):
    """CDF at a dense node grid; each cell integrated with 20-point Gauss-Legendre."""
    L = region.max_distance
    t = np.unique(np.concatenate([np.linspace(0.0, L, nodes + 1), region.breakpoints]))
    f = np.vectorize(_scalar_pdf(region), otypes=[float])
    lo, hi = t[:-1], t[1:]
    half = (hi - lo) / 2
    xs = (lo + hi)[:, None] / 2 + half[:, None] * _GL_X[None, :]
    cell = half * (f(xs) @ _GL_W)
    return t, np.concatenate([[0.0], np.cumsum(cell)]), f


def analytic_inverse_cdf(region: Region, m: int = 1000) -> DistanceLaw:
    """Grid law from the exact quantiles of the region's distance law."""
    if m < 2:
        raise ParameterError("need m >= 2 quantiles")
    t, C, f = _cdf_table(region)
    total = C[-1]
    p = (np.arange(m) + 0.5) / m * total
    idx = np.clip(np.searchsorted(C, p, side="right") - 1, 0, len(t) - 2)
    lo, hi = t[idx], t[idx + 1]
    c_lo = C[idx]
    # start from linear interpolation, then safeguarded Newton on the cell
    x = lo + (hi - lo) * np.clip((p - c_lo) / np.maximum(C[idx + 1] - c_lo, 1e-300), 0, 1)
    a, b = lo.copy(), hi.copy()
    for _ in range(40):
        half = (x - lo) / 2
        xs = (lo + x)[:, None] / 2 + half[:, None] * _GL_X[None, :]
        F = c_lo + half * (f(xs) @ _GL_W) - p
        a = np.where(F < 0, x, a)
        b = np.where(F >= 0, x, b)
        g = f(x)
        step = np.where(g > 0, F / np.where(g > 0, g, 1.0), 0.0)
        xn = x - step
        bad = (xn <= a) | (xn >= b) | (g <= 0)
        xn = np.where(bad, (a + b) / 2, xn)
        if np.max(np.abs(xn - x)) < 1e-15 * region.max_distance:
            x = xn
            break
        x = xn
    q = np.maximum.accumulate(np.clip(x, 0.0, region.max_distance))
    return DistanceLaw(LawKind.GRID, region.max_distance, region, q,
                       label=f"grid:{region.kind.value}:m={m}")
