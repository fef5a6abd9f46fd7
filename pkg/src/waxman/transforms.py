"""Laplace transform of a distance law, its derivatives, and h(s).

For an analytic law the integrals are evaluated by adaptive quadrature
(``scipy.integrate.quad``) on ``[0, d_sup]``.  For grid and empirical laws
the quantiles sit at uniform probabilities, so the transform is the
probability-space average ``mean(exp(-s t_i))``.

The large-s derivative asymptote ``G'(s) ~ -k C s^(-k-1)`` carries the
dimension ``k`` as prefactor, which is what ``h(s) ~ k/s`` requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ParameterError
from .geometry import QUAD_EPSABS, QUAD_EPSREL, DistanceLaw, LawKind

# scale multiples of 1/s added as quadrature breakpoints
_DECAY_POINTS = (0.5, 2.0, 8.0, 30.0, 100.0)


@dataclass(frozen=True)
class TransformValues:
    s: float
    G: float
    Gp: float
    Gpp: float

    @property
    def h(self) -> float:
        return -self.Gp / self.G


def _check_s(s):
    if not (s >= 0) or not math.isfinite(s):
        raise ParameterError(f"s must be finite and >= 0, got {s}")


def quadrature_points(law: DistanceLaw, s: float):
    pts = set(law.breakpoints)
    if s > 0:
        pts.update(c / s for c in _DECAY_POINTS)
    return sorted(p for p in pts if 0.0 < p < law.d_sup)


def _quad(func, law, s):
    pts = quadrature_points(law, s)
    val, _ = integrate.quad(
        func, 0.0, law.d_sup, points=pts or None,
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400,
    )
    return val


def _scaled_grid_sum(q: np.ndarray, s: float, weights=None):
    """Return (log_scale, mean(w * exp(-s (t - t0)))) for quantiles t."""
    t0 = float(q[0])
    e = np.exp(-s * (q - t0))
    w = e if weights is None else weights * e
    return -s * t0, float(np.mean(w))


def laplace(law: DistanceLaw, s: float, order: int = 0) -> float:
    """Transform of ``(-t)^order g(t)``.

    ``order=0`` gives G(s), ``order=1`` gives G'(s) (<= 0) and ``order=2``
    gives G''(s).  Grid sums whose exponent would underflow return 0.0;
    use :func:`log_laplace` or :func:`mean_link_length` in that regime.
    """
    _check_s(s)
    if order not in (0, 1, 2):
        raise ParameterError("order must be 0, 1 or 2")
    sign = -1.0 if order == 1 else 1.0
    if law.kind is LawKind.ANALYTIC:
        f = law.pdf
        if order == 0:
            if s == 0:
                return 1.0
            return _quad(lambda t: math.exp(-s * t) * f(t), law, s)
        if order == 1:
            return -_quad(lambda t: t * math.exp(-s * t) * f(t), law, s)
        return _quad(lambda t: t * t * math.exp(-s * t) * f(t), law, s)
    q = law.quantiles
    logscale, val = _scaled_grid_sum(q, s, None if order == 0 else q ** order)
    return sign * val * math.exp(logscale) if logscale > -745 else 0.0


def log_laplace(law: DistanceLaw, s: float) -> float:
    """ln G(s), computed without underflow for grid laws."""
    _check_s(s)
    if law.kind is LawKind.ANALYTIC:
        return math.log(laplace(law, s))
    logscale, val = _scaled_grid_sum(law.quantiles, s)
    return logscale + math.log(val)


def transform_values(law: DistanceLaw, s: float) -> TransformValues:
    return TransformValues(s, laplace(law, s, 0), laplace(law, s, 1), laplace(law, s, 2))


def mean_link_length(law: DistanceLaw, s: float) -> float:
    """h(s) = -G'(s)/G(s), the expected length of a link."""
    _check_s(s)
    if law.kind is LawKind.ANALYTIC:
        if s == 0:
            return law.mean
        return -laplace(law, s, 1) / laplace(law, s, 0)
    q = law.quantiles
    e = np.exp(-s * (q - q[0]))
    return float(np.dot(q, e) / np.sum(e))


def link_length_variance(law: DistanceLaw, s: float) -> float:
    """Variance of the link length, (G''G - G'^2)/G^2 = -dh/ds."""
    _check_s(s)
    if law.kind is LawKind.ANALYTIC:
        G = laplace(law, s, 0)
        h = -laplace(law, s, 1) / G
        f = law.pdf
        # central form avoids cancellation between G''G and G'^2
        return _quad(lambda t: (t - h) ** 2 * math.exp(-s * t) * f(t), law, s) / G
    q = law.quantiles
    e = np.exp(-s * (q - q[0]))
    w = e / np.sum(e)
    h = float(np.dot(q, w))
    return float(np.dot((q - h) ** 2, w))


def dh_ds(law: DistanceLaw, s: float) -> float:
    return -link_length_variance(law, s)


def mle_equation(law: DistanceLaw, s: float, d_bar: float) -> float:
    """LT[(d_bar - t) g(t); s], scaled by a positive factor for grid laws.

    The root in ``s`` is the maximum-likelihood estimate.  Only the sign and
    the zero matter to callers, so grid laws are rescaled by exp(s t_0).
    """
    if law.kind is LawKind.ANALYTIC:
        f = law.pdf
        return _quad(lambda t: (d_bar - t) * math.exp(-s * t) * f(t), law, s)
    q = law.quantiles
    return float(np.mean((d_bar - q) * np.exp(-s * (q - q[0]))))


def asymptotic_constant(k: int) -> float:
    """pi^(k/2) Gamma(k+1) / Gamma(k/2+1): the large-s G(s) s^k limit for unit volume."""
    return math.pi ** (k / 2) * math.gamma(k + 1) / math.gamma(k / 2 + 1)


def large_s_asymptotics(k: int, s: float, volume: float = 1.0) -> TransformValues:
    """Leading-order large-s transform values for a k-dimensional region.

    ``volume`` rescales the small-distance density; the classic constants
    assume a unit-measure region such as the unit square.
    """
    if k not in (1, 2, 3):
        raise ParameterError("asymptotics are provided for k in {1, 2, 3}")
    if not s > 0:
        raise ParameterError("asymptotics need s > 0")
    c = asymptotic_constant(k) / volume
    G = c * s ** (-k)
    Gp = -k * c * s ** (-k - 1)
    Gpp = k * (k + 1) * c * s ** (-k - 2)
    return TransformValues(s, G, Gp, Gpp)
