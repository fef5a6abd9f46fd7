"""Fisher information, Cramer-Rao bounds, KL divergence and model moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import ParameterError
from .geometry import QUAD_EPSABS, QUAD_EPSREL, DistanceLaw, LawKind
from .transforms import (
    quadrature_points,
    asymptotic_constant,
    laplace,
    link_length_variance,
    log_laplace,
    mean_link_length,
)


@dataclass(frozen=True)
class FisherReport:
    n: int
    q: float
    s: float
    info: float
    law: str

    @property
    def cr_sd(self) -> float:
        """Cramer-Rao bound on the standard deviation of an unbiased s estimate."""
        return 1.0 / math.sqrt(self.info) if self.info > 0 else math.inf

    @property
    def cr_var(self) -> float:
        return 1.0 / self.info if self.info > 0 else math.inf


def _check(q, s):
    if not (0 < q <= 1):
        raise ParameterError(f"q must lie in (0, 1], got {q}")
    if not s >= 0:
        raise ParameterError(f"s must be >= 0, got {s}")


def fisher_information(n: int, q: float, s: float, law: DistanceLaw) -> FisherReport:
    """Information about s carried by one graph.

    The expected edge count n(n-1)qG/2 times the link-length variance
    (G''G - G'^2)/G^2.
    """
    _check(q, s)
    e_bar = n * (n - 1) * q * laplace(law, s) / 2
    info = e_bar * link_length_variance(law, s)
    return FisherReport(n, q, s, info, law.label)


def cr_bound_for_degree(n: int, k_bar: float, s: float, law: DistanceLaw) -> float:
    """CR standard deviation at fixed mean degree: 1/sqrt(n k_bar Var_f / 2)."""
    return 1.0 / math.sqrt(n * k_bar / 2 * link_length_variance(law, s))


def model_moments(n: int, q: float, s: float, law: DistanceLaw):
    """(mean degree, mean edge count, mean edge length)."""
    _check(q, s)
    G = laplace(law, s)
    k_bar = (n - 1) * q * G
    e_bar = n * k_bar / 2
    return k_bar, e_bar, mean_link_length(law, s)


def kld_from_ger(s: float, law: DistanceLaw) -> float:
    """KL divergence of the link-length law at s from the s = 0 law.

    Evaluated as ``s * mean + ln G(s)``.
    """
    if not s >= 0:
        raise ParameterError(f"s must be >= 0, got {s}")
    if s == 0:
        return 0.0
    return s * law.mean + log_laplace(law, s)


def kld_direct(s: float, law: DistanceLaw) -> float:
    """Brute-force integral of g ln(g/f); only for checking :func:`kld_from_ger`."""
    if law.kind is not LawKind.ANALYTIC:
        raise ParameterError("direct KLD needs an analytic law")
    g = law.pdf
    G = laplace(law, s)

    def integrand(t):
        gt = g(t)
        if gt <= 0:
            return 0.0
        ft = gt * math.exp(-s * t) / G
        return gt * (math.log(gt) - math.log(ft))

    val, _ = integrate.quad(integrand, 0.0, law.d_sup, points=quadrature_points(law, s) or None,
                            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
    return val


def kld_large_s(s: float, law: DistanceLaw, k: int, volume: float = 1.0) -> float:
    """Leading large-s behaviour ``s * mean + c(k) - k ln s``.

    Here ``c(k) = ln(pi^(k/2) Gamma(k+1) / Gamma(k/2+1) / volume)``.
    """
    return s * law.mean + math.log(asymptotic_constant(k) / volume) - k * math.log(s)


def crbound_table(n: int, s_grid, law: DistanceLaw, q: float = None, k_bar: float = None):
    """Rows of (s, q, info, cr_sd) over an s grid; q is fixed or set from k_bar.

    Grid points where the requested degree would need q > 1 are skipped.
    """
    if (q is None) == (k_bar is None):
        raise ParameterError("give exactly one of q or k_bar")
    rows = []
    for s in s_grid:
        qq = q if q is not None else k_bar / ((n - 1) * laplace(law, s))
        if not (0 < qq <= 1):
            continue
        rep = fisher_information(n, qq, s, law)
        rows.append((float(s), qq, rep.info, rep.cr_sd))
    return rows

