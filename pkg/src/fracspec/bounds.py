"""Weyl asymptotics and the Polya / Berezin-Li-Yau type inequalities.

All formulas depend on the domain only through its volume, so they take a
:class:`DomainSpec` rather than a geometry; a cube caller passes ``L**d``.
``scan_bounds`` checks the inequalities against the exact cube spectrum.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._report import VIOLATION_RTOL, BoundReport
from .errors import DomainError
from .spectrum import CSV_VERSION, SpectralParams, counting_function, enumerate_smallest
from .specfun import check_dimension, check_order, sphere_volume

__all__ = [
    "DomainSpec",
    "BoundReport",
    "weyl_constant",
    "weyl_counting_estimate",
    "asymptotic_eigenvalue",
    "asymptotic_sum",
    "polya_lower_bound",
    "bly_sum_lower_bound",
    "counting_upper_bound",
    "counting_upper_bound_euclidean",
    "li_yau_sum_lower_bound",
    "scan_bounds",
    "write_scan_csv",
]


@dataclass(frozen=True)
class DomainSpec:
    volume: float
    d: int
    tiling: bool = True

    def __post_init__(self):
        object.__setattr__(self, "d", check_dimension(self.d))
        v = float(self.volume)
        if not math.isfinite(v) or v <= 0:
            raise DomainError(f"volume must be positive, got {self.volume!r}")
        object.__setattr__(self, "volume", v)

    @classmethod
    def cube(cls, L: float, d: int) -> "DomainSpec":
        return cls(float(L) ** d, d, True)

    @classmethod
    def from_params(cls, params: SpectralParams) -> "DomainSpec":
        return cls(params.volume, params.d, True)

    def scaled(self, lam: float) -> "DomainSpec":
        """The subdomain with ``|Omega'| = lam^d |Omega|``."""
        lam = float(lam)
        if not 0.0 < lam <= 1.0:
            raise DomainError(f"scale factor must lie in (0, 1], got {lam!r}")
        return DomainSpec(self.volume * lam ** self.d, self.d, self.tiling)

    @staticmethod
    def eigenvalue_factor(lam: float, s: float) -> float:
        """``E_n(Omega) = lam^(2s) E_n(Omega')`` for the scaled subdomain."""
        return float(lam) ** (2.0 * s)


def _nonneg(name, x):
    x = float(x)
    if math.isnan(x) or x < 0:
        raise DomainError(f"{name} must be >= 0, got {x!r}")
    return x


def weyl_constant(dom: DomainSpec, s: float) -> float:
    """Coefficient ``C`` in ``N(E) ~ C E^(d/2s)``."""
    s = check_order(s)
    return dom.volume * sphere_volume(dom.d, s) / (dom.d * (2 * math.pi) ** dom.d)


def weyl_counting_estimate(dom: DomainSpec, s: float, E: float) -> float:
    E = _nonneg("E", E)
    return weyl_constant(dom, s) * E ** (0.5 * dom.d / s)


def _eigen_scale(dom, s):
    # (2 pi)^(2s) (d / (|A| |Omega|))^(2s/d)
    s = check_order(s)
    d = dom.d
    return (2 * math.pi) ** (2 * s) * (d / (sphere_volume(d, s) * dom.volume)) ** (2 * s / d)


def _positive_count(name, n, allow_zero=False):
    n = float(n)
    if math.isnan(n) or n < 0 or (n < 1 and not allow_zero):
        raise DomainError(f"{name} must be >= 1, got {n!r}")
    return n


def asymptotic_eigenvalue(dom: DomainSpec, s: float, n) -> float:
    """Leading-order ``E_n``, the inverse of :func:`weyl_counting_estimate`."""
    n = _positive_count("n", n)
    return _eigen_scale(dom, s) * n ** (2 * s / dom.d)


def asymptotic_sum(dom: DomainSpec, s: float, N, allow_zero: bool = False) -> float:
    """Leading-order ``S(N)``: ``(2pi)^2s d/(d+2s) (d/(|A||Omega|))^(2s/d) N^(1+2s/d)``."""
    N = _positive_count("N", N, allow_zero)
    d = dom.d
    return _eigen_scale(dom, s) * d / (d + 2 * s) * N ** (1 + 2 * s / d)


def polya_lower_bound(dom: DomainSpec, s: float, n) -> float:
    """Lower bound on ``E_n`` for tiling domains."""
    if not dom.tiling:
        raise DomainError("the per-eigenvalue Polya bound needs a tiling domain")
    return asymptotic_eigenvalue(dom, s, n)


def bly_sum_lower_bound(dom: DomainSpec, s: float, N) -> float:
    """Lower bound on ``S(N)`` for any bounded domain of the given volume."""
    return asymptotic_sum(dom, s, N)


def counting_upper_bound(dom: DomainSpec, s: float, z: float) -> float:
    """``N(z) <= (2pi)^-d ((d+2s)/d)^(d/2s) |A||Omega|/d z^(d/2s)``."""
    z = _nonneg("z", z)
    a = 0.5 * dom.d / check_order(s)
    return ((dom.d + 2 * s) / dom.d) ** a * weyl_counting_estimate(dom, s, z)


def counting_upper_bound_euclidean(dom: DomainSpec, z: float) -> float:
    """The ``s = 1`` counting bound in its Euclidean gamma form."""
    z = _nonneg("z", z)
    d = dom.d
    return ((4 * math.pi) ** (-0.5 * d) * ((d + 2) / d) ** (0.5 * d) * dom.volume
            / math.gamma(1 + 0.5 * d) * z ** (0.5 * d))


def li_yau_sum_lower_bound(dom: DomainSpec, N) -> float:
    """``d/(d+2) 4 pi^2 / (|B_d||Omega|)^(2/d) N^(1+2/d)`` with the Euclidean ball volume."""
    N = _positive_count("N", N)
    d = dom.d
    ball = 2 * math.pi ** (0.5 * d) / (d * math.gamma(0.5 * d))
    return d / (d + 2) * 4 * math.pi ** 2 / (ball * dom.volume) ** (2 / d) * N ** (1 + 2 / d)


def scan_bounds(params: SpectralParams, n_max: int, E_grid=(), rtol: float = VIOLATION_RTOL):
    """Compare the exact cube spectrum against every bound.

    Emits one Polya report per ``n <= n_max``, one sum report per ``N <= n_max``
    and, for each ``E`` in ``E_grid``, a counting-upper-bound report and a
    Weyl report (``N(E) <= Weyl(E)`` holds on cubes).
    """
    dom = DomainSpec.from_params(params)
    s = params.s
    tag = f"d={params.d};s={s:g};L={params.L:g}"
    reports = []
    n_max = int(n_max)
    if n_max > 0:
        vals = enumerate_smallest(params, n_max).values
        n = np.arange(1, n_max + 1, dtype=float)
        polya = _eigen_scale(dom, s) * n ** (2 * s / dom.d)
        sums = np.cumsum(vals)
        bly = polya * n * dom.d / (dom.d + 2 * s)
        for i in range(n_max):
            reports.append(BoundReport.compare("polya", vals[i], polya[i], "ge",
                                               f"{tag};n={i + 1}", rtol))
        for i in range(n_max):
            reports.append(BoundReport.compare("bly_sum", sums[i], bly[i], "ge",
                                               f"{tag};N={i + 1}", rtol))
    for E in E_grid:
        N = counting_function(params, E)
        reports.append(BoundReport.compare("counting_upper", N, counting_upper_bound(dom, s, E),
                                           "le", f"{tag};E={E:.12g}", rtol))
        reports.append(BoundReport.compare("weyl_ratio", N, weyl_counting_estimate(dom, s, E),
                                           "le", f"{tag};E={E:.12g}", rtol))
    return reports


def write_scan_csv(reports, fh) -> None:
    fh.write(f"# {CSV_VERSION} bounds-scan\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["quantity", "param_point", "exact", "bound", "margin", "satisfied"])
    for r in reports:
        w.writerow([r.quantity, r.param_point, repr(r.exact), repr(r.bound), repr(r.margin),
                    int(r.satisfied)])
