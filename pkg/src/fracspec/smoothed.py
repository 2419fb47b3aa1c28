"""Riesz means and the heat trace of the cube spectrum.

Exact values come either from a materialised :class:`SpectrumSlice` or, for
large cutoffs, straight from the lattice kernel given :class:`SpectralParams`.
The heat trace is always truncated with a certified tail: the counting bound
``N(z) <= C z^(d/2s)`` integrated against ``e^(-zt)`` gives

    sum_{E_j > X} e^(-E_j t) <= C t^(-d/2s) Gamma(1 + d/2s, X t).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

from .bounds import DomainSpec, counting_upper_bound, weyl_counting_estimate
from .errors import ConvergenceError, DomainError, IncompleteSpectrumError
from .spectrum import (
    BOUNDARY_RTOL,
    CSV_VERSION,
    SpectralParams,
    SpectrumSlice,
    counting_function,
    lattice_sum,
)
from .specfun import beta, check_order, riesz_classical_constant

__all__ = [
    "RieszQuery",
    "HeatQuery",
    "riesz_mean",
    "riesz_asymptote",
    "riesz_upper_bound",
    "partition_function",
    "heat_trace",
    "heat_tail_bound",
    "separable_partition_function",
    "heat_asymptote",
    "heat_upper_bound",
    "riesz_iteration_check",
    "laplace_identity_check",
    "heat_table",
    "riesz_table",
    "write_table_csv",
]


@dataclass(frozen=True)
class RieszQuery:
    rho: float
    E: float

    def __post_init__(self):
        rho, E = float(self.rho), float(self.E)
        if not math.isfinite(rho) or rho < 0:
            raise DomainError(f"Riesz order rho must be >= 0, got {self.rho!r}")
        if not math.isfinite(E) or E <= 0:
            raise DomainError(f"Riesz cutoff E must be > 0, got {self.E!r}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "E", E)


@dataclass(frozen=True)
class HeatQuery:
    """Heat-trace query at time ``t``.

    ``tol`` is the absolute tolerance on the dropped tail.  ``cutoff`` fixes
    the truncation energy instead of choosing it from ``tol``.
    """

    t: float
    tol: float = 1e-10
    cutoff: float | None = None

    def __post_init__(self):
        t = float(self.t)
        if not math.isfinite(t) or t <= 0:
            raise DomainError(f"t must be > 0, got {self.t!r}")
        object.__setattr__(self, "t", t)
        if not self.tol > 0:
            raise DomainError("tail tolerance must be positive")


def _threshold(E, inclusive):
    slack = BOUNDARY_RTOL * max(1.0, abs(E))
    return E + slack if inclusive else E - slack


def _require_complete(spec: SpectrumSlice, E: float):
    if spec.cutoff < E:
        raise IncompleteSpectrumError(
            f"spectrum is complete only up to {spec.cutoff:g}, need {E:g}")


# ---------------------------------------------------------------------------
# Riesz means


def riesz_mean(spec, q: RieszQuery, inclusive: bool = False, workers=None) -> float:
    """``R_rho(E) = sum_j (E - E_j)_+^rho``.

    For ``rho = 0`` the sum counts ``E_j < E`` (the default) or ``E_j <= E``
    with ``inclusive=True``; both agree with :func:`counting_function` run
    with the matching ``inclusive`` setting.
    """
    E, rho = q.E, q.rho
    if isinstance(spec, SpectralParams):
        if rho == 0.0:
            return float(counting_function(replace(spec, inclusive=inclusive), E, workers))
        return lattice_sum(spec, E, lambda v: np.maximum(E - v, 0.0) ** rho, workers)
    _require_complete(spec, E if inclusive or rho > 0 else math.nextafter(E, 0.0))
    v = spec.values
    if rho == 0.0:
        return float(np.count_nonzero(v <= _threshold(E, inclusive)))
    below = v[v < E]
    return float(np.sum((E - below) ** rho))


def riesz_asymptote(dom: DomainSpec, s: float, q: RieszQuery) -> float:
    """``L^cl_rho |Omega| E^(rho + d/2s)``."""
    s = check_order(s)
    return riesz_classical_constant(q.rho, dom.d, s) * dom.volume * q.E ** (q.rho + 0.5 * dom.d / s)


def riesz_upper_bound(dom: DomainSpec, s: float, q: RieszQuery) -> float:
    """Upper bound on ``R_rho(E)`` for ``rho > 1``."""
    if not q.rho > 1.0:
        raise DomainError(f"the Riesz upper bound needs rho > 1, got {q.rho:g}")
    s = check_order(s)
    a = 0.5 * dom.d / s
    c = counting_upper_bound(dom, s, 1.0)
    return c * q.rho * beta(q.rho, 1.0 + a) * q.E ** (q.rho + a)


# ---------------------------------------------------------------------------
# heat trace


def heat_tail_bound(dom: DomainSpec, s: float, t: float, X: float) -> float:
    """Upper bound on ``sum_{E_j > X} exp(-E_j t)``."""
    s = check_order(s)
    a = 0.5 * dom.d / s
    c = counting_upper_bound(dom, s, 1.0)
    log_tail = math.log(max(special.gammaincc(a + 1.0, X * t), 1e-320)) + math.lgamma(a + 1.0)
    return c * t ** (-a) * math.exp(log_tail)


def _heat_cutoff(dom, s, t, tol):
    a = 0.5 * dom.d / s
    X = (a + 1.0) / t
    while heat_tail_bound(dom, s, t, X) > tol:
        X *= 1.5
    lo, hi = X / 1.5, X
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if heat_tail_bound(dom, s, t, mid) > tol:
            lo = mid
        else:
            hi = mid
    return hi


def heat_trace(spec, q: HeatQuery, workers=None):
    """Return ``(Z, tail_bound, cutoff)`` for the truncated heat trace."""
    t = q.t
    if isinstance(spec, SpectralParams):
        dom = DomainSpec.from_params(spec)
        X = q.cutoff if q.cutoff is not None else _heat_cutoff(dom, spec.s, t, q.tol)
        tail = heat_tail_bound(dom, spec.s, t, X)
        if tail > q.tol:
            raise ConvergenceError(f"tail bound {tail:.3g} at cutoff {X:g} exceeds {q.tol:g}")
        Z = lattice_sum(spec, X, lambda v: np.exp(-t * v), workers)
        return Z, tail, X
    Z = math.fsum(np.exp(-t * spec.values).tolist())
    if math.isinf(spec.cutoff):
        return Z, 0.0, spec.cutoff
    if spec.params is None:
        raise ConvergenceError("cannot bound the tail of a truncated spectrum without params")
    tail = heat_tail_bound(DomainSpec.from_params(spec.params), spec.params.s, t, spec.cutoff)
    if tail > q.tol:
        raise ConvergenceError(
            f"t={t:g} too small for a spectrum cut at {spec.cutoff:g}: tail bound {tail:.3g}")
    return Z, tail, spec.cutoff


def partition_function(spec, q: HeatQuery, workers=None) -> float:
    """``Z(t) = sum_j exp(-E_j t)`` with the tail certified below ``q.tol``."""
    return heat_trace(spec, q, workers)[0]


def separable_partition_function(params: SpectralParams, t: float, tol: float = 1e-14) -> float:
    """``Z(t)`` via the one-dimensional trace raised to the power ``d``.

    The eigenvalues are sums of independent one-dimensional levels, so
    ``Z_d = Z_1^d`` for every order ``s``.
    """
    if params.include_zero:
        raise DomainError("the product form needs all index components >= 1")
    t = float(t)
    u = params.level_unit
    # f(n) = exp(-t u n^(2s)) is decreasing; tail after M is <= int_M^inf f
    M = 1
    while True:
        n = np.arange(1, M + 1, dtype=float)
        terms = np.exp(-t * u * n ** (2 * params.s))
        x0 = (t * u) ** (0.5 / params.s) * M
        p = 0.5 / params.s
        tail = p * (t * u) ** (-p) * special.gammaincc(p, x0 ** (2 * params.s)) * math.gamma(p)
        if tail < tol * max(terms.sum(), 1e-300):
            break
        M *= 2
    z1 = math.fsum(terms.tolist())
    return z1 ** params.d


def heat_asymptote(dom: DomainSpec, s: float, t: float) -> float:
    """``(2pi)^-d |Omega| (2 Gamma(1+1/2s))^d t^(-d/2s)``."""
    s = check_order(s)
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    d = dom.d
    return dom.volume * (2 * math.gamma(1 + 0.5 / s) / (2 * math.pi)) ** d * t ** (-0.5 * d / s)


def heat_upper_bound(dom: DomainSpec, s: float, t: float) -> float:
    s = check_order(s)
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    a = 0.5 * dom.d / s
    return counting_upper_bound(dom, s, 1.0) * math.gamma(1 + a) * t ** (-a)


# ---------------------------------------------------------------------------
# quadrature identities


def _quad(f, a, b, **kw):
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400, **kw)
    return val, err


def _riesz_at(values, rho):
    def R(t):
        below = values[values < t]
        if rho == 0.0:
            return float(below.size)
        return float(np.sum((t - below) ** rho))
    return R


def riesz_iteration_check(spec: SpectrumSlice, rho: float, delta: float, E: float,
                          return_values: bool = False):
    """Relative gap between ``R_{rho+delta}(E)`` summed exactly and obtained from
    ``R_rho`` by the Riemann-Liouville integral.

    The integral ``int_0^E (E-t)^(delta-1) R_rho(t) dt`` is taken in the
    variable ``u = (E-t)^delta`` so the endpoint weight disappears, and is
    split at every eigenvalue where ``R_rho`` has a kink.
    """
    rho, delta, E = float(rho), float(delta), float(E)
    if rho < 0 or not delta > 0 or not E > 0:
        raise DomainError("need rho >= 0, delta > 0 and E > 0")
    _require_complete(spec, E)
    exact = riesz_mean(spec, RieszQuery(rho + delta, E))
    vals = spec.values[spec.values < E]
    R = _riesz_at(vals, rho)
    U = E ** delta
    kinks = np.sort((E - vals) ** delta)
    edges = np.unique(np.concatenate([[0.0], kinks[(kinks > 0) & (kinks < U)], [U]]))

    def g(u):
        return R(E - u ** (1.0 / delta))

    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            v, e = _quad(g, a, b)
            total += v
            err += e
    quad_value = total / (delta * beta(1.0 + rho, delta))
    if exact == 0.0 and quad_value == 0.0:
        resid = 0.0
    else:
        resid = abs(quad_value - exact) / max(abs(exact), 1e-300)
    if resid > 1e-6 and err / max(abs(total), 1e-300) > 1e-6:
        raise ConvergenceError(f"quadrature error estimate {err:.3g} too large")
    if return_values:
        return resid, exact, quad_value
    return resid


def laplace_identity_check(spec: SpectrumSlice, rho: float, t: float, return_values=False):
    """Relative gap between ``int_0^inf e^(-Et) R_rho(E) dE`` (by quadrature)
    and ``Gamma(1+rho) t^(-1-rho) Z(t)``.

    A finite explicit spectrum is integrated to infinity; a truncated one is
    integrated to its cutoff after checking that both dropped tails are
    negligible at the requested level.
    """
    rho, t = float(rho), float(t)
    if rho < 0 or not t > 0:
        raise DomainError("need rho >= 0 and t > 0")
    vals = spec.values
    R = _riesz_at(vals, rho)

    def f(E):
        return math.exp(-E * t) * R(E)

    pts = np.unique(vals)
    X = spec.cutoff
    edges = list(pts) + ([X] if math.isfinite(X) and (pts.size == 0 or X > pts[-1]) else [])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += _quad(f, a, b)[0]
    if math.isinf(X) and pts.size:
        total += _quad(f, pts[-1], math.inf)[0]
    rhs = math.gamma(1 + rho) * t ** (-1 - rho) * math.fsum(np.exp(-t * vals).tolist())
    if math.isfinite(X):
        p = spec.params
        if p is None:
            raise ConvergenceError("a truncated spectrum needs params for the tail bound")
        dom = DomainSpec.from_params(p)
        a = 0.5 * p.d / p.s
        c = counting_upper_bound(dom, p.s, 1.0)
        m = a + rho
        lhs_tail = c * math.exp(math.lgamma(m + 1) - (m + 1) * math.log(t)) * special.gammaincc(m + 1, X * t)
        # eigenvalues below X whose Laplace integrand is cut at X
        cut = math.gamma(1 + rho) * t ** (-1 - rho) * float(np.sum(
            np.exp(-t * vals) * special.gammaincc(rho + 1, np.maximum(X - vals, 0.0) * t)))
        rhs_tail = math.gamma(1 + rho) * t ** (-1 - rho) * heat_tail_bound(dom, p.s, t, X)
        if (lhs_tail + rhs_tail + cut) > 1e-8 * max(rhs, 1e-300):
            raise ConvergenceError(f"cutoff {X:g} too low for the Laplace check at t={t:g}")
    resid = abs(total - rhs) / max(abs(rhs), 1e-300)
    if return_values:
        return resid, total, rhs
    return resid


# ---------------------------------------------------------------------------
# tables


def heat_table(params: SpectralParams, ts, tol: float = 1e-10, workers=None):
    dom = DomainSpec.from_params(params)
    rows = []
    for t in ts:
        Z = partition_function(params, HeatQuery(t, tol), workers)
        rows.append((float(t), Z, heat_asymptote(dom, params.s, t), heat_upper_bound(dom, params.s, t)))
    return rows


def riesz_table(params: SpectralParams, Es, rho: float, workers=None):
    dom = DomainSpec.from_params(params)
    rows = []
    for E in Es:
        q = RieszQuery(rho, E)
        bound = riesz_upper_bound(dom, params.s, q) if rho > 1 else float("nan")
        rows.append((float(E), float(rho), riesz_mean(params, q, workers=workers),
                     riesz_asymptote(dom, params.s, q), bound))
    return rows


HEAT_HEADER = ("t", "Z_exact", "Z_asymptote", "Z_bound")
RIESZ_HEADER = ("E", "rho", "R_exact", "R_asymptote", "R_bound")


def write_table_csv(rows, header, kind: str, fh) -> None:
    fh.write(f"# {CSV_VERSION} {kind}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if isinstance(x, float) and math.isnan(x) else repr(x) for x in r])
