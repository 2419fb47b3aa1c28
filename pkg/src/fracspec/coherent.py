"""Coherent states ``G_{y,p}`` for the symbol ``||p||^(2s) = sum |p_i|^(2s)``.

``G_{y,p}(x) = c e^{(i/hbar)<p, x-y>} exp(-||x-y||^(2s) / 2 hbar^s)`` with
``c = (2 hbar^(1/2) Gamma(1 + 1/2s))^(-d/2)`` and ``p = 2 pi k``.  The kinetic
expectation is evaluated on the momentum side with a discrete unitary
``hbar``-Fourier transform.  Both the profile and the symbol split over the
axes, so a ``d = 2`` state is handled as two one-dimensional transforms
(``method="tensor"`` runs the full 2D transform instead, as a cross-check).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, ResourceLimitError
from .specfun import check_order, log_gamma

__all__ = [
    "CoherentParams",
    "coherent_profile",
    "normalization_constant",
    "normalization_mass",
    "kinetic_expectation",
    "momentum_density",
    "momentum_centroid",
    "gaussian_kinetic_expectation",
    "semiclassical_limit_check",
    "ConvergenceReport",
    "potential_expectation",
    "PotentialExpectation",
    "parseval_check",
]

TWO_PI = 2.0 * math.pi
# |G|^2 at the edge of the position window, relative to the peak
EDGE_DENSITY = 1e-12
MAX_GRID = 1 << 22
_MAX_TENSOR = 1 << 24


def _vec(v, d, name):
    a = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    if a.size == 1 and d > 1:
        a = np.full(d, a[0])
    if a.size != d:
        raise DomainError(f"{name} must have {d} components, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    return a


@dataclass(frozen=True, eq=False)
class CoherentParams:
    d: int
    s: float
    hbar: float
    k: Sequence[float] = (0.0,)
    y: Sequence[float] | None = None

    def __post_init__(self):
        d = int(self.d)
        if d not in (1, 2):
            raise DomainError(f"coherent states are evaluated for d in (1, 2), got {self.d!r}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "s", check_order(self.s))
        h = float(self.hbar)
        if not (math.isfinite(h) and h > 0):
            raise DomainError(f"hbar must be > 0, got {self.hbar!r}")
        object.__setattr__(self, "hbar", h)
        object.__setattr__(self, "k", _vec(self.k, d, "k"))
        object.__setattr__(self, "y", _vec(0.0 if self.y is None else self.y, d, "y"))

    @property
    def p(self) -> np.ndarray:
        return TWO_PI * self.k

    @property
    def classical_limit(self) -> float:
        return float(np.sum(np.abs(self.p) ** (2 * self.s)))

    def replace(self, **kw) -> "CoherentParams":
        args = dict(d=self.d, s=self.s, hbar=self.hbar, k=self.k, y=self.y)
        args.update(kw)
        return CoherentParams(**args)


def normalization_constant(d, s, hbar) -> float:
    """``(2 hbar^(1/2) Gamma(1 + 1/2s))^(-d/2)``."""
    return math.exp(-0.5 * d * (math.log(2.0) + 0.5 * math.log(hbar) + log_gamma(1 + 0.5 / s)))


def coherent_profile(c: CoherentParams, x) -> np.ndarray:
    """``G_{y,p}`` at points ``x`` (shape ``(..., d)``, or ``(...)`` when ``d = 1``)."""
    x = np.asarray(x, dtype=float)
    if c.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    u = x - c.y
    phase = np.exp(1j / c.hbar * (u @ c.p))
    env = np.exp(-np.sum(np.abs(u) ** (2 * c.s), axis=-1) / (2 * c.hbar ** c.s))
    return normalization_constant(c.d, c.s, c.hbar) * phase * env


def normalization_mass(c: CoherentParams) -> float:
    """``int |G|^2 dx`` by adaptive quadrature, one axis at a time."""
    c1sq = normalization_constant(1, c.s, c.hbar) ** 2
    hs, s2 = c.hbar ** c.s, 2 * c.s
    f = lambda u: c1sq * math.exp(-abs(u) ** s2 / hs)
    half, _ = integrate.quad(f, 0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return (2 * half) ** c.d


def gaussian_kinetic_expectation(k, hbar) -> float:
    """Exact ``s = 1`` value ``||2 pi k||^2 + hbar d / 2``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    return float(np.sum((TWO_PI * k) ** 2) + 0.5 * hbar * k.size)


# ---------------------------------------------------------------------------
# momentum side


def _xi_extent(s):
    return 1.02 * math.log(1.0 / EDGE_DENSITY) ** (0.5 / s)


def _axis_transform(s, hbar, p, y, margin):
    """Discrete unitary transform of one factor of ``G``.

    The position grid is centred on ``y`` (a node sits on the cusp of the
    ``s < 1`` profile) and its spacing keeps ``p`` plus ``margin`` scaled
    momentum units inside the Nyquist band.  ``y`` then only enters through
    the phase of the transform.
    """
    rh = math.sqrt(hbar)
    dx = rh * math.pi / (abs(p) / rh + margin)
    half = math.ceil(rh * _xi_extent(s) / dx)
    n = 2 * half + 2
    if n > MAX_GRID:
        raise ConvergenceError(f"momentum grid needs {n} points (> {MAX_GRID})")
    x = y + dx * (np.arange(n) - half)
    u = x - y
    g = normalization_constant(1, s, hbar) * np.exp(1j * p * u / hbar - np.abs(u) ** (2 * s) / (2 * hbar ** s))
    ghat = np.fft.fft(g) * (dx / math.sqrt(TWO_PI * hbar))
    pt = TWO_PI * hbar * np.fft.fftfreq(n, dx)
    dp = TWO_PI * hbar / (n * dx)
    return pt, np.abs(ghat) ** 2, dp


def _axis_density(s, hbar, p, y):
    # widen the momentum band until the density at its far edge is negligible
    margin = 12.0 if s == 1.0 else 256.0
    while True:
        pt, dens, dp = _axis_transform(s, hbar, p, y, margin)
        # the point of the periodic band farthest from p
        far = np.argmax(np.abs(pt - p))
        if dens[far] <= EDGE_DENSITY * dens.max():
            return pt, dens, dp
        margin *= 2.0


def momentum_density(c: CoherentParams, axis: int = 0):
    """``(p_grid, |G^|^2, dp)`` for one axis of the separable state."""
    return _axis_density(c.s, c.hbar, float(c.p[axis]), float(c.y[axis]))


def _axis_moments(c):
    out = []
    for i in range(c.d):
        pt, dens, dp = momentum_density(c, i)
        out.append((math.fsum(dens * dp), math.fsum(np.abs(pt) ** (2 * c.s) * dens * dp),
                    math.fsum(pt * dens * dp)))
    return out


def kinetic_expectation(c: CoherentParams, method: str = "separable") -> float:
    """``int ||p~||^(2s) |G^(p~)|^2 dp~``, in the dimensionless energy normalization."""
    if method == "separable":
        mom = _axis_moments(c)
        masses = [m[0] for m in mom]
        total = 0.0
        for i, (_, m2s, _) in enumerate(mom):
            total += m2s * math.prod(masses[:i] + masses[i + 1:])
        return total
    if method != "tensor":
        raise DomainError(f"unknown method {method!r}")
    grids = [momentum_density(c, i) for i in range(c.d)]
    size = math.prod(g[0].size for g in grids)
    if size > _MAX_TENSOR:
        raise ResourceLimitError(f"tensor grid of {size} points exceeds {_MAX_TENSOR}")
    # build the d-dimensional state on the product grid and transform it whole
    axes, dxs = [], []
    for i, (pt, _, dp) in enumerate(grids):
        n = pt.size
        dx = TWO_PI * c.hbar / (n * dp)
        axes.append(c.y[i] + dx * (np.arange(n) - (n - 2) // 2))
        dxs.append(dx)
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    G = coherent_profile(c, X)
    Gh = np.fft.fftn(G) * (math.prod(dxs) / (TWO_PI * c.hbar) ** (0.5 * c.d))
    P = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    sym = sum(np.abs(Pi) ** (2 * c.s) for Pi in P)
    dvol = math.prod(g[2] for g in grids)
    return float(np.sum(sym * np.abs(Gh) ** 2) * dvol)


def momentum_centroid(c: CoherentParams) -> np.ndarray:
    """Mean momentum of ``|G^|^2``; equals ``p`` up to grid resolution."""
    return np.array([m1 / m0 for m0, _, m1 in _axis_moments(c)])


class ConvergenceReport(NamedTuple):
    hbar: tuple
    expectation: tuple
    limit: float
    gap: tuple
    decreasing: bool
    final_relative_gap: float
    converged: bool

    def write_csv(self, fh) -> None:
        fh.write("hbar,expectation,limit,gap\n")
        for h, e, g in zip(self.hbar, self.expectation, self.gap):
            fh.write(f"{h!r},{e!r},{self.limit!r},{g!r}\n")


def semiclassical_limit_check(s, k, d: int = 1, hbars=(0.5, 0.2, 0.1, 0.05, 0.02), y=None,
                              rel_target: float = 0.05) -> ConvergenceReport:
    """Track ``|<L> - ||2 pi k||^(2s)|`` along a decreasing ``hbar`` grid.

    Non-convergence is reported in the result, not raised.
    """
    hbars = tuple(float(h) for h in hbars)
    if any(b >= a for a, b in zip(hbars, hbars[1:])):
        raise DomainError("hbar grid must be strictly decreasing")
    exps, gaps = [], []
    limit = None
    for h in hbars:
        c = CoherentParams(d, s, h, k, y)
        limit = c.classical_limit
        e = kinetic_expectation(c)
        exps.append(e)
        gaps.append(abs(e - limit))
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    rel = gaps[-1] / limit if limit > 0 else gaps[-1]
    return ConvergenceReport(hbars, tuple(exps), limit, tuple(gaps), decreasing, rel,
                             decreasing and rel < rel_target)


# ---------------------------------------------------------------------------
# potential expectation


class PotentialExpectation(NamedTuple):
    value: float
    at_center: float
    gap: float
    mode: str


def _eval_V(V, pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return np.asarray(V(pts), dtype=float).reshape(-1)


def potential_expectation(c: CoherentParams, V, mode: str = "center") -> PotentialExpectation:
    """Expectation of a well depth in ``G_{y,p}``.

    ``mode="center"`` evaluates the multiplication by the constant ``V(y)``,
    which returns ``V(y)`` because ``||G|| = 1``.  ``mode="diagnostic"``
    integrates ``V(x) |G(x)|^2`` over the window holding all but ``1e-12`` of
    the mass and reports its distance from ``V(y)``.
    """
    center = float(_eval_V(V, c.y[None, :])[0])
    if mode == "center":
        return PotentialExpectation(center, center, 0.0, mode)
    if mode != "diagnostic":
        raise DomainError(f"unknown mode {mode!r}")
    ext = math.sqrt(c.hbar) * _xi_extent(c.s)
    c2 = normalization_constant(c.d, c.s, c.hbar) ** 2
    hs, s2 = c.hbar ** c.s, 2 * c.s
    support = getattr(V, "support", ()) or ()
    ranges, points = [], []
    for i in range(c.d):
        lo, hi = c.y[i] - ext, c.y[i] + ext
        pts = [float(c.y[i])]
        if i < len(support):
            pts += [b for b in support[i] if lo < b < hi]
        ranges.append([lo, hi])
        points.append(sorted(set(pts)))

    def f(*x):
        u = np.array(x) - c.y
        return float(_eval_V(V, np.array(x)[None, :])[0]) * c2 * math.exp(-np.sum(np.abs(u) ** s2) / hs)

    opts = [{"epsabs": 1e-13, "epsrel": 1e-10, "limit": 200, "points": points[i]}
            for i in range(c.d)]
    val, _ = integrate.nquad(f, ranges, opts=opts)
    return PotentialExpectation(val, center, abs(val - center), mode)


# ---------------------------------------------------------------------------
# coherent-state transform


def parseval_check(c: CoherentParams, psi: str = "gaussian", widen: float = 1.0,
                   tail: float = 1e-7, return_total: bool = False):
    """``| int int |<G_{y,k}, psi>|^2 dk dy - ||psi||^2 |`` on a truncated box.

    Uses the transform ``<G_{y,k}, psi> = int f(x-y) e^{-2 pi i k (x-y)} psi(x) dx``
    with ``f`` the ``p = 0`` profile of ``c``.  ``psi`` is ``"gaussian"``
    (``pi^(-1/4) e^(-x^2/2)``) or ``"coherent"`` (``c`` itself).  The ``y``
    and ``k`` boxes hold all but roughly ``tail`` of each factor's mass;
    ``widen`` scales both.
    """
    if c.d != 1:
        raise DomainError("the coherent-state transform check is one-dimensional")
    widen = float(widen)
    if not widen > 0:
        raise DomainError("widen must be > 0")
    s, h = c.s, c.hbar
    rh = math.sqrt(h)
    a_f = rh * math.log(1.0 / tail) ** (0.5 / s)
    if psi == "gaussian":
        psi_fn = lambda x: math.pi ** -0.25 * np.exp(-0.5 * x * x)
        a_psi, x_c, k_c = math.sqrt(math.log(1.0 / tail)), 0.0, 0.0
    elif psi == "coherent":
        psi_fn = lambda x: coherent_profile(c, x)
        a_psi, x_c, k_c = a_f, float(c.y[0]), float(c.k[0]) / h
    else:
        raise DomainError(f"unknown test function {psi!r}")
    # spread in k: gaussian factors decay like exp(-(2 pi k)^2), the s < 1
    # profile only like a power of k, so its box follows that power law
    k_psi = math.sqrt(math.log(1.0 / tail)) / math.pi if psi == "gaussian" else 0.0
    k_f = tail ** (-1.0 / (1 + 4 * s)) / (TWO_PI * rh) if s < 1 else math.log(1 / tail) ** 0.5 / (math.pi * rh)
    Y = widen * (a_f + a_psi)
    K = widen * (k_f + k_psi)
    X = Y + widen * a_f
    # x spacing resolves the band |k - k_c| <= K; the s < 1 cusp has a power-law
    # spectrum that aliases back into the band, so it gets a finer grid
    dx = 1.0 / ((4.0 if s == 1.0 else 16.0) * (K + abs(k_c)))
    nx = 2 * math.ceil(X / dx) + 1
    if nx > MAX_GRID:
        raise ResourceLimitError(f"position grid needs {nx} points")
    x = x_c + dx * (np.arange(nx) - nx // 2)
    ny = max(64, int(math.ceil(2 * Y / (0.25 * min(rh, 1.0)))))
    ys = np.linspace(x_c - Y, x_c + Y, ny + 1)
    dy = ys[1] - ys[0]
    cf = normalization_constant(1, s, h)
    psi_x = np.asarray(psi_fn(x), dtype=complex)
    kk = np.fft.fftfreq(nx, dx)
    dk = 1.0 / (nx * dx)
    keep = np.abs(kk - k_c) <= K
    wy = np.full(ys.size, dy)
    wy[[0, -1]] *= 0.5
    total = 0.0
    for chunk in np.array_split(np.arange(ys.size), max(1, ys.size * nx // 4_000_000)):
        f = cf * np.exp(-np.abs(x[None, :] - ys[chunk, None]) ** (2 * s) / (2 * h ** s))
        T = np.fft.fft(f * psi_x[None, :], axis=1) * dx
        total += float(np.sum(wy[chunk] * np.sum(np.abs(T[:, keep]) ** 2, axis=1)) * dk)
    resid = abs(total - 1.0)
    return (resid, total) if return_total else resid
