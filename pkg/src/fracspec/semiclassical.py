"""Phase-space integrals for a free particle and for bound states of a well.

The closed forms all come from one observation: the phase-space region
``||2 pi k||^(2s) <= V`` is a scaled deformed ball, so every integral reduces
to ``|A_{d-1,2s}|`` times a one-dimensional radial integral.  Each closed form
here has a numerical counterpart (quadrature or seeded Monte Carlo) that does
not use that reduction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .bounds import DomainSpec, asymptotic_sum, weyl_constant
from .errors import ConvergenceError, DomainError
from .specfun import (
    beta,
    check_dimension,
    check_order,
    lieb_thirring_classical_constant,
    sphere_volume,
)

__all__ = [
    "PhaseSpaceQuery",
    "PotentialSpec",
    "phase_space_volume",
    "phase_space_volume_mc",
    "classical_free_sum",
    "polya_weyl_scale_factor",
    "radial_moment_integral",
    "radial_moment_quadrature",
    "potential_power_integral",
    "bound_state_moment_sum",
    "phase_space_moment_quadrature",
    "momentum_moment_quadrature",
    "gamma_one_coefficients",
    "deformed_sphere_volume",
    "spherical_jacobian",
    "jacobian_volume_quadrature",
    "load_potential_grid",
    "save_potential_grid",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseSpaceQuery:
    """Free particle in ``dom``; give either the energy ceiling or a level count."""

    dom: DomainSpec
    s: float
    E_max: float | None = None
    N: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "s", check_order(self.s))
        if self.E_max is None and self.N is None:
            raise DomainError("give E_max or N")
        if self.E_max is not None and not float(self.E_max) > 0:
            raise DomainError(f"E_max must be > 0, got {self.E_max!r}")
        if self.N is not None and not float(self.N) >= 0:
            raise DomainError(f"N must be >= 0, got {self.N!r}")

    def energy(self) -> float:
        if self.E_max is not None:
            return float(self.E_max)
        # solve Vol(A) = N
        a = 0.5 * self.dom.d / self.s
        return (float(self.N) / weyl_constant(self.dom, self.s)) ** (1.0 / a)


def phase_space_volume(q: PhaseSpaceQuery) -> float:
    """Volume of ``{(x, k): x in Omega, ||2 pi k||^(2s) <= E_max}``."""
    d = q.dom.d
    return q.dom.volume * sphere_volume(d, q.s) / (d * TWO_PI ** d) * q.energy() ** (0.5 * d / q.s)


def phase_space_volume_mc(q: PhaseSpaceQuery, samples: int = 10**6, seed: int = 0,
                          batch: int = 250_000):
    """Seeded Monte Carlo estimate of :func:`phase_space_volume` and its standard error.

    The ``x`` integral is the domain volume; ``k`` is drawn uniformly from the
    bounding box of the momentum ball.
    """
    d, s = q.dom.d, q.s
    K = q.energy() ** (0.5 / s) / TWO_PI
    rng = np.random.default_rng(seed)
    hits = 0
    left = int(samples)
    while left > 0:
        m = min(batch, left)
        k = rng.uniform(-K, K, size=(m, d))
        hits += int(np.count_nonzero(np.sum(np.abs(TWO_PI * k) ** (2 * s), axis=1) <= q.energy()))
        left -= m
    frac = hits / samples
    box = q.dom.volume * (2 * K) ** d
    return box * frac, box * math.sqrt(frac * (1 - frac) / samples)


def classical_free_sum(q: PhaseSpaceQuery) -> float:
    """Phase-space integral of ``||2 pi k||^(2s)`` over the region holding ``N`` states."""
    if q.N is not None and float(q.N) == 0.0:
        return 0.0
    d, s = q.dom.d, q.s
    E = q.energy()
    return q.dom.volume * sphere_volume(d, s) / (TWO_PI ** d * (d + 2 * s)) * E ** (1 + 0.5 * d / s)


def polya_weyl_scale_factor(d, s):
    """``lam = (d/(d+2s))^((1/2s)(1 + d/2s))`` and the sum ratio ``lam^(-2s)``."""
    d = check_dimension(d)
    s = check_order(s)
    lam = (d / (d + 2 * s)) ** ((0.5 / s) * (1 + 0.5 * d / s))
    return lam, lam ** (-2 * s)


def radial_moment_integral(d, s, gamma) -> float:
    """``int_0^1 (1 - r^(2s))^gamma r^(d-1) dr = B(d/2s, gamma+1) / 2s``."""
    d = check_dimension(d)
    s = check_order(s)
    gamma = float(gamma)
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    return beta(0.5 * d / s, gamma + 1.0) / (2 * s)


def radial_moment_quadrature(d, s, gamma) -> float:
    d = check_dimension(d)
    s = check_order(s)
    val, _ = integrate.quad(lambda r: (1 - r ** (2 * s)) ** gamma * r ** (d - 1), 0.0, 1.0,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """A nonnegative well depth ``V(x)`` (already divided by ``D_2s``).

    ``profile`` maps an ``(m, d)`` array of points to ``m`` depths and vanishes
    outside ``support`` (one ``(lo, hi)`` pair per axis).  Sampled wells carry
    ``grid`` (cell-centred values), ``spacing`` and ``origin`` instead.
    """

    d: int
    s: float
    gamma: float
    profile: Callable | None = None
    support: tuple = ()
    name: str = "custom"
    breakpoints: tuple = ()
    grid: np.ndarray | None = None
    spacing: tuple = ()
    origin: tuple = ()
    closed_form: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "d", check_dimension(self.d))
        object.__setattr__(self, "s", check_order(self.s))
        g = float(self.gamma)
        if not g >= 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)
        if self.grid is not None:
            grid = np.asarray(self.grid, dtype=float)
            if grid.ndim != self.d:
                raise DomainError(f"grid has {grid.ndim} axes, expected {self.d}")
            if np.any(grid < 0) or not np.all(np.isfinite(grid)):
                raise DomainError("well depth must be finite and nonnegative")
            object.__setattr__(self, "grid", grid)
        elif self.profile is None:
            raise DomainError("give a profile or a grid")

    @property
    def exponent(self) -> float:
        return self.gamma + 0.5 * self.d / self.s

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(self.profile(x), dtype=float)

    def scaled(self, c: float) -> "PotentialSpec":
        c = float(c)
        if self.grid is not None:
            return PotentialSpec(self.d, self.s, self.gamma, grid=self.grid * c,
                                 spacing=self.spacing, origin=self.origin, name=self.name)
        prof, cf = self.profile, self.closed_form
        return PotentialSpec(self.d, self.s, self.gamma, lambda x: c * prof(x), self.support,
                             self.name, self.breakpoints,
                             closed_form=None if cf is None else (lambda m: c ** m * cf(m)))

    # builtin families -------------------------------------------------

    @classmethod
    def box_well(cls, depth, half_widths, s, gamma):
        hw = np.atleast_1d(np.asarray(half_widths, dtype=float))
        d = hw.size
        V0 = float(depth)

        def prof(x):
            return np.where(np.all(np.abs(x) <= hw, axis=1), V0, 0.0)

        vol = float(np.prod(2 * hw))
        return cls(d, s, gamma, prof, tuple((-h, h) for h in hw), "box",
                   closed_form=lambda m: V0 ** m * vol)

    @classmethod
    def gaussian_well(cls, depth, sigma, d, s, gamma):
        V0, sig = float(depth), float(sigma)
        m0 = gamma + 0.5 * d / s
        # V^m falls below 1e-18 of its peak outside this box
        h = sig * math.sqrt(2 * 41.5 / max(m0, 1e-3))

        def prof(x):
            return V0 * np.exp(-np.sum(x * x, axis=1) / (2 * sig * sig))

        return cls(d, s, gamma, prof, tuple((-h, h) for _ in range(d)), "gaussian",
                   closed_form=lambda m: V0 ** m * (2 * math.pi * sig * sig / m) ** (0.5 * d))

    @classmethod
    def bump_product(cls, depth, width, d, s, gamma):
        """``V0 prod_i cos^2(pi x_i / 2w)`` on ``|x_i| <= w``."""
        V0, w = float(depth), float(width)

        def prof(x):
            inside = np.all(np.abs(x) <= w, axis=1)
            return np.where(inside, V0 * np.prod(np.cos(0.5 * math.pi * x / w) ** 2, axis=1), 0.0)

        def cf(m):
            one = 2 * w / math.pi * beta(0.5, m + 0.5)
            return V0 ** m * one ** d

        return cls(d, s, gamma, prof, tuple((-w, w) for _ in range(d)), "bump", closed_form=cf)

    @classmethod
    def from_grid(cls, values, spacing, origin, s, gamma):
        values = np.asarray(values, dtype=float)
        return cls(values.ndim, s, gamma, grid=values, spacing=tuple(map(float, spacing)),
                   origin=tuple(map(float, origin)), name="grid")


def potential_power_integral(p: PotentialSpec, m: float | None = None) -> float:
    """``int V(x)^m dx`` (default ``m = gamma + d/2s``).

    Sampled wells use the cell-centred sum; analytic wells adaptive quadrature
    over their support box (``d <= 3``).
    """
    m = p.exponent if m is None else float(m)
    if p.grid is not None:
        return float(np.sum(p.grid ** m) * np.prod(p.spacing))
    if p.d > 3:
        if p.closed_form is None:
            raise DomainError("quadrature of analytic wells is limited to d <= 3")
        return float(p.closed_form(m))

    def f(*x):
        v = float(p(np.array(x))[0])
        if v < 0:
            raise DomainError(f"well depth is negative at {x}")
        return v ** m if v > 0 else 0.0

    opts = {"epsabs": 0.0, "epsrel": 1e-11, "limit": 200}
    if p.d == 1:
        lo, hi = p.support[0]
        val, err = integrate.quad(f, lo, hi, points=p.breakpoints or None, **opts)
    else:
        val, err = integrate.nquad(f, list(p.support), opts=[opts] * p.d)
    if not math.isfinite(val):
        raise ConvergenceError("power integral of the well is not finite")
    return float(val)


def bound_state_moment_sum(p: PotentialSpec) -> float:
    """Classical ``sum |E_n|^gamma = C^class_{2s,gamma,d} int V^(gamma + d/2s)``."""
    return lieb_thirring_classical_constant(p.gamma, p.d, p.s) * potential_power_integral(p)


def momentum_moment_quadrature(depth, d, s, gamma) -> float:
    """``int (V - ||2 pi k||^(2s))_+^gamma dk`` over ``R^d`` by nested quadrature.

    Integrates coordinate by coordinate over the positive orthant (times
    ``2^d``) with the exact limits of the deformed ball; no radial reduction.
    """
    d = check_dimension(d)
    s = check_order(s)
    V = float(depth)
    if V <= 0:
        return 0.0
    if d > 3:
        raise DomainError("nested momentum quadrature is limited to d <= 3")
    p2 = 2 * s
    opts = {"epsabs": 0.0, "epsrel": 1e-12, "limit": 200}

    def inner(level, rest):
        # rest = V minus the contributions of the outer coordinates
        K = max(rest, 0.0) ** (1 / p2) / TWO_PI
        if level == d - 1:
            f = lambda k: (rest - (TWO_PI * k) ** p2) ** gamma if rest > (TWO_PI * k) ** p2 else 0.0
            return integrate.quad(f, 0.0, K, **opts)[0]
        return integrate.quad(lambda k: inner(level + 1, rest - (TWO_PI * k) ** p2), 0.0, K,
                              **opts)[0]

    return 2 ** d * inner(0, V)


def phase_space_moment_quadrature(p: PotentialSpec) -> float:
    """``int int (V(x) - ||2 pi k||^(2s))_+^gamma dk dx`` computed directly.

    ``d = 1`` wells: nested quadrature over ``x`` then ``k``.  Box wells in
    ``d <= 3``: the ``x`` integral is the box volume times the momentum
    quadrature at the well depth.
    """
    s, g = p.s, p.gamma
    if p.name == "box":
        W = float(np.prod([hi - lo for lo, hi in p.support]))
        depth = float(p(np.zeros((1, p.d)))[0])
        return W * momentum_moment_quadrature(depth, p.d, s, g)
    if p.d != 1 or p.grid is not None:
        raise DomainError("direct phase-space quadrature needs d = 1 or a box well")

    def over_k(x):
        V = float(p(np.array([[x]]))[0])
        return momentum_moment_quadrature(V, 1, s, g) if V > 0 else 0.0

    lo, hi = p.support[0]
    val, _ = integrate.quad(over_k, lo, hi, epsabs=0.0, epsrel=1e-11, limit=200)
    return val


class GammaOneCoefficients(NamedTuple):
    reduced: float
    unreduced: float
    quadrature: float
    matches: str


def gamma_one_coefficients(d, s) -> GammaOneCoefficients:
    """Coefficient of ``int V^(1 + d/2s)`` in the ``gamma = 1`` bound-state sum.

    ``reduced`` carries the full radial integral ``2s/(d(d+2s))``;
    ``unreduced`` drops its ``1/d`` factor, as happens when the radial integral
    is written ``2s/(d+2s)``.  ``quadrature`` integrates ``(1 - ||2 pi k||^2s)_+``
    over momentum space directly, and ``matches`` names the closer value.
    """
    d = check_dimension(d)
    s = check_order(s)
    A = sphere_volume(d, s) / TWO_PI ** d
    reduced = A * 2 * s / (d * (d + 2 * s))
    unreduced = A * 2 * s / (d + 2 * s)
    quad = momentum_moment_quadrature(1.0, d, s, 1.0)
    which = "reduced" if abs(quad - reduced) <= abs(quad - unreduced) else "unreduced"
    return GammaOneCoefficients(reduced, unreduced, quad, which)


# ---------------------------------------------------------------------------
# deformed sphere


def deformed_sphere_volume(d, s, R=1.0) -> float:
    """``2^d s^-(d-1) (R^d/d) 2^-(d-1) prod_k B(1/2s, k/2s)``.

    This is the volume enclosed by the deformed sphere of radius ``R``; the
    Beta product telescopes to ``R^d |B_{d,2s}|``.
    """
    d = check_dimension(d)
    s = check_order(s)
    R = float(R)
    if not R >= 0:
        raise DomainError(f"radius must be >= 0, got {R!r}")
    log_prod = sum(math.log(beta(0.5 / s, 0.5 * k / s)) for k in range(1, d))
    return 2.0 * s ** (1 - d) * R ** d / d * math.exp(log_prod)


def spherical_jacobian(r, thetas, s) -> float:
    """Jacobian of ``x_i = r (sin t_1 ... sin t_{i-1} cos t_i)^(1/s)`` (last: all sines).

    Angles lie in ``(0, pi/2)``; the coordinates cover one orthant.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    d = thetas.size + 1
    q = 1.0 / s
    c, sn = np.cos(thetas), np.sin(thetas)
    j = s ** (1 - d) * r ** (d - 1)
    for k in range(1, d):
        j *= c[k - 1] ** (q - 1) * sn[k - 1] ** ((d - k) * q - 1)
    return float(j)


def jacobian_volume_quadrature(d, s, R=1.0) -> float:
    """``2^d`` times the integral of :func:`spherical_jacobian` over one orthant."""
    d = check_dimension(d)
    s = check_order(s)
    if d == 1:
        return 2.0 * R
    if d > 3:
        raise DomainError("Jacobian quadrature is limited to d <= 3")
    opts = {"epsabs": 0.0, "epsrel": 1e-12, "limit": 200}
    half = 0.5 * math.pi

    def f(*args):
        *thetas, r = args
        return spherical_jacobian(r, thetas, s)

    val, _ = integrate.nquad(f, [[0.0, half]] * (d - 1) + [[0.0, float(R)]], opts=[opts] * d)
    return 2 ** d * val


# ---------------------------------------------------------------------------
# sampled-well files


_GRID_TAG = "fracspec potential grid v1"


def _fmt(vals):
    return ",".join(repr(float(v)) for v in vals)


def save_potential_grid(path, values, spacing, origin) -> None:
    """Write a sampled well as CSV (``.csv``) or raw float64 (any other suffix).

    Both start with the grid shape, cell spacing and the centre of the first
    cell.  CSV rows run along the last axis; the binary body is C-ordered
    little-endian float64.
    """
    path = Path(path)
    values = np.asarray(values, dtype=float)
    dims = ",".join(str(n) for n in values.shape)
    if path.suffix.lower() == ".csv":
        rows = values.reshape(-1, values.shape[-1])
        with open(path, "w") as fh:
            fh.write(f"# {_GRID_TAG}\n# dims: {dims}\n# spacing: {_fmt(spacing)}\n"
                     f"# origin: {_fmt(origin)}\n")
            for row in rows:
                fh.write(_fmt(row) + "\n")
    else:
        header = f"{_GRID_TAG};dims={dims};spacing={_fmt(spacing)};origin={_fmt(origin)}\n"
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(values.astype("<f8").tobytes(order="C"))


def load_potential_grid(path):
    """Read a file written by :func:`save_potential_grid`; returns ``(values, spacing, origin)``."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        meta, rows = {}, []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].partition(":")
                    meta[key.strip()] = val.strip()
                    continue
                rows.append([float(v) for v in line.split(",")])
        if _GRID_TAG not in meta:
            raise DomainError(f"{path} is not a potential grid file")
        dims = tuple(int(n) for n in meta["dims"].split(","))
        values = np.array(rows, dtype=float).reshape(dims)
    else:
        with open(path, "rb") as fh:
            header = fh.readline().decode("ascii").strip()
            body = fh.read()
        fields = header.split(";")
        if fields[0] != _GRID_TAG:
            raise DomainError(f"{path} is not a potential grid file")
        meta = dict(f.split("=", 1) for f in fields[1:])
        dims = tuple(int(n) for n in meta["dims"].split(","))
        values = np.frombuffer(body, dtype="<f8").reshape(dims).copy()
    spacing = tuple(float(v) for v in meta["spacing"].split(","))
    origin = tuple(float(v) for v in meta["origin"].split(","))
    if len(spacing) != values.ndim or len(origin) != values.ndim:
        raise DomainError("spacing/origin do not match the grid dimension")
    return values, spacing, origin
