"""Gamma/Beta kernels and the closed-form constants of the deformed unit ball.

Every constant here is a ratio of gamma functions, so it is evaluated in the
log domain and exponentiated once at the end.  That keeps ``d/(2s)`` of a few
hundred well inside double precision.

The "deformed" ball is the unit ball of ``(sum |x_i|^(2s))^(1/2s)``.
"""
from __future__ import annotations

import math

from .errors import DomainError

__all__ = [
    "check_dimension",
    "check_order",
    "log_gamma",
    "gamma",
    "log_beta",
    "beta",
    "ball_volume",
    "sphere_volume",
    "riesz_classical_constant",
    "lieb_thirring_classical_constant",
]

_LN2 = math.log(2.0)
_LN2PI = math.log(2.0 * math.pi)


def check_dimension(d) -> int:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def check_order(s, strict: bool = False) -> float:
    """Validate the fractional order.

    The library accepts ``0 < s <= 1``; ``strict=True`` narrows this to
    ``1/2 < s <= 1`` where the ball is convex.
    """
    s = float(s)
    if not math.isfinite(s) or s <= 0.0 or s > 1.0:
        raise DomainError(f"order s must lie in (0, 1], got {s!r}")
    if strict and s <= 0.5:
        raise DomainError(f"strict mode requires s in (1/2, 1], got {s!r}")
    return s


def _check_positive(name, x) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} must be finite and positive, got {x!r}")
    return x


def _check_nonnegative(name, x) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {x!r}")
    return x


def log_gamma(x) -> float:
    """``ln Gamma(x)`` for real ``x > 0``."""
    return math.lgamma(_check_positive("x", x))


def gamma(x) -> float:
    return math.exp(log_gamma(x))


def log_beta(x, y) -> float:
    x = _check_positive("x", x)
    y = _check_positive("y", y)
    return math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y)


def beta(x, y) -> float:
    """Euler's Beta function ``Gamma(x) Gamma(y) / Gamma(x + y)``."""
    return math.exp(log_beta(x, y))


def _log_ball_volume(d: int, s: float) -> float:
    # ln[(2 Gamma(1 + 1/2s))^d / Gamma(1 + d/2s)]
    return d * (_LN2 + math.lgamma(1.0 + 0.5 / s)) - math.lgamma(1.0 + 0.5 * d / s)


def ball_volume(d, s, strict: bool = False) -> float:
    """Volume of the unit ball of the 2s-norm in ``R^d``.

    >>> round(ball_volume(2, 1.0), 12) == round(math.pi, 12)
    True
    """
    d = check_dimension(d)
    s = check_order(s, strict)
    return math.exp(_log_ball_volume(d, s))


def sphere_volume(d, s, strict: bool = False) -> float:
    """Surface constant ``|A_{d-1,2s}| = d |B_{d,2s}|`` of the deformed sphere."""
    d = check_dimension(d)
    return d * ball_volume(d, s, strict)


def riesz_classical_constant(rho, d, s, strict: bool = False) -> float:
    """Phase-space constant of the Riesz mean of order ``rho``.

    ``pi^-d Gamma(1+1/2s)^d Gamma(1+rho) / Gamma(1+rho+d/2s)``.  At ``rho=0``
    it reduces to the Weyl constant ``|B_{d,2s}| / (2 pi)^d``.
    """
    rho = _check_nonnegative("rho", rho)
    d = check_dimension(d)
    s = check_order(s, strict)
    a = 0.5 * d / s
    log_c = (
        -d * math.log(math.pi)
        + d * math.lgamma(1.0 + 0.5 / s)
        + math.lgamma(1.0 + rho)
        - math.lgamma(1.0 + rho + a)
    )
    return math.exp(log_c)


def lieb_thirring_classical_constant(gamma, d, s, strict: bool = False) -> float:
    """Classical constant of the bound-state moment sum ``sum |E_n|^gamma``.

    ``(2 pi)^-d (2 Gamma(1+1/2s))^d Gamma(1+gamma) / Gamma(1+gamma+d/2s)``.
    """
    gamma = _check_nonnegative("gamma", gamma)
    d = check_dimension(d)
    s = check_order(s, strict)
    a = 0.5 * d / s
    log_c = (
        -d * _LN2PI
        + d * (_LN2 + math.lgamma(1.0 + 0.5 / s))
        + math.lgamma(1.0 + gamma)
        - math.lgamma(1.0 + gamma + a)
    )
    return math.exp(log_c)
