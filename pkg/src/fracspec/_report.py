from __future__ import annotations

from dataclasses import dataclass

VIOLATION_RTOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """One exact-versus-bound comparison.

    ``direction`` is ``"ge"`` when the exact value must not fall below the
    bound and ``"le"`` when it must not exceed it; ``"eq"`` marks identities.
    ``margin`` is signed so that a non-negative margin means satisfied.
    """

    quantity: str
    exact: float
    bound: float
    margin: float
    satisfied: bool
    direction: str = "ge"
    param_point: str = ""

    @classmethod
    def compare(cls, quantity, exact, bound, direction="ge", param_point="",
                rtol=VIOLATION_RTOL):
        exact = float(exact)
        bound = float(bound)
        scale = max(abs(exact), abs(bound), 1e-300)
        if direction == "ge":
            margin = exact - bound
            ok = margin >= -rtol * scale
        elif direction == "le":
            margin = bound - exact
            ok = margin >= -rtol * scale
        elif direction == "eq":
            margin = -abs(exact - bound)
            ok = -margin <= rtol * scale
        else:
            raise ValueError(f"unknown direction {direction!r}")
        return cls(quantity, exact, bound, margin, bool(ok), direction, param_point)

    @property
    def relative_margin(self) -> float:
        scale = max(abs(self.exact), abs(self.bound), 1e-300)
        return self.margin / scale
