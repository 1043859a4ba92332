"""Deterministic shape functions and second-order expansion gaps.

The law-of-large-numbers limit of the passage time to (m, n) is
``(sqrt(m) + sqrt(n))^2``.  Around the characteristic point
``((1-rho)^2 N, rho^2 N)`` the expected value of the best path forced to
leave the axes at signed coordinate x falls below N by a quadratic penalty
plus a strictly positive higher-order gap; the two ``*_remainder`` functions
evaluate that gap exactly (using the real, unrounded characteristic point so
lattice rounding never pollutes the analytic identity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .environment import Density, as_density, characteristic_point

__all__ = [
    "CharacteristicSpec",
    "limit_shape",
    "boundary_mean",
    "curvature_penalty",
    "axis_remainder",
    "antidiagonal_remainder",
]


@dataclass(frozen=True)
class CharacteristicSpec:
    """Density and size, with the rounded characteristic lattice point."""

    rho: Density
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", as_density(self.rho))
        cx, cy = characteristic_point(self.rho, self.n)
        if cx < 1 or cy < 1:
            raise ValueError(
                f"characteristic point ({cx}, {cy}) degenerate for rho={self.rho.rho}, n={self.n}"
            )

    @property
    def v(self) -> tuple[int, int]:
        """Rounded characteristic lattice point."""
        return characteristic_point(self.rho, self.n)

    @property
    def v_exact(self) -> tuple[float, float]:
        """Unrounded characteristic point, used by the analytic identities."""
        r = self.rho.rho
        return (1.0 - r) ** 2 * self.n, r**2 * self.n


def limit_shape(m: float, n: float) -> float:
    """(sqrt(m) + sqrt(n))^2 for nonnegative coordinates."""
    if m < 0.0 or n < 0.0:
        raise ValueError(f"limit_shape needs nonnegative coordinates, got ({m}, {n})")
    return (math.sqrt(m) + math.sqrt(n)) ** 2


def boundary_mean(x: float, rho) -> float:
    """Expected passage time to the axis point at signed coordinate x.

    x/(1-rho) along the positive (horizontal) side, -x/rho along the negative
    (vertical) side; always nonnegative.
    """
    r = as_density(rho).rho
    return x / (1.0 - r) if x >= 0.0 else -x / r


def curvature_penalty(x: float, rho) -> float:
    """Quadratic cost (relative to N) of forcing the exit coordinate to x."""
    r = as_density(rho).rho
    if x >= 0.0:
        return r * x * x / (4.0 * (1.0 - r) ** 3)
    return (1.0 - r) * x * x / (4.0 * r**3)


def axis_remainder(x: float, spec: CharacteristicSpec) -> float:
    """Gap N - penalty(x)/N - [mean(x) + shape(v - x^)] at the exact v.

    ``x^`` is the first interior point above/right of the axis point at x:
    (x, 1) for x > 0 and (1, -x) for x < 0.  Strictly positive throughout
    the admissible open range; the limit x -> 0 is the O(1) offset coming
    from that one-step lift, not zero.
    """
    r = spec.rho.rho
    n = spec.n
    vx, vy = spec.v_exact
    if not -r**2 * n < x < (1.0 - r) ** 2 * n or x == 0.0:
        raise ValueError(f"x = {x} outside the open range (-{r**2 * n}, {(1.0 - r)**2 * n}) \\ {{0}}")
    if x > 0.0:
        rest = limit_shape(vx - x, vy - 1.0)
    else:
        rest = limit_shape(vx - 1.0, vy + x)
    return n - curvature_penalty(x, spec.rho) / n - (boundary_mean(x, spec.rho) + rest)


def antidiagonal_remainder(t: float, n: int) -> float:
    """Gap N - 4t^2/N - shape(v - (t, -t)) at rho = 1/2, v = (N/4, N/4).

    Evaluated in the cancellation-free form N u^4 / (4 (1 + sqrt(1-u^2))^2)
    with u = 4t/N, which is algebraically identical and keeps the strict
    positivity visible down to tiny |t| where the naive difference of
    O(N) terms drowns in rounding noise.  Exactly zero at t = 0.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not -n / 4.0 < t < n / 4.0:
        raise ValueError(f"t = {t} outside the open range (-{n/4}, {n/4})")
    u = 4.0 * t / n
    s = math.sqrt(1.0 - u * u)
    return n * u**4 / (4.0 * (1.0 + s) ** 2)
