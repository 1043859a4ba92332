"""Seeded random environments on finite lattice windows.

Three variants of site weights are supported:

* ``Bulk`` -- i.i.d. rate-1 exponential weights everywhere.
* ``StationaryBoundary`` -- zero weight at the window's lower-left corner,
  rate-(1-rho) weights along its bottom row, rate-rho weights along its left
  column, rate-1 weights in the interior.
* ``HalfPlane`` -- zero weight on and below the antidiagonal ``x + y = 0``,
  rate-1 weights above it.

A :class:`BoundaryProfile` carries the antidiagonal weight function used by
the line-to-point model: a two-sided random walk with increments
``tau - psi`` where ``tau ~ exp(1-rho)`` and ``psi ~ exp(rho)``.

All builders are pure functions of their parameters and a :class:`Seed`;
fields are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .rng import Seed

__all__ = [
    "DEFAULT_CELL_BUDGET",
    "BULK",
    "STATIONARY_BOUNDARY",
    "HALF_PLANE",
    "Density",
    "Window",
    "WeightField",
    "BoundaryProfile",
    "Seed",
    "characteristic_point",
    "sample_exponential",
    "build_bulk",
    "build_stationary_boundary",
    "build_stationary_boundary_window",
    "build_half_plane",
    "build_boundary_profile",
]

# Windows larger than this many cells are rejected rather than silently paged.
DEFAULT_CELL_BUDGET = 2**30

BULK = "Bulk"
STATIONARY_BOUNDARY = "StationaryBoundary"
HALF_PLANE = "HalfPlane"

# Smallest value the 53-bit uniform draw can produce besides 0; zero draws are
# mapped onto it so inverse-CDF sampling never evaluates log(0).
_MIN_UNIFORM = 2.0**-53


@dataclass(frozen=True)
class Density:
    """Boundary parameter rho, restricted to the open interval (0, 1)."""

    rho: float

    def __post_init__(self) -> None:
        if not 0.0 < float(self.rho) < 1.0:
            raise ValueError(f"density must lie strictly inside (0, 1), got {self.rho}")


def as_density(rho) -> Density:
    return rho if isinstance(rho, Density) else Density(float(rho))


@dataclass(frozen=True)
class Window:
    """Inclusive lattice rectangle [x0, x1] x [y0, y1] (signed corners)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self) -> None:
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"empty window {self}")

    @property
    def nx(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def ny(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def cells(self) -> int:
        return self.nx * self.ny

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


def _check_budget(window: Window, cell_budget: int) -> None:
    if window.cells > cell_budget:
        raise ValueError(
            f"window has {window.cells} cells, exceeding the cell budget {cell_budget}"
        )


@dataclass(frozen=True)
class WeightField:
    """A realized environment: one 64-bit weight per site of ``window``.

    ``weights[j, i]`` is the weight at lattice point
    ``(window.x0 + i, window.y0 + j)`` (dense, row-major).  For the
    StationaryBoundary variant the boundary structure is anchored at the
    window's lower-left corner.
    """

    variant: str
    window: Window
    weights: np.ndarray
    rho: Density | None = None

    def __post_init__(self) -> None:
        if self.variant not in (BULK, STATIONARY_BOUNDARY, HALF_PLANE):
            raise ValueError(f"unknown variant {self.variant!r}")
        w = self.weights
        if w.shape != (self.window.ny, self.window.nx):
            raise ValueError(
                f"weights shape {w.shape} does not match window {self.window.ny}x{self.window.nx}"
            )
        if w.dtype != np.float64:
            raise ValueError("weights must be float64")
        w.setflags(write=False)

    def weight_at(self, x: int, y: int) -> float:
        if not self.window.contains(x, y):
            raise ValueError(f"site ({x}, {y}) outside window {self.window}")
        return float(self.weights[y - self.window.y0, x - self.window.x0])


@dataclass(frozen=True)
class BoundaryProfile:
    """Antidiagonal weight function: ``value(t)`` sits at lattice point (t, -t).

    ``value(0) == 0`` exactly; increments ``value(t) - value(t-1)`` are
    distributed as ``tau - psi`` when built by :func:`build_boundary_profile`.
    Derived profiles (couplings, flat initial data) may carry arbitrary values
    but must keep ``value(0) == 0``.
    """

    rho: Density
    t_min: int
    t_max: int
    values: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        if not self.t_min <= 0 <= self.t_max:
            raise ValueError(f"profile range [{self.t_min}, {self.t_max}] must straddle 0")
        if self.values.shape != (self.t_max - self.t_min + 1,):
            raise ValueError("profile values length does not match t range")
        if self.values[-self.t_min] != 0.0:
            raise ValueError("profile must vanish at t = 0")
        self.values.setflags(write=False)

    def value(self, t: int) -> float:
        if not self.t_min <= t <= self.t_max:
            raise ValueError(f"t = {t} outside profile range [{self.t_min}, {self.t_max}]")
        return float(self.values[t - self.t_min])

    def covers(self, t_lo: int, t_hi: int) -> bool:
        return self.t_min <= t_lo and t_hi <= self.t_max


def _round_half_up(x: float) -> int:
    # Fixed rounding convention for lattice corners (recorded in run metadata).
    return int(math.floor(x + 0.5))


def characteristic_point(rho, n: int) -> tuple[int, int]:
    """Lattice point ((1-rho)^2 n, rho^2 n), corners rounded half-up."""
    r = as_density(rho).rho
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return _round_half_up((1.0 - r) ** 2 * n), _round_half_up(r**2 * n)


def _uniform_open(stream: np.random.Generator, size=None) -> np.ndarray | float:
    # 53-bit uniform on (0, 1): the zero atom (probability 2^-53) is merged
    # into the adjacent atom 2^-53 so downstream logs stay finite.
    u = stream.random(size)
    if size is None:
        return u if u > 0.0 else _MIN_UNIFORM
    np.copyto(u, _MIN_UNIFORM, where=(u == 0.0))
    return u


def sample_exponential(rate: float, stream: np.random.Generator, size=None):
    """Inverse-CDF exponential sampling: ``-ln(U) / rate`` with U uniform on (0,1).

    Returns a float when ``size`` is None, else an ndarray.  Strictly positive.
    """
    if not rate > 0.0:
        raise ValueError(f"rate must be positive, got {rate}")
    u = _uniform_open(stream, size)
    if size is None:
        return -math.log(u) / rate
    return -np.log(u) / rate


def build_bulk(window: Window, seed: Seed, cell_budget: int = DEFAULT_CELL_BUDGET) -> WeightField:
    """Rate-1 i.i.d. weights on every site of ``window``(drawn row-major)."""
    _check_budget(window, cell_budget)
    stream = seed.stream()
    w = sample_exponential(1.0, stream, size=(window.ny, window.nx))
    return WeightField(BULK, window, w)


def build_stationary_boundary_window(
    window: Window, rho, seed: Seed, cell_budget: int = DEFAULT_CELL_BUDGET
) -> WeightField:
    """StationaryBoundary weights with the corner/axes anchored at (x0, y0).

    Draw order is fixed: bottom row (rate 1-rho), then left column (rate rho),
    then the interior row-major (rate 1).
    """
    rho = as_density(rho)
    _check_budget(window, cell_budget)
    stream = seed.stream()
    w = np.zeros((window.ny, window.nx))
    if window.nx > 1:
        w[0, 1:] = sample_exponential(1.0 - rho.rho, stream, size=window.nx - 1)
    if window.ny > 1:
        w[1:, 0] = sample_exponential(rho.rho, stream, size=window.ny - 1)
    if window.nx > 1 and window.ny > 1:
        w[1:, 1:] = sample_exponential(1.0, stream, size=(window.ny - 1, window.nx - 1))
    return WeightField(STATIONARY_BOUNDARY, window, w, rho=rho)


def build_stationary_boundary(
    n: int, rho, seed: Seed, cell_budget: int = DEFAULT_CELL_BUDGET
) -> WeightField:
    """Stationary model of size ``n`` on [0, (1-rho)^2 n] x [0, rho^2 n]."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    cx, cy = characteristic_point(rho, n)
    window = Window(0, 0, max(cx, 1), max(cy, 1))
    return build_stationary_boundary_window(window, rho, seed, cell_budget)


def build_half_plane(
    window: Window, seed: Seed, cell_budget: int = DEFAULT_CELL_BUDGET
) -> WeightField:
    """Rate-1 weights strictly above the antidiagonal, zero on and below it.

    Draws are made for every window cell row-major (zeroed afterwards below
    the line) so the stream position depends only on the window shape.
    """
    _check_budget(window, cell_budget)
    stream = seed.stream()
    w = sample_exponential(1.0, stream, size=(window.ny, window.nx))
    xs = np.arange(window.x0, window.x1 + 1)
    ys = np.arange(window.y0, window.y1 + 1)
    w[(xs[None, :] + ys[:, None]) <= 0] = 0.0
    return WeightField(HALF_PLANE, window, w)


def build_boundary_profile(rho, t_range: tuple[int, int], seed: Seed) -> BoundaryProfile:
    """Two-sided random walk on the antidiagonal with value(0) = 0.

    Increments (walking away from 0 on either side) are ``tau - psi`` with
    ``tau ~ exp(1-rho)`` and ``psi ~ exp(rho)``, all independent.  Draw order
    is fixed: tau then psi on the positive side, then tau then psi on the
    negative side.
    """
    rho = as_density(rho)
    t_min, t_max = int(t_range[0]), int(t_range[1])
    if not t_min <= 0 <= t_max:
        raise ValueError(f"t range [{t_min}, {t_max}] must straddle 0")
    stream = seed.stream()
    values = np.zeros(t_max - t_min + 1)
    if t_max > 0:
        tau = sample_exponential(1.0 - rho.rho, stream, size=t_max)
        psi = sample_exponential(rho.rho, stream, size=t_max)
        values[-t_min + 1 :] = np.cumsum(tau - psi)
    if t_min < 0:
        tau = sample_exponential(1.0 - rho.rho, stream, size=-t_min)
        psi = sample_exponential(rho.rho, stream, size=-t_min)
        # value(-k) = -sum_{s=-k}^{-1} (tau_s - psi_s), built walking left from 0.
        values[: -t_min] = -np.cumsum(tau - psi)[::-1]
    return BoundaryProfile(rho, t_min, t_max, values)


def flat_profile(t_range: tuple[int, int], rho=0.5) -> BoundaryProfile:
    """Identically-zero antidiagonal profile (flat initial data)."""
    t_min, t_max = int(t_range[0]), int(t_range[1])
    return BoundaryProfile(as_density(rho), t_min, t_max, np.zeros(t_max - t_min + 1))
