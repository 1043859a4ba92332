"""Coupled construction of the two stationary representations.

One shifted boundary model (origin moved to (-n, -n)) drives everything:
its passage-time increments along the axes become the boundary weights of a
derived corner model on [0, n]^2, and its passage times to the antidiagonal
through the origin become the boundary profile of a derived line-to-point
model.  On that joint realization the corner model, the line model and the
re-centered shifted passage times agree exactly, site by site, and the exit
coordinate of the corner geodesic equals the last axis meeting of the line
geodesic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .environment import (
    HALF_PLANE,
    STATIONARY_BOUNDARY,
    BoundaryProfile,
    Density,
    WeightField,
    Window,
    as_density,
    build_stationary_boundary_window,
)
from .passage import (
    _forward_table,
    exit_time,
    last_axis_meeting,
    line_table,
)
from .rng import Seed
from .shape import CharacteristicSpec

__all__ = [
    "CoupledPair",
    "EqualityReport",
    "BurkeReport",
    "build_coupled_pair",
    "verify_equality",
    "burke_increment_test",
    "coupled_exit_equality",
]


@dataclass(frozen=True)
class CoupledPair:
    """Joint realization of both stationary representations on [0, n]^2."""

    n: int
    rho: Density
    shifted: WeightField            # corner model anchored at (-n, -n)
    shifted_values: np.ndarray      # forward DP table of the shifted model
    rep_corner: WeightField         # derived boundary representation on [0, n]^2
    rep_line_field: WeightField     # derived half-plane environment on [-n, n]^2
    rep_line_profile: BoundaryProfile

    def __post_init__(self) -> None:
        self.shifted_values.setflags(write=False)

    def shifted_passage(self, x: int, y: int) -> float:
        """Passage time of the shifted model from (-n, -n) to (x, y)."""
        return float(self.shifted_values[y + self.n, x + self.n])


def build_coupled_pair(n: int, rho, seed: Seed) -> CoupledPair:
    """Derive both representations from one shifted-model realization.

    A single forward sweep of the shifted model provides every passage time
    needed: axis increments for the corner model's boundary weights and
    antidiagonal differences for the line model's profile.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    rho = as_density(rho)
    shifted = build_stationary_boundary_window(Window(-n, -n, n, n), rho, seed)
    values = _forward_table(shifted.weights)

    corner = np.zeros((n + 1, n + 1))
    corner[0, 1:] = np.diff(values[n, n:])        # increments along y = 0
    corner[1:, 0] = np.diff(values[n:, n])        # increments along x = 0
    corner[1:, 1:] = shifted.weights[n + 1 :, n + 1 :]
    rep_corner = WeightField(STATIONARY_BOUNDARY, Window(0, 0, n, n), corner, rho=rho)

    half = shifted.weights.copy()
    xs = np.arange(-n, n + 1)
    half[(xs[None, :] + xs[:, None]) <= 0] = 0.0
    rep_line_field = WeightField(HALF_PLANE, Window(-n, -n, n, n), half)

    # profile value at t sits at lattice point (t, -t)
    t = np.arange(-n, n + 1)
    profile_values = values[n - t, n + t] - values[n, n]
    profile_values[n] = 0.0
    rep_line_profile = BoundaryProfile(rho, -n, n, profile_values)

    return CoupledPair(
        n=n,
        rho=rho,
        shifted=shifted,
        shifted_values=values,
        rep_corner=rep_corner,
        rep_line_field=rep_line_field,
        rep_line_profile=rep_line_profile,
    )


@dataclass(frozen=True)
class EqualityReport:
    """Three-way agreement of the coupled passage times over [0, n]^2."""

    n: int
    max_abs_err: float
    max_rel_err: float
    worst_point: tuple[int, int]
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_rel_err < self.tolerance


def verify_equality(pair: CoupledPair, tolerance: float = 1e-9) -> EqualityReport:
    """Check corner = line = re-centered shifted passage times on [0, n]^2.

    The identity is algebraically exact; the tolerance only absorbs
    floating-point summation-order effects.
    """
    n = pair.n
    corner_vals = _forward_table(pair.rep_corner.weights)
    lt = line_table(pair.rep_line_field, pair.rep_line_profile, (n, n))
    line_vals = lt.values[n:, n:]  # subgrid [0, n]^2 of the cone table
    recentered = pair.shifted_values[n:, n:] - pair.shifted_values[n, n]

    diff = np.maximum(np.abs(corner_vals - line_vals), np.abs(corner_vals - recentered))
    scale = np.maximum(1.0, np.abs(corner_vals))
    rel = diff / scale
    j, i = np.unravel_index(int(np.argmax(rel)), rel.shape)
    return EqualityReport(
        n=n,
        max_abs_err=float(diff[j, i]),
        max_rel_err=float(rel[j, i]),
        worst_point=(int(i), int(j)),
        tolerance=tolerance,
    )


@dataclass(frozen=True)
class BurkeReport:
    """Pooled KS results for the derived boundary increments."""

    rho: float
    n: int
    replicates: int
    p_x: float                  # x-axis increments vs exp(1-rho)
    p_y: float                  # y-axis increments vs exp(rho)
    control_p_x: float          # x-axis increments vs the wrong rate (exp(rho))
    mean_x: float
    mean_y: float
    se_x: float
    se_y: float

    @property
    def ok(self) -> bool:
        return self.p_x > 0.01 and self.p_y > 0.01


def burke_increment_test(rho, n: int, replicates: int, seed: Seed) -> BurkeReport:
    """Pool derived boundary increments over replicates and KS-test the marginals.

    The derived corner model's x-axis weights should be i.i.d. exp(1-rho) and
    its y-axis weights i.i.d. exp(rho), independent of the shifted model's
    interior.  ``control_p_x`` tests the x increments against the mismatched
    rate as a power check; it should reject for rho != 1/2.
    """
    rho = as_density(rho)
    xs = np.empty((replicates, n))
    ys = np.empty((replicates, n))
    for rep in range(replicates):
        pair = build_coupled_pair(n, rho, seed.replicate(rep))
        xs[rep] = pair.rep_corner.weights[0, 1:]
        ys[rep] = pair.rep_corner.weights[1:, 0]
    xs = xs.ravel()
    ys = ys.ravel()
    p_x = stats.kstest(xs, "expon", args=(0.0, 1.0 / (1.0 - rho.rho))).pvalue
    p_y = stats.kstest(ys, "expon", args=(0.0, 1.0 / rho.rho)).pvalue
    control = stats.kstest(xs, "expon", args=(0.0, 1.0 / rho.rho)).pvalue
    return BurkeReport(
        rho=rho.rho,
        n=n,
        replicates=replicates,
        p_x=float(p_x),
        p_y=float(p_y),
        control_p_x=float(control),
        mean_x=float(xs.mean()),
        mean_y=float(ys.mean()),
        se_x=float(xs.std(ddof=1) / np.sqrt(xs.size)),
        se_y=float(ys.std(ddof=1) / np.sqrt(ys.size)),
    )


def coupled_exit_equality(pair: CoupledPair, spec: CharacteristicSpec) -> bool:
    """Exit coordinate (corner model) vs last axis meeting (line model).

    Both are computed on the same coupled realization and must agree exactly,
    barring floating-point ties (measure zero for continuous weights).
    """
    cx, cy = spec.v
    if cx > pair.n or cy > pair.n:
        raise ValueError(f"characteristic point ({cx}, {cy}) outside the coupled window")
    z = exit_time(pair.rep_corner, spec).z
    q = last_axis_meeting(pair.rep_line_field, pair.rep_line_profile, (cx, cy))
    return z == q
