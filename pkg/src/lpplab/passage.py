"""Dynamic-programming passage times, geodesics and exit times.

The passage time from u to v is the maximum, over monotone up-right lattice
paths, of the sum of site weights including both endpoints.  The dynamic
program realizes the recurrence value(w) = weight(w) + max over the two
predecessors; each row is evaluated with a vectorized prefix-max scan so a
sweep costs O(cells) with numpy-sized constants.

Unreachable endpoint pairs (u not coordinate-wise below v) are reported with
the module-level ``UNREACHABLE`` marker.  It is a return value only: no
infinity ever enters DP arithmetic, so NaNs cannot arise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .environment import (
    DEFAULT_CELL_BUDGET,
    HALF_PLANE,
    STATIONARY_BOUNDARY,
    BoundaryProfile,
    WeightField,
    Window,
)
from .shape import CharacteristicSpec

__all__ = [
    "UNREACHABLE",
    "PassageTable",
    "GeodesicPath",
    "ExitRecord",
    "LineTable",
    "passage_point_to_point",
    "brute_force_passage",
    "passage_stationary_boundary",
    "passage_point_to_line",
    "forward_table",
    "line_table",
    "backtrack_geodesic",
    "backtrack_line_geodesic",
    "exit_time",
    "last_axis_meeting",
]

UNREACHABLE = float("-inf")

# brute_force_passage refuses instances beyond this many enumerated paths.
_MAX_BRUTE_PATHS = 2_000_000
_MAX_BRUTE_STEPS = 24


# ---------------------------------------------------------------------------
# DP kernels


def _forward_rows(w: np.ndarray):
    """Yield successive rows of the corner-anchored forward DP table."""
    prev = np.cumsum(w[0])
    yield prev
    for j in range(1, w.shape[0]):
        c = np.cumsum(w[j])
        prev = c + np.maximum.accumulate(prev - c + w[j])
        yield prev


def _forward_value(w: np.ndarray) -> float:
    for row in _forward_rows(w):
        pass
    return float(row[-1])


def _forward_table(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    for j, row in enumerate(_forward_rows(w)):
        out[j] = row
    return out


def _backward_interior_edges(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Backward DP to the far corner of ``w``; keeps only the edge values.

    Returns ``(bottom_row, left_col)``: the values of the backward table on
    its bottom row and left column.  Memory is O(width): rows are rolled.
    """
    ny, nx = w.shape
    left_col = np.empty(ny)
    cur = None
    for j in range(ny - 1, -1, -1):
        c = np.cumsum(w[j, ::-1])[::-1]
        if cur is None:
            cur = c
        else:
            d = cur - c + w[j]
            cur = c + np.maximum.accumulate(d[::-1])[::-1]
        left_col[j] = cur[0]
    return cur, left_col


# ---------------------------------------------------------------------------
# Result containers


@dataclass(frozen=True)
class PassageTable:
    """Forward DP values over a rectangular window anchored at its corner."""

    field: WeightField
    window: Window
    values: np.ndarray
    source: tuple[int, int]
    direction: str = "forward"

    def __post_init__(self) -> None:
        self.values.setflags(write=False)

    def value_at(self, x: int, y: int) -> float:
        if not self.window.contains(x, y):
            raise ValueError(f"point ({x}, {y}) outside table window {self.window}")
        return float(self.values[y - self.window.y0, x - self.window.x0])


@dataclass(frozen=True)
class GeodesicPath:
    """Maximizing up-right path; consecutive points differ by e1 or e2."""

    points: tuple[tuple[int, int], ...]

    def weight_sum(self, field: WeightField) -> float:
        return float(sum(field.weight_at(x, y) for x, y in self.points))

    def last_axis_point(self) -> tuple[int, int] | None:
        for x, y in reversed(self.points):
            if x == 0 or y == 0:
                return (x, y)
        return None


@dataclass(frozen=True)
class ExitRecord:
    """Exit coordinate of the stationary geodesic and the attained maximum.

    ``z`` is the signed coordinate at which the best axis-then-interior path
    decomposition attains its maximum: positive for an exit along the bottom
    row, negative along the left column.  ``value`` equals the stationary
    passage time to the characteristic point (exact decomposition identity).
    """

    z: int
    value: float
    argmax_point: tuple[int, int]

    def __post_init__(self) -> None:
        if self.z == 0:
            raise ValueError("exit coordinate cannot be 0")


# ---------------------------------------------------------------------------
# Point-to-point


def _check_in_window(field: WeightField, p: tuple[int, int], name: str) -> None:
    if not field.window.contains(*p):
        raise ValueError(f"{name} = {p} outside field window {field.window}")


def passage_point_to_point(field: WeightField, u: tuple[int, int], v: tuple[int, int]) -> float:
    """Maximal path weight from u to v, both endpoints included.

    Returns ``UNREACHABLE`` when u is not coordinate-wise below v.
    """
    _check_in_window(field, u, "u")
    _check_in_window(field, v, "v")
    if u[0] > v[0] or u[1] > v[1]:
        return UNREACHABLE
    w0 = field.window
    sl = field.weights[u[1] - w0.y0 : v[1] - w0.y0 + 1, u[0] - w0.x0 : v[0] - w0.x0 + 1]
    return _forward_value(sl)


_path_cache: dict[tuple[int, int], np.ndarray] = {}


def _enumerated_paths(dx: int, dy: int) -> np.ndarray:
    """All up-right paths from (0,0) to (dx,dy) as flat site indices."""
    key = (dx, dy)
    if key not in _path_cache:
        steps = dx + dy
        n_paths = comb(steps, dy)
        idx = np.empty((n_paths, steps + 1), dtype=np.int64)
        for p, ups in enumerate(itertools.combinations(range(steps), dy)):
            x = y = 0
            idx[p, 0] = 0
            up_set = set(ups)
            for s in range(steps):
                if s in up_set:
                    y += 1
                else:
                    x += 1
                idx[p, s + 1] = y * (dx + 1) + x
        _path_cache[key] = idx
    return _path_cache[key]


def brute_force_passage(field: WeightField, u: tuple[int, int], v: tuple[int, int]) -> float:
    """Exact maximum by explicit enumeration of every up-right path.

    Testing oracle: shares no code with the DP sweep.  Refuses instances with
    more than 24 steps or an enumeration beyond the path budget.
    """
    _check_in_window(field, u, "u")
    _check_in_window(field, v, "v")
    if u[0] > v[0] or u[1] > v[1]:
        return UNREACHABLE
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx + dy > _MAX_BRUTE_STEPS or comb(dx + dy, dy) > _MAX_BRUTE_PATHS:
        raise ValueError(f"brute force refused: {dx + dy} steps, {comb(dx + dy, dy)} paths")
    w0 = field.window
    sl = field.weights[u[1] - w0.y0 : v[1] - w0.y0 + 1, u[0] - w0.x0 : v[0] - w0.x0 + 1]
    flat = np.ascontiguousarray(sl).ravel()
    return float(flat[_enumerated_paths(dx, dy)].sum(axis=1).max())


# ---------------------------------------------------------------------------
# Stationary boundary model


def _check_stationary(field: WeightField) -> None:
    if field.variant != STATIONARY_BOUNDARY:
        raise ValueError(f"expected a StationaryBoundary field, got {field.variant}")


def passage_stationary_boundary(field: WeightField, v: tuple[int, int]) -> float:
    """Stationary passage time from the window corner to v (corner weight 0)."""
    _check_stationary(field)
    _check_in_window(field, v, "v")
    w0 = field.window
    return _forward_value(field.weights[: v[1] - w0.y0 + 1, : v[0] - w0.x0 + 1])


def forward_table(field: WeightField, cell_budget: int = DEFAULT_CELL_BUDGET) -> PassageTable:
    """Materialized forward DP table from the window corner (for backtracking)."""
    if field.window.cells > cell_budget:
        raise ValueError(f"table of {field.window.cells} cells exceeds budget {cell_budget}")
    values = _forward_table(field.weights)
    return PassageTable(
        field=field,
        window=field.window,
        values=values,
        source=(field.window.x0, field.window.y0),
    )


def backtrack_geodesic(table: PassageTable, v: tuple[int, int]) -> GeodesicPath:
    """Greedy backtrack from v to the table source; ties go to the e1 predecessor."""
    if table.direction != "forward":
        raise ValueError("backtracking needs a forward table")
    if not table.window.contains(*v):
        raise ValueError(f"point {v} not covered by the table")
    x0, y0 = table.source
    x, y = v
    rev = [(x, y)]
    while (x, y) != (x0, y0):
        if x == x0:
            y -= 1
        elif y == y0:
            x -= 1
        elif table.value_at(x - 1, y) >= table.value_at(x, y - 1):
            x -= 1
        else:
            y -= 1
        rev.append((x, y))
    return GeodesicPath(points=tuple(reversed(rev)))


def exit_time(field: WeightField, spec: CharacteristicSpec) -> ExitRecord:
    """Exit coordinate of the stationary geodesic to the characteristic point.

    One backward sweep over the interior records, for every axis site, the
    interior passage time from the site just above/right of it to the
    characteristic point; adding the axis prefix sums and maximizing over the
    signed exit coordinate reproduces the stationary passage time exactly.
    Exact floating-point ties are resolved toward the larger signed
    coordinate, so reruns are reproducible.
    """
    _check_stationary(field)
    if field.window.x0 != 0 or field.window.y0 != 0:
        raise ValueError("exit_time expects a field anchored at the origin")
    cx, cy = spec.v
    if not field.window.contains(cx, cy):
        raise ValueError(f"characteristic point ({cx}, {cy}) outside field window {field.window}")
    w = field.weights
    sx = np.cumsum(w[0, 1 : cx + 1])
    sy = np.cumsum(w[1 : cy + 1, 0])
    bottom, left = _backward_interior_edges(w[1 : cy + 1, 1 : cx + 1])
    vals = np.concatenate([(sx + bottom)[::-1], sy + left])
    signed = np.concatenate([np.arange(cx, 0, -1), -np.arange(1, cy + 1)])
    k = int(np.argmax(vals))
    z = int(signed[k])
    return ExitRecord(z=z, value=float(vals[k]), argmax_point=(z, 0) if z > 0 else (0, -z))


# ---------------------------------------------------------------------------
# Line-to-point model


@dataclass(frozen=True)
class LineTable:
    """DP values for paths started on the antidiagonal with profile weights.

    Stored densely over the bounding rectangle of the backward cone of ``v``;
    cells below the line are NaN padding and are never read.
    """

    field: WeightField
    profile: BoundaryProfile
    v: tuple[int, int]
    x_lo: int
    y_lo: int
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values.setflags(write=False)

    def value_at(self, x: int, y: int) -> float:
        if x + y < 0 or x > self.v[0] or y > self.v[1] or x < self.x_lo or y < self.y_lo:
            raise ValueError(f"point ({x}, {y}) outside the cone of {self.v}")
        return float(self.values[y - self.y_lo, x - self.x_lo])


def _check_line_inputs(field: WeightField, profile: BoundaryProfile, v: tuple[int, int]):
    if field.variant != HALF_PLANE:
        raise ValueError(f"expected a HalfPlane field, got {field.variant}")
    vx, vy = v
    if vx + vy <= 0:
        raise ValueError(f"target {v} must lie strictly above the line x + y = 0")
    if not profile.covers(-vy, vx):
        raise ValueError(
            f"profile range [{profile.t_min}, {profile.t_max}] does not cover the "
            f"backward cone [{-vy}, {vx}] of {v}"
        )
    need = Window(-vy, -vx, vx, vy)
    w0 = field.window
    if not (w0.x0 <= need.x0 and w0.y0 <= need.y0 and w0.x1 >= need.x1 and w0.y1 >= need.y1):
        raise ValueError(f"field window {w0} does not cover the cone {need} of {v}")
    return vx, vy


def _line_dp_rows(field: WeightField, profile: BoundaryProfile, vx: int, vy: int):
    """Yield (row_y, col_offset, values) for the cone DP, bottom row first."""
    w0 = field.window
    x_lo = -vy
    prev = None
    for y in range(-vx, vy + 1):
        i0 = -y - x_lo  # column index of the line cell (x = -y)
        wr = field.weights[y - w0.y0, -y - w0.x0 : vx - w0.x0 + 1]
        c = np.cumsum(wr)
        entry = np.empty(wr.shape[0])
        entry[0] = profile.value(-y)
        if prev is not None:
            entry[1:] = prev
        row = c + np.maximum.accumulate(entry - c + wr)
        yield y, i0, row
        prev = row


def passage_point_to_line(
    field: WeightField, profile: BoundaryProfile, v: tuple[int, int]
) -> float:
    """max over line points u of profile(u) + passage(u, v), rolling-row memory."""
    vx, vy = _check_line_inputs(field, profile, v)
    for _, _, row in _line_dp_rows(field, profile, vx, vy):
        pass
    return float(row[-1])


def line_table(
    field: WeightField,
    profile: BoundaryProfile,
    v: tuple[int, int],
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> LineTable:
    vx, vy = _check_line_inputs(field, profile, v)
    span = vx + vy + 1
    if span * span > cell_budget:
        raise ValueError(f"line table of {span * span} cells exceeds budget {cell_budget}")
    values = np.full((span, span), np.nan)
    for y, i0, row in _line_dp_rows(field, profile, vx, vy):
        values[y + vx, i0:] = row
    return LineTable(field=field, profile=profile, v=v, x_lo=-vy, y_lo=-vx, values=values)


def backtrack_line_geodesic(table: LineTable) -> GeodesicPath:
    """Backtrack from the table target to the antidiagonal; e1 wins ties."""
    x, y = table.v
    rev = [(x, y)]
    while x + y > 0:
        left_ok = x - 1 >= -y
        down_ok = x + (y - 1) >= 0
        if left_ok and down_ok:
            if table.value_at(x - 1, y) >= table.value_at(x, y - 1):
                x -= 1
            else:
                y -= 1
        elif left_ok:
            x -= 1
        else:
            y -= 1
        rev.append((x, y))
    return GeodesicPath(points=tuple(reversed(rev)))


def last_axis_meeting(
    field: WeightField,
    profile: BoundaryProfile,
    v: tuple[int, int],
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> int:
    """Signed coordinate of the last coordinate-axis point on the line geodesic.

    Positive when the last meeting is on the horizontal axis, negative on the
    vertical axis.  The geodesic to a target with positive coordinates always
    crosses an axis; a truncated cone that breaks this is reported, not
    patched over.
    """
    path = backtrack_line_geodesic(line_table(field, profile, v, cell_budget))
    p = path.last_axis_point()
    if p is None:
        raise ValueError(f"geodesic to {v} never meets a coordinate axis (truncated cone?)")
    x, y = p
    if x == 0 and y == 0:
        raise ValueError("geodesic meets the axes only at the origin (degenerate instance)")
    return x if y == 0 else -y
