"""Vector-to-raster conversion: line rasterization, grid sampling, fill, IDW."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError
from .geometry import GridSpec, Point, points_in_polygon, world_to_cell
from .raster import BitGrid
from .vectorize import OBSTACLE, PARKING_SPACE, _signed_area

__all__ = [
    "Sample",
    "rasterize_point",
    "line_eight_direction",
    "line_full_path",
    "polygon_grid_sample",
    "polygon_fill",
    "idw_interpolate",
    "raster_from_elements",
]


@dataclass(frozen=True)
class Sample:
    """A known data point: world location plus scalar attribute value."""

    location: Point
    value: float


def rasterize_point(p: Point, g: GridSpec) -> tuple[int, int]:
    """Map a world point to its raster cell (row, col). Same contract as
    world_to_cell; exists as the named point-rasterization operation."""
    return world_to_cell(p, g)


def line_eight_direction(c0, c1):
    """Eight-direction line: exactly one cell per column (shallow lines)
    or per row (steep lines), rounding half up toward the larger index.
    Exact diagonals count as shallow. Output runs from c0 to c1."""
    i0, j0 = c0
    i1, j1 = c1
    di, dj = i1 - i0, j1 - j0
    cells = []
    if abs(dj) >= abs(di):
        if dj == 0:
            return [(i0, j0)]
        step = 1 if dj > 0 else -1
        for k in range(abs(dj) + 1):
            j = j0 + k * step
            cells.append((math.floor(i0 + (j - j0) * di / dj + 0.5), j))
    else:
        step = 1 if di > 0 else -1
        for k in range(abs(di) + 1):
            i = i0 + k * step
            cells.append((i, math.floor(j0 + (i - i0) * dj / di + 0.5)))
    return cells


def line_full_path(c0, c1):
    """Supercover line: every cell whose closed square the center-to-center
    segment touches, including all four cells at an exact corner crossing.

    Computed with exact integer arithmetic on doubled coordinates (cell
    (I, J) spans [2J, 2J+2] x [2I, 2I+2], centers at odd integers). Output
    is ordered from c0 to c1 (column-major along the travel direction).
    """
    i0, j0 = c0
    i1, j1 = c1
    if c0 == c1:
        return [c0]
    sj = 1 if j1 >= j0 else -1
    si = 1 if i1 >= i0 else -1
    if j0 == j1:
        cells = {(i, j0) for i in range(min(i0, i1), max(i0, i1) + 1)}
    else:
        a0, b0 = (i0, j0), (i1, j1)
        if j0 > j1:
            a0, b0 = b0, a0
        x0, y0 = 2 * a0[1] + 1, 2 * a0[0] + 1
        x1, y1 = 2 * b0[1] + 1, 2 * b0[0] + 1
        dx, dy = x1 - x0, y1 - y0  # dx > 0
        cells = set()
        for j in range(a0[1], b0[1] + 1):
            xl = max(2 * j, x0)
            xr = min(2 * j + 2, x1)
            nl = y0 * dx + (xl - x0) * dy
            nr = y0 * dx + (xr - x0) * dy
            lo, hi = (nl, nr) if nl <= nr else (nr, nl)
            imax = hi // (2 * dx)
            imin = -((-(lo - 2 * dx)) // (2 * dx))
            for i in range(imin, imax + 1):
                cells.add((i, j))
    return sorted(cells, key=lambda c: (c[1] * sj, c[0] * si))


def polygon_grid_sample(poly, interval_x: float, interval_y: float, origin: Point):
    """Lattice points origin + (m ix, n iy) falling inside the polygon.

    The lattice is clipped to the polygon's bounding box and filtered with a
    boundary-inclusive containment test. Iteration is row-major from the
    bounding box's minimum corner. Degenerate (zero-area) polygons yield [].
    """
    if interval_x <= 0 or interval_y <= 0:
        raise ValueError("sampling intervals must be positive")
    if abs(_signed_area(poly)) == 0.0:
        return []
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    ox, oy = origin
    m_lo = math.ceil((min(xs) - ox) / interval_x)
    m_hi = math.floor((max(xs) - ox) / interval_x)
    n_lo = math.ceil((min(ys) - oy) / interval_y)
    n_hi = math.floor((max(ys) - oy) / interval_y)
    if m_lo > m_hi or n_lo > n_hi:
        return []
    gx = ox + interval_x * np.arange(m_lo, m_hi + 1)
    gy = oy + interval_y * np.arange(n_lo, n_hi + 1)
    xx, yy = np.meshgrid(gx, gy)
    mask = points_in_polygon(poly, xx, yy)
    return [(float(x), float(y)) for x, y in zip(xx[mask], yy[mask])]


def polygon_fill(poly, g: GridSpec):
    """Scanline fill: cells of g whose center lies inside the polygon
    (boundary inclusive), in row-major order."""
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    x0, y0 = g.origin
    j_lo = max(0, math.floor((min(xs) - x0) / g.cell_dx) - 1)
    j_hi = min(g.cols - 1, math.ceil((max(xs) - x0) / g.cell_dx) + 1)
    i_lo = max(0, math.floor((y0 - max(ys)) / g.cell_dy) - 1)
    i_hi = min(g.rows - 1, math.ceil((y0 - min(ys)) / g.cell_dy) + 1)
    if j_lo > j_hi or i_lo > i_hi:
        return []
    jj = np.arange(j_lo, j_hi + 1)
    ii = np.arange(i_lo, i_hi + 1)
    cx = x0 + (jj + 0.5) * g.cell_dx
    cy = y0 - (ii + 0.5) * g.cell_dy
    xx, yy = np.meshgrid(cx, cy)
    mask = points_in_polygon(poly, xx, yy)
    out = []
    for r in range(mask.shape[0]):
        row = mask[r]
        for c in range(mask.shape[1]):
            if row[c]:
                out.append((int(ii[r]), int(jj[c])))
    return out


def idw_interpolate(samples, query: Point, power: float = 2.0) -> float:
    """Inverse distance weighting: sum(w v) / sum(w) with w = 1 / d^power.

    A query closer than 1e-12 to a sample returns that sample's value
    exactly. Raises ValueError for an empty sample list or power <= 0.
    """
    if not samples:
        raise ValueError("idw_interpolate needs at least one sample")
    if power <= 0:
        raise ValueError("power must be positive")
    qx, qy = query
    num = den = 0.0
    for s in samples:
        d = math.hypot(s.location[0] - qx, s.location[1] - qy)
        if d < 1e-12:
            return s.value
        w = 1.0 / d ** power
        num += w * s.value
        den += w
    return num / den


def raster_from_elements(elements, g: GridSpec) -> BitGrid:
    """Reconstruct an occupancy raster from vector elements.

    ParkingSpace and Obstacle polygons are filled with 1; pathways and
    unclaimed cells stay 0. Geometry outside g's extent raises BoundsError
    naming the element id.
    """
    bits = np.zeros((g.rows, g.cols), dtype=np.uint8)
    x0, y0 = g.origin
    x_max = x0 + g.cols * g.cell_dx
    y_min = y0 - g.rows * g.cell_dy
    for el in sorted(elements, key=lambda e: e.id):
        if el.kind not in (PARKING_SPACE, OBSTACLE):
            continue
        xs = [p[0] for p in el.geometry]
        ys = [p[1] for p in el.geometry]
        if min(xs) < x0 or max(xs) > x_max or min(ys) < y_min or max(ys) > y0:
            raise BoundsError(f"element {el.id} geometry outside grid extent")
        for i, j in polygon_fill(el.geometry, g):
            bits[i, j] = 1
    return BitGrid(g.cols, g.rows, bits)
