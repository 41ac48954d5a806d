"""Planar geometry: edge tests, quads, affine pixel-to-world fitting, grid coordinates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, GeometryError, SingularFitError

__all__ = [
    "Point",
    "AffineTransform",
    "GridSpec",
    "edge_cross",
    "point_in_quad",
    "quad_center",
    "fit_affine",
    "apply_affine",
    "world_to_cell",
    "cell_to_world",
    "grid_to_world_transform",
    "point_on_segment",
    "point_in_polygon",
    "points_in_polygon",
]

Point = tuple[float, float]


def edge_cross(a: Point, b: Point, p: Point) -> float:
    """Signed side test for point p against the directed edge a -> b.

    Returns (bx-ax)(py-ay) - (px-ax)(by-ay): zero when collinear, and the
    sign flips when a and b are swapped.
    """
    return (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])


def _quad_signed_area(quad) -> float:
    s = 0.0
    for i in range(4):
        x1, y1 = quad[i]
        x2, y2 = quad[(i + 1) % 4]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def point_in_quad(quad, p: Point) -> bool:
    """Boundary-inclusive containment test for a convex quad.

    The point is inside iff the four directed-edge side tests all agree in
    sign (zeros allowed). Raises GeometryError for a zero-area quad.
    """
    if len(quad) != 4:
        raise GeometryError("quad must have exactly 4 vertices")
    if _quad_signed_area(quad) == 0.0:
        raise GeometryError("degenerate quad (zero area)")
    signs = [edge_cross(quad[i], quad[(i + 1) % 4], p) for i in range(4)]
    return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)


def quad_center(quad) -> Point:
    """Arithmetic mean of the four vertices (the true center for parallelograms)."""
    x = sum(v[0] for v in quad) / 4.0
    y = sum(v[1] for v in quad) / 4.0
    return (x, y)


@dataclass(frozen=True)
class AffineTransform:
    """Planar affine model x' = a x + b y + c, y' = d x + e y + f."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def determinant(self) -> float:
        return self.a * self.e - self.b * self.d


def apply_affine(t: AffineTransform, p: Point) -> Point:
    x, y = p
    return (t.a * x + t.b * y + t.c, t.d * x + t.e * y + t.f)


def fit_affine(pairs) -> AffineTransform:
    """Least-squares affine fit from (pixel, world) point pairs.

    Solves the two independent 3-parameter linear systems; exact for three
    non-collinear pairs. Raises SingularFitError when the pixel points are
    collinear (rank deficient), ValueError when fewer than 3 pairs are given.
    """
    if len(pairs) < 3:
        raise ValueError("fit_affine needs at least 3 control-point pairs")
    src = np.array([[px, py, 1.0] for (px, py), _ in pairs], dtype=np.float64)
    dst = np.array([[wx, wy] for _, (wx, wy) in pairs], dtype=np.float64)
    sol, _, rank, _ = np.linalg.lstsq(src, dst, rcond=None)
    if rank < 3:
        raise SingularFitError("control points are collinear or rank deficient")
    a, b, c = sol[:, 0]
    d, e, f = sol[:, 1]
    return AffineTransform(float(a), float(b), float(c), float(d), float(e), float(f))


@dataclass(frozen=True)
class GridSpec:
    """Binding between world coordinates and raster cells.

    `origin` is the world position of the raster's top-left corner; row index
    I increases downward (decreasing world y), column index J increases
    rightward (increasing world x).
    """

    origin: Point
    cell_dx: float
    cell_dy: float
    rows: int
    cols: int

    def __post_init__(self):
        if self.cell_dx <= 0 or self.cell_dy <= 0:
            raise ValueError("cell dimensions must be positive")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")


def world_to_cell(p: Point, g: GridSpec) -> tuple[int, int]:
    """Map a world point to its (row I, col J) cell via floor semantics."""
    x0, y0 = g.origin
    j = math.floor((p[0] - x0) / g.cell_dx)
    i = math.floor((y0 - p[1]) / g.cell_dy)
    if not (0 <= i < g.rows and 0 <= j < g.cols):
        raise BoundsError(f"point {p} outside grid extent (cell ({i}, {j}))", cell=(i, j))
    return i, j


def cell_to_world(i: int, j: int, g: GridSpec) -> Point:
    """World coordinates of the center of cell (i, j)."""
    if not (0 <= i < g.rows and 0 <= j < g.cols):
        raise BoundsError(f"cell ({i}, {j}) out of range", cell=(i, j))
    x0, y0 = g.origin
    return (x0 + (j + 0.5) * g.cell_dx, y0 - (i + 0.5) * g.cell_dy)


def grid_to_world_transform(g: GridSpec) -> AffineTransform:
    """Affine taking continuous pixel coordinates (x=col, y=row, y down) to world."""
    x0, y0 = g.origin
    return AffineTransform(g.cell_dx, 0.0, x0, 0.0, -g.cell_dy, y0)


def point_on_segment(a: Point, b: Point, p: Point) -> bool:
    """True iff p lies on the closed segment a-b."""
    if edge_cross(a, b, p) != 0.0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def points_in_polygon(poly, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized boundary-inclusive point-in-polygon (ray casting + on-edge).

    `poly` is an implicitly closed vertex sequence; xs/ys are equal-shape
    arrays of query coordinates. Returns a boolean array.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = np.zeros(xs.shape, dtype=bool)
    on_edge = np.zeros(xs.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        cross = (x2 - x1) * (ys - y1) - (xs - x1) * (y2 - y1)
        on_seg = ((cross == 0.0)
                  & (xs >= min(x1, x2)) & (xs <= max(x1, x2))
                  & (ys >= min(y1, y2)) & (ys <= max(y1, y2)))
        on_edge |= on_seg
        # Half-open vertical rule so a crossing at a shared vertex counts once.
        straddles = (y1 <= ys) != (y2 <= ys)
        if y2 != y1:
            x_hit = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddles & (xs < x_hit)
    return inside | on_edge


def point_in_polygon(poly, p: Point) -> bool:
    """Scalar boundary-inclusive point-in-polygon test."""
    return bool(points_in_polygon(poly, np.array([p[0]]), np.array([p[1]]))[0])
