"""Synthetic garage fixtures shared between unit and acceptance tests."""
import numpy as np

from garagemap import GridSpec, MapElement, RasterGrid
from garagemap.vectorize import OBSTACLE, PARKING_SPACE


def rect_polygon_world(r0, r1, c0, c1, rows):
    """World polygon of the cell block rows r0..r1, cols c0..c1 (inclusive),
    under the canonical GridSpec with origin (0, rows) and unit cells."""
    top, bottom = rows - r0, rows - (r1 + 1)
    return [(float(c0), top), (float(c1 + 1), top),
            (float(c1 + 1), bottom), (float(c0), bottom)]


def plus_polygon_world(r0, c0, rows, arm=2, size=6):
    """Plus-shaped world polygon: size x size block minus arm-notched corners."""
    n = (size - arm) // 2  # notch depth

    def pt(dr, dc):
        return (float(c0 + dc), float(rows - (r0 + dr)))

    return [pt(0, n), pt(0, n + arm), pt(n, n + arm), pt(n, size),
            pt(n + arm, size), pt(n + arm, n + arm), pt(size, n + arm),
            pt(size, n), pt(n + arm, n), pt(n + arm, 0), pt(n, 0), pt(n, n)]


def make_garage(rng, rows=48, cols=48, n_spaces=4, n_obstacles=2):
    """Random non-overlapping garage: rect parking spaces plus plus-shaped
    obstacles on an open background. Returns (elements, grid_spec)."""
    g = GridSpec((0.0, float(rows)), 1.0, 1.0, rows, cols)
    taken = []  # claimed cell bounding boxes (r0, r1, c0, c1) incl. margin

    def fits(r0, r1, c0, c1):
        if r0 < 2 or c0 < 2 or r1 > rows - 3 or c1 > cols - 3:
            return False
        for (tr0, tr1, tc0, tc1) in taken:
            if not (r1 + 2 < tr0 or tr1 + 2 < r0 or c1 + 2 < tc0 or tc1 + 2 < c0):
                return False
        return True

    elements = []
    next_id = 2  # id 1 is the background pathway produced by extraction
    placed = 0
    for _ in range(200):
        if placed == n_spaces:
            break
        h = int(rng.integers(2, 5))
        w = int(rng.integers(3, 7))
        r0 = int(rng.integers(2, rows - h - 2))
        c0 = int(rng.integers(2, cols - w - 2))
        if not fits(r0, r0 + h - 1, c0, c0 + w - 1):
            continue
        taken.append((r0, r0 + h - 1, c0, c0 + w - 1))
        poly = rect_polygon_world(r0, r0 + h - 1, c0, c0 + w - 1, rows)
        anchor = (c0 + w / 2.0, rows - r0 - h / 2.0)
        elements.append(MapElement(next_id, PARKING_SPACE, poly, tuple(poly), anchor))
        next_id += 1
        placed += 1

    placed = 0
    for _ in range(200):
        if placed == n_obstacles:
            break
        r0 = int(rng.integers(2, rows - 8))
        c0 = int(rng.integers(2, cols - 8))
        if not fits(r0, r0 + 5, c0, c0 + 5):
            continue
        taken.append((r0, r0 + 5, c0, c0 + 5))
        poly = plus_polygon_world(r0, c0, rows)
        anchor = (c0 + 3.0, rows - r0 - 3.0)
        elements.append(MapElement(next_id, OBSTACLE, poly, None, anchor))
        next_id += 1
        placed += 1
    return elements, g


def random_convex_quad(rng, integer=False):
    """Convex quad in consistent winding order.

    integer=True yields a random integer-coordinate parallelogram (useful
    for exact boundary-point construction); otherwise four points sorted by
    angle on a random ellipse.
    """
    if integer:
        ox, oy = (int(v) for v in rng.integers(-20, 20, 2))
        while True:
            ux, uy = (int(v) for v in rng.integers(-10, 11, 2))
            vx, vy = (int(v) for v in rng.integers(-10, 11, 2))
            if ux * vy - uy * vx != 0:
                break
        return [(ox, oy), (ox + ux, oy + uy),
                (ox + ux + vx, oy + uy + vy), (ox + vx, oy + vy)]
    while True:
        cx, cy = rng.uniform(-10, 10, 2)
        a, b = rng.uniform(2, 10, 2)
        angles = np.sort(rng.uniform(0, 2 * np.pi, 4))
        if np.min(np.diff(angles)) < 0.3 or (2 * np.pi - angles[-1] + angles[0]) < 0.3:
            continue  # avoid near-degenerate slivers
        return [(cx + a * np.cos(t), cy + b * np.sin(t)) for t in angles]


def garage_image(rows=36, cols=36):
    """Deterministic white garage image with 3x3 black parking blocks and a
    plus-shaped obstacle, as a grayscale pixel array."""
    img = np.full((rows, cols), 255, dtype=np.uint8)
    for r0, c0 in ((3, 3), (3, 9), (3, 15), (12, 3), (12, 9)):
        img[r0:r0 + 3, c0:c0 + 3] = 0
    # plus-shaped obstacle (6x6 minus 2x2 corners)
    r0, c0 = 20, 20
    img[r0 + 2:r0 + 4, c0:c0 + 6] = 0
    img[r0:r0 + 6, c0 + 2:c0 + 4] = 0
    return RasterGrid(cols, rows, 1, img)
