"""Raster-to-vector conversion: components, contours, hulls, rectangles, classification."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import GeometryError, NotFoundError
from .geometry import (AffineTransform, Point, apply_affine, point_in_polygon,
                       quad_center)
from .raster import BitGrid

__all__ = [
    "LabelGrid",
    "MapElement",
    "ClassifyParams",
    "PARKING_SPACE",
    "PATHWAY",
    "OBSTACLE",
    "connected_components",
    "trace_contour",
    "simplify_polygon",
    "convex_hull",
    "polygon_metrics",
    "polygon_centroid",
    "detect_rectangle",
    "extract_elements",
    "transform_element",
    "element_to_json",
    "element_from_json",
]

PARKING_SPACE = "ParkingSpace"
PATHWAY = "Pathway"
OBSTACLE = "Obstacle"

# A candidate quadrilateral must cover at least this fraction of its convex
# hull's area to count as "the hull is a quadrilateral". Rasterizing a
# rotated rectangle erodes its corners (cell centers near a tip fall
# outside), so a true rectangle's best inscribed quad typically covers only
# ~0.85 of the hull at small sizes; 0.8 accepts those while still rejecting
# plus shapes (~0.71) and leaving L/T shapes to the interior-angle gate.
_RECT_HULL_COVERAGE = 0.8


@dataclass
class LabelGrid:
    """Row-major component ids; 0 = unlabeled. Ids are contiguous 1..n_components."""

    width: int
    height: int
    labels: list  # nested lists [row][col]
    n_components: int


def connected_components(grid: BitGrid, target: int, connectivity: int = 4) -> LabelGrid:
    """Label all cells equal to `target` using two-pass union-find.

    Final labels follow first-encounter raster-scan order, so output is
    deterministic. Non-target cells get label 0.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    h, w = grid.height, grid.width
    cells = grid.bits.tolist()
    labels = [[0] * w for _ in range(h)]
    parent = [0]

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    nxt = 1
    diag = connectivity == 8
    for r in range(h):
        row = cells[r]
        lab_row = labels[r]
        above = labels[r - 1] if r > 0 else None
        for c in range(w):
            if row[c] != target:
                continue
            best = 0
            if c > 0 and lab_row[c - 1]:
                best = lab_row[c - 1]
            if above is not None:
                if above[c]:
                    best = above[c] if best == 0 else min(best, above[c])
                if diag:
                    if c > 0 and above[c - 1]:
                        best = above[c - 1] if best == 0 else min(best, above[c - 1])
                    if c + 1 < w and above[c + 1]:
                        best = above[c + 1] if best == 0 else min(best, above[c + 1])
            if best == 0:
                parent.append(nxt)
                lab_row[c] = nxt
                nxt += 1
            else:
                root = find(best)
                lab_row[c] = root
                if c > 0 and lab_row[c - 1]:
                    parent[find(lab_row[c - 1])] = root
                if above is not None:
                    if above[c]:
                        parent[find(above[c])] = root
                    if diag:
                        if c > 0 and above[c - 1]:
                            parent[find(above[c - 1])] = root
                        if c + 1 < w and above[c + 1]:
                            parent[find(above[c + 1])] = root

    remap = {}
    count = 0
    for r in range(h):
        lab_row = labels[r]
        for c in range(w):
            lab = lab_row[c]
            if lab == 0:
                continue
            root = find(lab)
            final = remap.get(root)
            if final is None:
                count += 1
                final = count
                remap[root] = final
            lab_row[c] = final
    return LabelGrid(w, h, labels, count)


# Right-hand cell offsets for a boundary edge leaving vertex (x, y) in
# direction d, with the component kept on the right (clockwise on screen).
def _edge_cells(x, y, d):
    if d == (1, 0):
        return (y, x), (y - 1, x)
    if d == (0, 1):
        return (y, x - 1), (y, x)
    if d == (-1, 0):
        return (y - 1, x - 1), (y, x - 1)
    return (y - 1, x), (y - 1, x - 1)  # d == (0, -1)


def trace_contour(lg: LabelGrid, comp_id: int):
    """Outer boundary of one component as a closed cell-corner polygon.

    Starts at the top-left corner of the topmost-then-leftmost component
    cell and walks clockwise (screen orientation, y down) keeping the
    component on the right. Collinear vertices are merged, so the shoelace
    area of the result equals the component's cell count for hole-free
    components.
    """
    labels = lg.labels
    h, w = lg.height, lg.width
    start_cell = None
    for r in range(h):
        row = labels[r]
        for c in range(w):
            if row[c] == comp_id:
                start_cell = (r, c)
                break
        if start_cell:
            break
    if start_cell is None:
        raise NotFoundError(f"component id {comp_id} not present")

    def in_comp(cell):
        r, c = cell
        return 0 <= r < h and 0 <= c < w and labels[r][c] == comp_id

    def edge_ok(v, d):
        right, left = _edge_cells(v[0], v[1], d)
        return in_comp(right) and not in_comp(left)

    start = (start_cell[1], start_cell[0])
    v = start
    d = (1, 0)
    verts = []
    limit = 4 * (w + 1) * (h + 1) + 4
    for _ in range(limit):
        verts.append(v)
        dx, dy = d
        for nd in ((dy, -dx), (dx, dy), (-dy, dx), (-dx, -dy)):
            if edge_ok(v, nd):
                d = nd
                v = (v[0] + nd[0], v[1] + nd[1])
                break
        else:
            raise GeometryError("contour walk stuck (corrupt label grid)")
        if v == start:
            break
    else:
        raise GeometryError("contour walk did not close")

    # Merge collinear lattice vertices.
    out = []
    n = len(verts)
    for i in range(n):
        px, py = verts[i - 1]
        cx, cy = verts[i]
        nx, ny = verts[(i + 1) % n]
        if (cx - px) * (ny - cy) != (cy - py) * (nx - cx):
            out.append((float(cx), float(cy)))
    return out


def _line_distance(p, a, b):
    """Perpendicular distance from p to the line through a and b."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    return abs(dx * (p[1] - ay) - dy * (p[0] - ax)) / norm


def _dp_chain(poly, i, j, epsilon, keep):
    """Douglas-Peucker over ring indices i..j (i < j), marking kept indices."""
    if j - i < 2:
        return
    a, b = poly[i % len(poly)], poly[j % len(poly)]
    best, best_k = -1.0, None
    for k in range(i + 1, j):
        dist = _line_distance(poly[k % len(poly)], a, b)
        if dist > best:
            best, best_k = dist, k
    if best > epsilon:
        keep.add(best_k % len(poly))
        _dp_chain(poly, i, best_k, epsilon, keep)
        _dp_chain(poly, best_k, j, epsilon, keep)


def simplify_polygon(poly, epsilon: float):
    """Douglas-Peucker simplification of a closed ring.

    Every removed vertex lies within `epsilon` of the simplified ring; the
    result is a vertex subset with at least 3 vertices. epsilon = 0 removes
    exactly-collinear vertices only.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    n = len(poly)
    if n <= 3:
        return list(poly)
    anchor = max(range(1, n), key=lambda k: (poly[k][0] - poly[0][0]) ** 2
                 + (poly[k][1] - poly[0][1]) ** 2)
    keep = {0, anchor}
    _dp_chain(poly, 0, anchor, epsilon, keep)
    _dp_chain(poly, anchor, n, epsilon, keep)
    if len(keep) < 3:
        rest = [k for k in range(n) if k not in keep]
        extra = max(rest, key=lambda k: _line_distance(poly[k], poly[0], poly[anchor]))
        keep.add(extra)
    return [poly[k] for k in sorted(keep)]


def convex_hull(points):
    """Convex hull via monotone chain: counter-clockwise, collinear points
    dropped, starting from the lexicographically smallest vertex."""
    if len(points) < 3:
        raise GeometryError("convex hull needs at least 3 points")
    pts = sorted(set((float(x), float(y)) for x, y in points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise GeometryError("all points are collinear (degenerate hull)")
    return hull


def _signed_area(poly):
    s = 0.0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def polygon_metrics(poly):
    """(perimeter, absolute shoelace area) of an implicitly closed polygon."""
    n = len(poly)
    per = 0.0
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        per += math.hypot(x2 - x1, y2 - y1)
    return per, abs(_signed_area(poly))


def polygon_centroid(poly) -> Point:
    """Area-weighted centroid; falls back to the vertex mean for zero area."""
    area2 = 0.0
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        w = x1 * y2 - x2 * y1
        area2 += w
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    if area2 == 0.0:
        return (sum(p[0] for p in poly) / n, sum(p[1] for p in poly) / n)
    return (cx / (3.0 * area2), cy / (3.0 * area2))


def _tri_area2(a, b, c):
    return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _max_area_quad(hull):
    """Indices of the 4 hull vertices maximizing quadrilateral area."""
    n = len(hull)
    best = (-1.0, None)
    for i in range(n):
        for k in range(i + 2, n):
            a, c = hull[i], hull[k]
            bj = (-1.0, None)
            for j in range(i + 1, k):
                t = _tri_area2(a, hull[j], c)
                if t > bj[0]:
                    bj = (t, j)
            bl = (-1.0, None)
            for m in range(k + 1, i + n):
                t = _tri_area2(c, hull[m % n], a)
                if t > bl[0]:
                    bl = (t, m % n)
            if bj[1] is None or bl[1] is None:
                continue
            total = bj[0] + bl[0]
            if total > best[0]:
                best = (total, (i, bj[1], k, bl[1]))
    return best[1]


def detect_rectangle(poly, angle_tol_deg: float = 10.0,
                     min_area: float = 0.0, max_area: float = math.inf,
                     min_perimeter: float = 0.0, max_perimeter: float = math.inf):
    """Decide whether a convex hull is (approximately) a rectangle.

    Reduces the hull to its maximum-area quadrilateral; accepts when that
    quad covers essentially the whole hull, all four interior angles are
    within `angle_tol_deg` of 90 degrees, and the quad's area and perimeter
    fall inside the given bounds. Returns the 4 corners (hull order) or
    None; absence is a value, never an error.
    """
    hull = list(poly)
    n = len(hull)
    if n < 4:
        return None
    if n == 4:
        quad = hull
    else:
        idx = _max_area_quad(hull)
        if idx is None:
            return None
        quad = [hull[i] for i in idx]
    _, quad_area = polygon_metrics(quad)
    _, hull_area = polygon_metrics(hull)
    if hull_area == 0.0 or quad_area < _RECT_HULL_COVERAGE * hull_area:
        return None
    for i in range(4):
        px, py = quad[i - 1]
        cx, cy = quad[i]
        nx, ny = quad[(i + 1) % 4]
        u = (px - cx, py - cy)
        w = (nx - cx, ny - cy)
        nu, nw = math.hypot(*u), math.hypot(*w)
        if nu == 0.0 or nw == 0.0:
            return None
        cosang = max(-1.0, min(1.0, (u[0] * w[0] + u[1] * w[1]) / (nu * nw)))
        if abs(math.degrees(math.acos(cosang)) - 90.0) > angle_tol_deg:
            return None
    per, area = polygon_metrics(quad)
    if not (min_area <= area <= max_area and min_perimeter <= per <= max_perimeter):
        return None
    return tuple(quad)


@dataclass
class ClassifyParams:
    """Thresholds for element classification; defaults are permissive."""

    angle_tol_deg: float = 10.0
    min_area: float = 4.0
    max_area: float = 1e9
    min_perimeter: float = 4.0
    max_perimeter: float = 1e9
    simplify_epsilon: float = 0.0


@dataclass
class MapElement:
    """A classified vector feature in pixel or world coordinates."""

    id: int
    kind: str
    geometry: list = field(default_factory=list)
    corners: tuple | None = None
    anchor: Point = (0.0, 0.0)


def _component_anchor(poly, lg, comp_id):
    """Centroid if it lies inside the polygon, else a component cell center."""
    c = polygon_centroid(poly)
    if point_in_polygon(poly, c):
        return c
    for r in range(lg.height):
        for col in range(lg.width):
            if lg.labels[r][col] == comp_id:
                return (col + 0.5, r + 0.5)
    raise NotFoundError(f"component id {comp_id} not present")


def extract_elements(grid: BitGrid, params: ClassifyParams | None = None):
    """Full raster-to-vector pipeline over a binary map.

    Free (0) components under 4-connectivity become Pathways; occupied (1)
    components under 8-connectivity become ParkingSpaces when their convex
    hull passes the rectangle test, Obstacles otherwise. Ids are assigned
    in scan order, pathways first. Coordinates are in pixel units
    (x = column, y = row, y down).
    """
    if params is None:
        params = ClassifyParams()
    elements = []
    next_id = 1

    free = connected_components(grid, 0, connectivity=4)
    for cid in range(1, free.n_components + 1):
        contour = trace_contour(free, cid)
        poly = simplify_polygon(contour, params.simplify_epsilon)
        anchor = _component_anchor(poly, free, cid)
        elements.append(MapElement(next_id, PATHWAY, poly, None, anchor))
        next_id += 1

    occ = connected_components(grid, 1, connectivity=8)
    for cid in range(1, occ.n_components + 1):
        contour = trace_contour(occ, cid)
        poly = simplify_polygon(contour, params.simplify_epsilon)
        quad = None
        try:
            hull = convex_hull(contour)
        except GeometryError:
            hull = None
        if hull is not None:
            quad = detect_rectangle(hull, params.angle_tol_deg,
                                    params.min_area, params.max_area,
                                    params.min_perimeter, params.max_perimeter)
        if quad is not None:
            elements.append(MapElement(next_id, PARKING_SPACE, poly, quad, quad_center(quad)))
        else:
            anchor = _component_anchor(poly, occ, cid)
            elements.append(MapElement(next_id, OBSTACLE, poly, None, anchor))
        next_id += 1
    return elements


def transform_element(el: MapElement, t: AffineTransform) -> MapElement:
    """Apply an affine transform to every coordinate of an element."""
    geometry = [apply_affine(t, p) for p in el.geometry]
    corners = tuple(apply_affine(t, p) for p in el.corners) if el.corners else None
    return MapElement(el.id, el.kind, geometry, corners, apply_affine(t, el.anchor))


def element_to_json(el: MapElement) -> str:
    """One JSON line per element; field order fixed for byte-stable output."""
    obj = {
        "id": el.id,
        "kind": el.kind,
        "anchor": [el.anchor[0], el.anchor[1]],
        "corners": [[x, y] for x, y in el.corners] if el.corners else None,
        "polygon": [[x, y] for x, y in el.geometry],
    }
    return json.dumps(obj, separators=(",", ":"))


def element_from_json(line: str) -> MapElement:
    obj = json.loads(line)
    corners = tuple((float(x), float(y)) for x, y in obj["corners"]) if obj.get("corners") else None
    return MapElement(
        int(obj["id"]),
        obj["kind"],
        [(float(x), float(y)) for x, y in obj["polygon"]],
        corners,
        (float(obj["anchor"][0]), float(obj["anchor"][1])),
    )
