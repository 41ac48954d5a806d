"""Navigation: occupancy grid from the store, shortest paths, turn instructions, overlays."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .errors import BoundsError, ConfigError, PlacementError, UnreachableError
from .geometry import GridSpec, world_to_cell
from .raster import BitGrid
from .rasterize import polygon_fill

__all__ = [
    "OccupancyGrid",
    "Instruction",
    "Route",
    "build_occupancy",
    "shortest_path",
    "route_instructions",
    "render_overlay",
    "route_to_csv",
]

# Fixed neighbor expansion order: N, E, S, W, then NE, SE, SW, NW.
NEIGHBORS_4 = ((-1, 0), (0, 1), (1, 0), (0, -1))
NEIGHBORS_8 = NEIGHBORS_4 + ((-1, 1), (1, 1), (1, -1), (-1, -1))

_HEADINGS = {(-1, 0): "N", (-1, 1): "NE", (0, 1): "E", (1, 1): "SE",
             (1, 0): "S", (1, -1): "SW", (0, -1): "W", (-1, -1): "NW"}


@dataclass
class OccupancyGrid:
    """Binary navigation substrate bound to world coordinates."""

    bits: BitGrid
    spec: GridSpec


@dataclass
class Instruction:
    """One merged straight run: turn taken to enter it, heading, metric length."""

    turn: str  # "start", "left", "right", "uturn"
    heading: str
    distance: float


@dataclass
class Route:
    """Ordered free-cell run from start to goal with total metric length."""

    cells: list
    length: float
    instructions: list = field(default_factory=list)


def build_occupancy(store, g: GridSpec) -> OccupancyGrid:
    """Rasterize store records onto the navigation grid.

    Each parking space blocks the cell_size x cell_size square centered at
    its anchor; each obstacle blocks the cell containing its point. Space
    anchor cells are then carved free so spaces are reachable goals. Path
    records are drivable and claim nothing.
    """
    bits = np.zeros((g.rows, g.cols), dtype=np.uint8)
    x0, y0 = g.origin
    x_max = x0 + g.cols * g.cell_dx
    y_min = y0 - g.rows * g.cell_dy
    half = store.cell_size / 2.0
    for rec in store.spaces:
        if not (x0 <= rec.x <= x_max and y_min <= rec.y <= y0):
            raise BoundsError(f"space {rec.id} anchor outside grid extent")
        square = [(rec.x - half, rec.y - half), (rec.x + half, rec.y - half),
                  (rec.x + half, rec.y + half), (rec.x - half, rec.y + half)]
        for i, j in polygon_fill(square, g):
            bits[i, j] = 1
    for rec in store.obstacles:
        try:
            i, j = world_to_cell((rec.x, rec.y), g)
        except BoundsError:
            raise BoundsError(f"obstacle {rec.id} outside grid extent") from None
        bits[i, j] = 1
    for rec in store.spaces:
        i, j = world_to_cell((rec.x, rec.y), g)
        bits[i, j] = 0
    return OccupancyGrid(BitGrid(g.cols, g.rows, bits), g)


def shortest_path(occ: OccupancyGrid, start, goal, connectivity: int = 8) -> Route:
    """Uniform-cost (Dijkstra) search over free cells.

    Straight steps cost one cell size, diagonals sqrt(2) of it. A diagonal
    move is forbidden when both flanking orthogonal cells are occupied (no
    corner cutting). Raises PlacementError for an occupied endpoint and
    UnreachableError when no route exists.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    bits = occ.bits.bits
    rows, cols = occ.spec.rows, occ.spec.cols

    def check(cell, name):
        i, j = cell
        if not (0 <= i < rows and 0 <= j < cols):
            raise PlacementError(f"{name} cell {cell} outside the grid")
        if bits[i, j]:
            raise PlacementError(f"{name} cell {cell} is occupied")

    check(start, "start")
    check(goal, "goal")
    cell = occ.spec.cell_dx
    diag = cell * math.sqrt(2.0)
    neighbors = NEIGHBORS_4 if connectivity == 4 else NEIGHBORS_8

    dist = {start: 0.0}
    prev = {}
    heap = [(0.0, 0, start)]
    seq = 1
    done = set()
    while heap:
        d, _, cur = heappop(heap)
        if cur in done:
            continue
        if cur == goal:
            cells = [cur]
            while cur != start:
                cur = prev[cur]
                cells.append(cur)
            cells.reverse()
            return Route(cells, d, route_instructions(cells, cell))
        done.add(cur)
        ci, cj = cur
        for di, dj in neighbors:
            ni, nj = ci + di, cj + dj
            if not (0 <= ni < rows and 0 <= nj < cols) or bits[ni, nj]:
                continue
            if di and dj and bits[ci, nj] and bits[ni, cj]:
                continue  # both flanks blocked: no corner cutting
            nd = d + (diag if di and dj else cell)
            if nd < dist.get((ni, nj), math.inf):
                dist[(ni, nj)] = nd
                prev[(ni, nj)] = cur
                heappush(heap, (nd, seq, (ni, nj)))
                seq += 1
    raise UnreachableError(f"no route from {start} to {goal}")


def route_instructions(cells, cell_size: float):
    """Merge collinear steps into straight runs and classify the turns
    between them (screen orientation: y down, so N is up)."""
    if len(cells) < 2:
        return []
    runs = []
    for k in range(1, len(cells)):
        d = (cells[k][0] - cells[k - 1][0], cells[k][1] - cells[k - 1][1])
        step = cell_size * (math.sqrt(2.0) if d[0] and d[1] else 1.0)
        if runs and runs[-1][0] == d:
            runs[-1][1] += step
        else:
            runs.append([d, step])
    out = []
    prev_d = None
    for d, length in runs:
        if prev_d is None:
            turn = "start"
        else:
            # x = column, y = row (down); positive cross is a right turn.
            cross = prev_d[1] * d[0] - prev_d[0] * d[1]
            dot = prev_d[0] * d[0] + prev_d[1] * d[1]
            if cross > 0:
                turn = "right"
            elif cross < 0:
                turn = "left"
            else:
                turn = "uturn" if dot < 0 else "start"
        out.append(Instruction(turn, _HEADINGS[d], length))
        prev_d = d
    return out


def _anchor_cells(store, g):
    cells = []
    for rec in store.spaces:
        try:
            cells.append(world_to_cell((rec.x, rec.y), g))
        except BoundsError:
            continue
    return cells


def render_overlay(occ: OccupancyGrid, route=None, store=None, fmt: str = "ppm") -> bytes:
    """Deterministic overlay image: free white, occupied black, parking
    anchors blue, route red, start/goal green (SVG markers).

    PPM output is one pixel per cell with every route cell red; SVG emits
    one rect per occupied cell, a red polyline for the route, and green
    start/goal circles. Identical inputs give byte-identical output.
    """
    fmt = fmt.lower()
    if fmt not in ("ppm", "svg"):
        raise ConfigError(f"unsupported overlay format {fmt!r}")
    rows, cols = occ.spec.rows, occ.spec.cols
    anchors = _anchor_cells(store, occ.spec) if store is not None else []
    if fmt == "ppm":
        img = np.full((rows, cols, 3), 255, dtype=np.uint8)
        img[occ.bits.bits == 1] = (0, 0, 0)
        for i, j in anchors:
            img[i, j] = (0, 0, 255)
        if route is not None:
            for i, j in route.cells:
                img[i, j] = (255, 0, 0)
        return b"P6\n%d %d\n255\n" % (cols, rows) + img.tobytes()

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * 10}" '
             f'height="{rows * 10}" viewBox="0 0 {cols} {rows}">',
             f'<rect x="0" y="0" width="{cols}" height="{rows}" fill="white"/>']
    bits = occ.bits.bits
    for i in range(rows):
        for j in range(cols):
            if bits[i, j]:
                lines.append(f'<rect x="{j}" y="{i}" width="1" height="1" fill="black"/>')
    for i, j in anchors:
        lines.append(f'<rect x="{j}" y="{i}" width="1" height="1" fill="blue"/>')
    if route is not None:
        pts = " ".join(f"{j + 0.5},{i + 0.5}" for i, j in route.cells)
        lines.append(f'<polyline points="{pts}" fill="none" stroke="red" stroke-width="0.3"/>')
        for i, j in (route.cells[0], route.cells[-1]):
            lines.append(f'<circle cx="{j + 0.5}" cy="{i + 0.5}" r="0.35" fill="green"/>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode()


def route_to_csv(route: Route) -> str:
    """Route export: one `I,J` line per cell plus a trailing length record."""
    lines = [f"{i},{j}" for i, j in route.cells]
    lines.append("length,%.17g" % route.length)
    return "\n".join(lines) + "\n"
