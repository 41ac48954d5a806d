"""Shortest-path navigation over a stored map, with turn-by-turn output.

Builds an occupancy grid from a store, runs the grid search and renders a
route overlay.

Run:  python3 demos/04_navigate.py
"""
from garagemap import (GridSpec, MapElement, build_occupancy, build_store,
                       render_overlay, route_to_csv, shortest_path,
                       world_to_cell)

# A 10x14 garage: a wall of obstacle points with one gap, one parking space.
elements = [MapElement(1, "ParkingSpace",
                       [(11, 1), (13, 1), (13, 3), (11, 3)], None, (12.5, 2.5))]
eid = 2
for y in range(10):
    if y in (4, 5):
        continue  # the gap cars drive through
    elements.append(MapElement(eid, "Obstacle", [(7, y), (8, y), (7, y + 1)],
                               None, (7.5, y + 0.5)))
    eid += 1

store = build_store(elements, cell_size=1.0)
grid = GridSpec(origin=(0.0, 10.0), cell_dx=1.0, cell_dy=1.0, rows=10, cols=14)
occ = build_occupancy(store, grid)

start = (8, 1)  # cell (row, col) near the entrance
goal = world_to_cell((12.5, 2.5), grid)  # the parking space anchor

route = shortest_path(occ, start, goal, connectivity=8)
print(f"route: {len(route.cells)} cells, length {route.length:.3f}")
for ins in route.instructions:
    print(f"  {ins.turn:>6} heading {ins.heading:<2} for {ins.distance:.2f}")

cells = set(route.cells)
for i in range(occ.spec.rows):
    line = []
    for j in range(occ.spec.cols):
        if (i, j) in cells:
            line.append("o")
        else:
            line.append("#" if occ.bits.bits[i, j] else ".")
    print("".join(line))

print()
print(route_to_csv(route))
ppm = render_overlay(occ, route, store, fmt="ppm")
print(f"overlay: {len(ppm)} bytes of PPM")
