"""Grid-indexed classified storage: spaces, paths, obstacles (three-table schema)."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError, NotFoundError, StoreLoadError
from .geometry import Point
from .rasterize import line_full_path
from .vectorize import OBSTACLE, PARKING_SPACE, PATHWAY

__all__ = [
    "SpaceRecord",
    "PathRecord",
    "ObstacleRecord",
    "GridIndexedStore",
    "build_store",
    "query_cell",
    "nearest_space",
    "save_store",
    "load_store",
    "emit_sql_ddl",
]

SPACES_HEADER = ["id", "x_coordinate", "y_coordinate", "space_type"]
PATHS_HEADER = ["id", "start_x", "start_y", "end_x", "end_y"]
OBSTACLES_HEADER = ["id", "x_coordinate", "y_coordinate", "obstacle_type"]

# Type codes: 'S' small-vehicle rectangular space, 'L' large-vehicle,
# 'N' no-parking; obstacles 'W' wall, 'P' pillar.
DEFAULT_SPACE_TYPE = "S"
DEFAULT_OBSTACLE_TYPE = "W"


@dataclass(frozen=True)
class SpaceRecord:
    id: int
    x: float
    y: float
    space_type: str = DEFAULT_SPACE_TYPE


@dataclass(frozen=True)
class PathRecord:
    id: int
    start_x: float
    start_y: float
    end_x: float
    end_y: float


@dataclass(frozen=True)
class ObstacleRecord:
    id: int
    x: float
    y: float
    obstacle_type: str = DEFAULT_OBSTACLE_TYPE


@dataclass
class GridIndexedStore:
    """The three record tables plus a cell -> record-id index.

    Cell (I, J) of the index is the square [J cs, (J+1) cs) x [I cs, (I+1) cs)
    in world coordinates (plain floor bucketing; `cell_size` is one parking
    space width). Spaces and obstacles are indexed by their anchor cell,
    path segments by every cell of the full-path rasterization between
    their endpoint cells.
    """

    cell_size: float
    spaces: list = field(default_factory=list)
    paths: list = field(default_factory=list)
    obstacles: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    def cell_of(self, p: Point) -> tuple[int, int]:
        return (math.floor(p[1] / self.cell_size), math.floor(p[0] / self.cell_size))

    def path_cells(self, rec: PathRecord):
        c0 = self.cell_of((rec.start_x, rec.start_y))
        c1 = self.cell_of((rec.end_x, rec.end_y))
        return line_full_path(c0, c1)

    def _slot(self, cell):
        return self.index.setdefault(cell, ([], [], []))

    def rebuild_index(self):
        self.index = {}
        for rec in self.spaces:
            self._slot(self.cell_of((rec.x, rec.y)))[0].append(rec.id)
        for rec in self.paths:
            for cell in self.path_cells(rec):
                self._slot(cell)[1].append(rec.id)
        for rec in self.obstacles:
            self._slot(self.cell_of((rec.x, rec.y)))[2].append(rec.id)


def build_store(elements, cell_size: float) -> GridIndexedStore:
    """Classify map elements into the three tables and build the cell index.

    Spaces and obstacles keep their element ids; pathway polygons are
    decomposed into edge segments with sequential path ids.
    """
    if cell_size <= 0:
        raise ConfigError("cell_size must be positive")
    store = GridIndexedStore(cell_size)
    next_path_id = 1
    for el in sorted(elements, key=lambda e: e.id):
        if el.kind == PARKING_SPACE:
            store.spaces.append(SpaceRecord(el.id, el.anchor[0], el.anchor[1]))
        elif el.kind == OBSTACLE:
            store.obstacles.append(ObstacleRecord(el.id, el.anchor[0], el.anchor[1]))
        elif el.kind == PATHWAY:
            n = len(el.geometry)
            for k in range(n):
                sx, sy = el.geometry[k]
                ex, ey = el.geometry[(k + 1) % n]
                if (sx, sy) == (ex, ey):
                    continue
                store.paths.append(PathRecord(next_path_id, sx, sy, ex, ey))
                next_path_id += 1
        else:
            raise ValueError(f"unknown element kind {el.kind!r}")
    store.rebuild_index()
    return store


def query_cell(store: GridIndexedStore, i: int, j: int):
    """Records indexed at cell (i, j), each table's list ordered by id.
    Untouched cells return three empty lists."""
    slot = store.index.get((i, j))
    if slot is None:
        return [], [], []
    by_id = lambda recs, ids: sorted((r for r in recs if r.id in ids), key=lambda r: r.id)
    return (by_id(store.spaces, set(slot[0])),
            by_id(store.paths, set(slot[1])),
            by_id(store.obstacles, set(slot[2])))


def nearest_space(store: GridIndexedStore, p: Point, type_filter: str | None = None) -> SpaceRecord:
    """Space record with minimum Euclidean anchor distance to p; ties break
    toward the smaller id. Raises NotFoundError when nothing matches."""
    best = None
    for rec in store.spaces:
        if type_filter is not None and rec.space_type != type_filter:
            continue
        d = math.hypot(rec.x - p[0], rec.y - p[1])
        key = (d, rec.id)
        if best is None or key < best[0]:
            best = (key, rec)
    if best is None:
        raise NotFoundError("no parking space matches the filter")
    return best[1]


def _fmt(v: float) -> str:
    return "%.17g" % v


def save_store(store: GridIndexedStore, directory: str):
    """Write spaces.csv, paths.csv, obstacles.csv (UTF-8, LF endings).

    Coordinates are serialized with 17 significant digits so a load
    round-trips every field bit-exactly. The index is not persisted.
    """
    os.makedirs(directory, exist_ok=True)
    tables = [
        ("spaces.csv", SPACES_HEADER, store.spaces,
         lambda r: [str(r.id), _fmt(r.x), _fmt(r.y), r.space_type]),
        ("paths.csv", PATHS_HEADER, store.paths,
         lambda r: [str(r.id), _fmt(r.start_x), _fmt(r.start_y), _fmt(r.end_x), _fmt(r.end_y)]),
        ("obstacles.csv", OBSTACLES_HEADER, store.obstacles,
         lambda r: [str(r.id), _fmt(r.x), _fmt(r.y), r.obstacle_type]),
    ]
    for name, header, records, row_of in tables:
        lines = [",".join(header)]
        for rec in sorted(records, key=lambda r: r.id):
            lines.append(",".join(row_of(rec)))
        with open(os.path.join(directory, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _load_table(path, header, n_numeric, has_type):
    name = os.path.basename(path)
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise StoreLoadError(str(exc), filename=name) from None
    if not lines or lines[0].split(",") != header:
        raise StoreLoadError(f"header mismatch: expected {','.join(header)}",
                             filename=name, line=1)
    rows = []
    seen = set()
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != len(header):
            raise StoreLoadError(f"expected {len(header)} fields, got {len(fields)}",
                                 filename=name, line=ln)
        try:
            rid = int(fields[0])
            nums = [float(v) for v in fields[1:1 + n_numeric]]
        except ValueError:
            raise StoreLoadError("non-numeric field", filename=name, line=ln) from None
        if rid in seen:
            raise StoreLoadError(f"duplicate id {rid}", filename=name, line=ln)
        seen.add(rid)
        rows.append((rid, nums, fields[-1] if has_type else None))
    return rows


def load_store(directory: str, cell_size: float) -> GridIndexedStore:
    """Load the three CSV tables and rebuild the index for `cell_size`."""
    if cell_size <= 0:
        raise ConfigError("cell_size must be positive")
    store = GridIndexedStore(cell_size)
    for rid, (x, y), code in _load_table(os.path.join(directory, "spaces.csv"),
                                         SPACES_HEADER, 2, True):
        store.spaces.append(SpaceRecord(rid, x, y, code))
    for rid, nums, _ in _load_table(os.path.join(directory, "paths.csv"),
                                    PATHS_HEADER, 4, False):
        store.paths.append(PathRecord(rid, *nums))
    for rid, (x, y), code in _load_table(os.path.join(directory, "obstacles.csv"),
                                         OBSTACLES_HEADER, 2, True):
        store.obstacles.append(ObstacleRecord(rid, x, y, code))
    store.rebuild_index()
    return store


def emit_sql_ddl(store: GridIndexedStore) -> str:
    """CREATE TABLE statements for the three tables plus INSERTs for all
    records. Deterministic: records ordered by id."""
    out = []
    out.append("CREATE TABLE parking_space (\n"
               "  id INT PRIMARY KEY,\n"
               "  x_coordinate DOUBLE,\n"
               "  y_coordinate DOUBLE,\n"
               "  space_type CHAR(1)\n"
               ");")
    out.append("CREATE TABLE pathway (\n"
               "  id INT PRIMARY KEY,\n"
               "  start_x DOUBLE,\n"
               "  start_y DOUBLE,\n"
               "  end_x DOUBLE,\n"
               "  end_y DOUBLE\n"
               ");")
    out.append("CREATE TABLE obstacle (\n"
               "  id INT PRIMARY KEY,\n"
               "  x_coordinate DOUBLE,\n"
               "  y_coordinate DOUBLE,\n"
               "  obstacle_type CHAR(1)\n"
               ");")
    for rec in sorted(store.spaces, key=lambda r: r.id):
        out.append(f"INSERT INTO parking_space VALUES ({rec.id}, {_fmt(rec.x)}, "
                   f"{_fmt(rec.y)}, '{rec.space_type}');")
    for rec in sorted(store.paths, key=lambda r: r.id):
        out.append(f"INSERT INTO pathway VALUES ({rec.id}, {_fmt(rec.start_x)}, "
                   f"{_fmt(rec.start_y)}, {_fmt(rec.end_x)}, {_fmt(rec.end_y)});")
    for rec in sorted(store.obstacles, key=lambda r: r.id):
        out.append(f"INSERT INTO obstacle VALUES ({rec.id}, {_fmt(rec.x)}, "
                   f"{_fmt(rec.y)}, '{rec.obstacle_type}');")
    return "\n".join(out) + "\n"
