"""Command-line pipeline: rasterize -> vectorize -> store -> route/render/ddl.

Exit codes: 0 ok, 2 input error, 3 config error, 4 navigation failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import geometry, nav, raster, store as store_mod, vectorize
from .config import PipelineConfig, load_config
from .errors import (BoundsError, ConfigError, FormatError, GarageMapError,
                     GeometryError, NotFoundError, PlacementError,
                     SingularFitError, StoreLoadError, UnreachableError)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NAV = 4


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}")


def _write(path, data):
    mode = "wb" if isinstance(data, bytes) else "w"
    kwargs = {} if isinstance(data, bytes) else {"encoding": "utf-8", "newline": "\n"}
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, mode, **kwargs) as fh:
        fh.write(data)


def _bits_to_text(grid):
    return "\n".join("".join(str(int(b)) for b in row) for row in grid.bits) + "\n"


def _load_bitgrid(path):
    data = _read_bytes(path)
    if data[:2] in (b"P2", b"P5"):
        img = raster.load_image(data)
        return raster.binarize(img, 128)
    text = data.decode("utf-8", errors="strict")
    rows = [line for line in text.splitlines() if line]
    if not rows or any(set(line) - {"0", "1"} for line in rows):
        raise FormatError(f"{path}: expected rows of 0/1 characters or a PGM file")
    width = len(rows[0])
    if any(len(line) != width for line in rows):
        raise FormatError(f"{path}: ragged rows in bit matrix")
    bits = np.array([[int(ch) for ch in line] for line in rows], dtype=np.uint8)
    return raster.BitGrid(width, len(rows), bits)


def run_rasterize(args) -> int:
    cfg = _config(args)
    img = raster.load_image(_read_bytes(args.input))
    if args.resize:
        img = raster.resize_nearest(img, args.resize[0], args.resize[1])
    gray = raster.to_grayscale(img)
    bits = raster.binarize(gray, cfg.threshold)
    _write(os.path.join(args.out, "gray.pgm"), raster.save_image(gray))
    visual = raster.RasterGrid(bits.width, bits.height, 1,
                               np.where(bits.bits == 1, 0, 255).astype(np.uint8))
    _write(os.path.join(args.out, "map.pgm"), raster.save_image(visual))
    _write(os.path.join(args.out, "map.bits"), _bits_to_text(bits))
    return EXIT_OK


def run_vectorize(args) -> int:
    cfg = _config(args)
    grid = _load_bitgrid(args.input)
    params = vectorize.ClassifyParams(cfg.angle_tol_deg, cfg.min_area, cfg.max_area,
                                      cfg.min_perimeter, cfg.max_perimeter,
                                      cfg.simplify_epsilon)
    elements = vectorize.extract_elements(grid, params)
    _write(args.out, "".join(vectorize.element_to_json(el) + "\n" for el in elements))
    return EXIT_OK


def _load_elements(path):
    text = _read_bytes(path).decode("utf-8")
    try:
        return [vectorize.element_from_json(line)
                for line in text.splitlines() if line.strip()]
    except (ValueError, KeyError) as exc:
        raise FormatError(f"{path}: bad element record: {exc}") from None


def _load_control_points(path):
    lines = _read_bytes(path).decode("utf-8").splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != ["px", "py", "wx", "wy"]:
        raise FormatError(f"{path}: expected header px,py,wx,wy")
    pairs = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            px, py, wx, wy = (float(v) for v in line.split(","))
        except ValueError:
            raise FormatError(f"{path}:{ln}: expected 4 numeric fields") from None
        pairs.append(((px, py), (wx, wy)))
    return pairs


def run_store(args) -> int:
    cfg = _config(args)
    elements = _load_elements(args.input)
    if args.control_points:
        pairs = _load_control_points(args.control_points)
        transform = geometry.fit_affine(pairs)
        elements = [vectorize.transform_element(el, transform) for el in elements]
    built = store_mod.build_store(elements, cfg.cell_size)
    store_mod.save_store(built, args.out)
    if args.sql:
        _write(args.sql, store_mod.emit_sql_ddl(built))
    return EXIT_OK


def _derive_grid(st, cfg):
    """Navigation GridSpec: from config when rows/cols given, else derived
    from the store extent with one cell of padding (cells = cell_size)."""
    if cfg.rows > 0 and cfg.cols > 0:
        return geometry.GridSpec((cfg.origin_x, cfg.origin_y),
                                 cfg.cell_dx, cfg.cell_dy, cfg.rows, cfg.cols)
    xs, ys = [], []
    for rec in st.spaces + st.obstacles:
        xs.append(rec.x)
        ys.append(rec.y)
    for rec in st.paths:
        xs.extend((rec.start_x, rec.end_x))
        ys.extend((rec.start_y, rec.end_y))
    if not xs:
        raise NotFoundError("store is empty; cannot derive a navigation grid")
    cs = cfg.cell_size
    x_lo = math.floor(min(xs) / cs) - 1
    x_hi = math.ceil(max(xs) / cs) + 1
    y_lo = math.floor(min(ys) / cs) - 1
    y_hi = math.ceil(max(ys) / cs) + 1
    return geometry.GridSpec((x_lo * cs, y_hi * cs), cs, cs,
                             y_hi - y_lo, x_hi - x_lo)


def _open_store(args, cfg):
    return store_mod.load_store(args.store_dir, cfg.cell_size)


def run_route(args) -> int:
    cfg = _config(args)
    st = _open_store(args, cfg)
    g = _derive_grid(st, cfg)
    occ = nav.build_occupancy(st, g)
    start_world = (args.start[0], args.start[1])
    start = geometry.world_to_cell(start_world, g)
    if args.goal_space is not None:
        matches = [r for r in st.spaces if r.id == args.goal_space]
        if not matches:
            raise NotFoundError(f"no parking space with id {args.goal_space}")
        rec = matches[0]
        goal = geometry.world_to_cell((rec.x, rec.y), g)
    elif args.nearest_space:
        rec = store_mod.nearest_space(st, start_world)
        goal = geometry.world_to_cell((rec.x, rec.y), g)
    else:
        goal = geometry.world_to_cell((args.goal[0], args.goal[1]), g)
    route = nav.shortest_path(occ, start, goal, cfg.connectivity)
    _write(os.path.join(args.out, "route.csv"), nav.route_to_csv(route))
    ext = "ppm" if args.format == "ppm" else "svg"
    _write(os.path.join(args.out, f"overlay.{ext}"),
           nav.render_overlay(occ, route, st, args.format))
    return EXIT_OK


def run_render(args) -> int:
    cfg = _config(args)
    st = _open_store(args, cfg)
    g = _derive_grid(st, cfg)
    occ = nav.build_occupancy(st, g)
    _write(args.out, nav.render_overlay(occ, None, st, args.format))
    return EXIT_OK


def run_ddl(args) -> int:
    cfg = _config(args)
    st = _open_store(args, cfg)
    text = store_mod.emit_sql_ddl(st)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _config(args) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    # Flag overrides win over config-file values.
    for name in ("threshold", "cell_size", "connectivity"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg.validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="garagemap",
                                     description="Garage map raster/vector toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")

    p = sub.add_parser("rasterize", help="image -> grayscale PGM + binary grid")
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--threshold", type=int)
    p.add_argument("--resize", nargs=2, type=int, metavar=("W", "H"))
    common(p)
    p.set_defaults(func=run_rasterize)

    p = sub.add_parser("vectorize", help="binary grid -> elements JSON lines")
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True, help="output JSONL file")
    common(p)
    p.set_defaults(func=run_vectorize)

    p = sub.add_parser("store", help="elements -> classified CSV tables")
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--control-points", help="CSV px,py,wx,wy for the affine fit")
    p.add_argument("--sql", help="also emit SQL DDL to this file")
    p.add_argument("--cell-size", dest="cell_size", type=float)
    common(p)
    p.set_defaults(func=run_store)

    p = sub.add_parser("route", help="shortest path through the stored map")
    p.add_argument("store_dir")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--start", nargs=2, type=float, required=True, metavar=("X", "Y"))
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--goal", nargs=2, type=float, metavar=("X", "Y"))
    group.add_argument("--goal-space", type=int, metavar="ID")
    group.add_argument("--nearest-space", action="store_true")
    p.add_argument("--format", choices=("ppm", "svg"), default="ppm")
    p.add_argument("--cell-size", dest="cell_size", type=float)
    p.add_argument("--connectivity", type=int, choices=(4, 8))
    common(p)
    p.set_defaults(func=run_route)

    p = sub.add_parser("render", help="render the stored map without a route")
    p.add_argument("store_dir")
    p.add_argument("-o", "--out", required=True, help="output image file")
    p.add_argument("--format", choices=("ppm", "svg"), default="ppm")
    p.add_argument("--cell-size", dest="cell_size", type=float)
    common(p)
    p.set_defaults(func=run_render)

    p = sub.add_parser("ddl", help="emit SQL schema + inserts for a store")
    p.add_argument("store_dir")
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.add_argument("--cell-size", dest="cell_size", type=float)
    common(p)
    p.set_defaults(func=run_ddl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SingularFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnreachableError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NAV
    except (FormatError, StoreLoadError, NotFoundError, BoundsError,
            PlacementError, GeometryError, GarageMapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
