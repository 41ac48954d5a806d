"""Garage electronic map toolkit: raster/vector conversion, classified
grid-indexed storage, and shortest-path navigation."""

from .config import PipelineConfig, load_config
from .geometry import (AffineTransform, GridSpec, apply_affine, cell_to_world,
                       edge_cross, fit_affine, grid_to_world_transform,
                       point_in_polygon, point_in_quad, quad_center,
                       world_to_cell)
from .nav import (Instruction, OccupancyGrid, Route, build_occupancy,
                  render_overlay, route_instructions, route_to_csv,
                  shortest_path)
from .raster import (BitGrid, RasterGrid, binarize, load_image, resize_nearest,
                     save_image, to_grayscale)
from .rasterize import (Sample, idw_interpolate, line_eight_direction,
                        line_full_path, polygon_fill, polygon_grid_sample,
                        raster_from_elements, rasterize_point)
from .store import (GridIndexedStore, ObstacleRecord, PathRecord, SpaceRecord,
                    build_store, emit_sql_ddl, load_store, nearest_space,
                    query_cell, save_store)
from .vectorize import (OBSTACLE, PARKING_SPACE, PATHWAY, ClassifyParams,
                        LabelGrid, MapElement, connected_components,
                        convex_hull, detect_rectangle, extract_elements,
                        polygon_centroid, polygon_metrics, simplify_polygon,
                        trace_contour, transform_element)

__version__ = "0.1.0"
