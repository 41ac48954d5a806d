"""Pipeline configuration: flat key=value files plus range validation."""
from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

__all__ = ["PipelineConfig", "load_config"]


@dataclass
class PipelineConfig:
    """All tunable pipeline parameters, with defaults.

    `rows`/`cols` of 0 means the navigation grid is auto-derived from the
    store's extent (one cell of padding, cell size = `cell_size`).
    """

    threshold: int = 128
    cell_size: float = 1.0
    angle_tol_deg: float = 10.0
    min_area: float = 4.0
    max_area: float = 1e9
    min_perimeter: float = 4.0
    max_perimeter: float = 1e9
    simplify_epsilon: float = 0.0
    idw_power: float = 2.0
    connectivity: int = 8
    origin_x: float = 0.0
    origin_y: float = 0.0
    cell_dx: float = 1.0
    cell_dy: float = 1.0
    rows: int = 0
    cols: int = 0

    def validate(self):
        if not 0 <= self.threshold <= 255:
            raise ConfigError(f"threshold must be in 0..255, got {self.threshold}")
        if self.cell_size <= 0:
            raise ConfigError("cell_size must be positive")
        if not 0 <= self.angle_tol_deg < 90:
            raise ConfigError("angle_tol_deg must be in [0, 90)")
        for name in ("min_area", "max_area", "min_perimeter", "max_perimeter"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.min_area > self.max_area or self.min_perimeter > self.max_perimeter:
            raise ConfigError("min bound exceeds max bound")
        if self.simplify_epsilon < 0:
            raise ConfigError("simplify_epsilon must be >= 0")
        if self.idw_power <= 0:
            raise ConfigError("idw_power must be positive")
        if self.connectivity not in (4, 8):
            raise ConfigError("connectivity must be 4 or 8")
        if self.cell_dx <= 0 or self.cell_dy <= 0:
            raise ConfigError("cell_dx/cell_dy must be positive")
        if self.rows < 0 or self.cols < 0:
            raise ConfigError("rows/cols must be >= 0 (0 = auto)")
        return self


def load_config(path: str | None) -> PipelineConfig:
    """Parse a flat key=value config file; '#' starts a comment line."""
    cfg = PipelineConfig()
    if path is None:
        return cfg.validate()
    types = {f.name: f.type for f in fields(PipelineConfig)}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in types:
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
        caster = int if types[key] in ("int", int) else float
        try:
            setattr(cfg, key, caster(value))
        except ValueError:
            raise ConfigError(f"{path}:{ln}: bad value for {key}: {value!r}") from None
    return cfg.validate()
