"""Heightfield terrain: grid storage with bilinear queries, box obstacles,
procedural arenas, and the flat-text export used for debugging and cockpit
preloading."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import OutOfTerrain


@dataclass
class Obstacle:
    """Axis-aligned box lying on the terrain, extents in meters."""

    x_start: float
    height: float
    depth: float          # extent along the travel (x) axis
    width: float
    y_center: float = 0.0

    @property
    def x_end(self) -> float:
        return self.x_start + self.depth


class Heightfield:
    """Regular elevation grid; world x maps to columns, y to rows.

    heights[iy, ix] is the elevation at world point
    (x0 + ix * resolution, y0 + iy * resolution). Queries interpolate
    bilinearly and raise OutOfTerrain outside the grid.
    """

    def __init__(self, heights: np.ndarray, resolution: float,
                 x0: float = 0.0, y0: float = 0.0):
        h = np.ascontiguousarray(heights, dtype=np.float64)
        if h.ndim != 2 or h.shape[0] < 2 or h.shape[1] < 2:
            raise ValueError("heights must be a 2-D grid, at least 2x2")
        if not np.all(np.isfinite(h)):
            raise ValueError("heights must be finite")
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.heights = h
        self.resolution = float(resolution)
        self.x0 = float(x0)
        self.y0 = float(y0)

    @property
    def length(self) -> int:
        """Cell count along x."""
        return int(self.heights.shape[1])

    @property
    def width(self) -> int:
        """Cell count along y."""
        return int(self.heights.shape[0])

    @property
    def x_max(self) -> float:
        return self.x0 + (self.length - 1) * self.resolution

    @property
    def y_max(self) -> float:
        return self.y0 + (self.width - 1) * self.resolution

    def height_at(self, x: float, y: float) -> float:
        h = _kernels.impl.bilinear(self.heights, self.resolution,
                                   self.x0, self.y0, float(x), float(y))
        if math.isnan(h):
            raise OutOfTerrain(f"query ({x:.3f}, {y:.3f}) outside terrain")
        return h

    def contains(self, x: float, y: float) -> bool:
        return (self.x0 <= x <= self.x_max) and (self.y0 <= y <= self.y_max)

    # -- flat text export ---------------------------------------------------
    def to_text(self) -> str:
        """One row per line, space-separated heights in meters (lossless)."""
        lines = [f"# resolution={self.resolution!r} x0={self.x0!r} y0={self.y0!r}"]
        for row in self.heights:
            lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Heightfield":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        meta = {"resolution": 1.0, "x0": 0.0, "y0": 0.0}
        if lines and lines[0].startswith("#"):
            for part in lines[0][1:].split():
                key, _, val = part.partition("=")
                if key in meta:
                    meta[key] = float(val)
            lines = lines[1:]
        rows = [[float(v) for v in ln.split()] for ln in lines]
        return Heightfield(np.array(rows, dtype=np.float64),
                           meta["resolution"], meta["x0"], meta["y0"])


def flat_arena(length_m: float = 20.0, width_m: float = 4.0,
               resolution: float = 0.02) -> Heightfield:
    """Flat rectangular arena with x in [0, length] and y centered on 0."""
    nx = int(round(length_m / resolution)) + 1
    ny = int(round(width_m / resolution)) + 1
    return Heightfield(np.zeros((ny, nx)), resolution, x0=0.0, y0=-width_m / 2.0)


def burn_obstacle(field: Heightfield, obstacle: Obstacle) -> None:
    """Raise the grid cells covered by the obstacle box to its height."""
    res = field.resolution
    ix0 = max(0, int(math.ceil((obstacle.x_start - field.x0) / res)))
    ix1 = min(field.length - 1, int(math.floor((obstacle.x_end - field.x0) / res)))
    half_w = obstacle.width / 2.0
    iy0 = max(0, int(math.ceil((obstacle.y_center - half_w - field.y0) / res)))
    iy1 = min(field.width - 1, int(math.floor((obstacle.y_center + half_w - field.y0) / res)))
    if ix1 < ix0 or iy1 < iy0:
        return
    region = field.heights[iy0:iy1 + 1, ix0:ix1 + 1]
    np.maximum(region, obstacle.height, out=region)


def undulating_arena(rng: np.random.Generator, length_m: float = 20.0,
                     width_m: float = 4.0, resolution: float = 0.02,
                     amplitude: float = 0.03, n_waves: int = 3) -> Heightfield:
    """Gently undulating arena: a seeded mix of low-amplitude sinusoids."""
    nx = int(round(length_m / resolution)) + 1
    ny = int(round(width_m / resolution)) + 1
    xs = np.arange(nx) * resolution
    ys = np.arange(ny) * resolution - width_m / 2.0
    gx, gy = np.meshgrid(xs, ys)
    h = np.zeros_like(gx)
    for _ in range(n_waves):
        lam_x = rng.uniform(2.0, 6.0)
        lam_y = rng.uniform(2.0, 6.0)
        phase_x = rng.uniform(0.0, 2.0 * math.pi)
        phase_y = rng.uniform(0.0, 2.0 * math.pi)
        amp = rng.uniform(0.3, 1.0) * amplitude / n_waves
        h += amp * np.sin(2.0 * math.pi * gx / lam_x + phase_x) \
                 * np.cos(2.0 * math.pi * gy / lam_y + phase_y)
    return Heightfield(h, resolution, x0=0.0, y0=-width_m / 2.0)
