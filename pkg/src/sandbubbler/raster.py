"""Rasterization of world-space patterns onto an RGB pixel canvas.

Each burrow gets its own hue; within a burrow, pellet brightness ramps
with placement order so early pellets read darker than late ones.
Pellets are drawn as filled discs with hard edges (no anti-aliasing) so
output bytes are reproducible across platforms.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .params import InvalidParameterError
from .pattern import Pattern, Pellet


@dataclass(frozen=True)
class CanvasSpec:
    """Pixel canvas plus the world window mapped onto it.

    The canvas is square 512x512 (the measures are defined on that
    size).  The world window is [-W, W] on both axes with +y pointing
    up.  The default window is a close-up: it crops the central part of
    a default-parameter pattern with fat pellet stamps, which gives the
    dense, texture-first images the measures respond to.  Pass a larger
    world_half_width (30-40) with a small pellet_radius to see whole
    patterns instead.
    """

    width: int = 512
    height: int = 512
    world_half_width: float = 5.5
    background: tuple[int, int, int] = (0, 0, 0)
    pellet_radius: int = 28

    def __post_init__(self) -> None:
        if self.width != 512 or self.height != 512:
            raise InvalidParameterError("canvas must be 512x512")
        if self.world_half_width <= 0:
            raise InvalidParameterError("world_half_width must be > 0")
        if self.pellet_radius < 1:
            raise InvalidParameterError("pellet_radius must be >= 1")
        bg = tuple(int(c) for c in self.background)
        if len(bg) != 3 or any(c < 0 or c > 255 for c in bg):
            raise InvalidParameterError("background must be an RGB triple in 0..255")
        object.__setattr__(self, "background", bg)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "world_half_width": self.world_half_width,
            "background": list(self.background),
            "pellet_radius": self.pellet_radius,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CanvasSpec":
        kwargs = dict(data)
        if "background" in kwargs:
            kwargs["background"] = tuple(kwargs["background"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Palette:
    """Hue/brightness scheme: one hue per burrow, brightness by order."""

    base_hue: float = 0.0
    hue_step: float = 0.03
    saturation: float = 0.2
    v_min: float = 0.8
    v_max: float = 1.0

    def __post_init__(self) -> None:
        for name in ("base_hue", "hue_step", "saturation", "v_min", "v_max"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must be in [0, 1]")
        if self.v_min > self.v_max:
            raise InvalidParameterError("v_min must be <= v_max")

    def to_dict(self) -> dict:
        return {
            "base_hue": self.base_hue,
            "hue_step": self.hue_step,
            "saturation": self.saturation,
            "v_min": self.v_min,
            "v_max": self.v_max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Palette":
        return cls(**data)


def world_to_pixel(
    p: tuple[float, float], spec: CanvasSpec
) -> Optional[tuple[int, int]]:
    """Map a world point into pixel coordinates, or None if outside.

    [-W, W]^2 maps affinely onto [0, width) x [0, height) with world +y
    up (pixel row 0 is world top).  The right and bottom window edges
    fall outside the half-open pixel range.
    """
    x, y = p
    w2 = 2.0 * spec.world_half_width
    px = math.floor((x + spec.world_half_width) / w2 * spec.width)
    py = math.floor((spec.world_half_width - y) / w2 * spec.height)
    if 0 <= px < spec.width and 0 <= py < spec.height:
        return (px, py)
    return None


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    """Hexcone HSV to 8-bit RGB, channels rounded to nearest."""
    for name, val in (("h", h), ("s", s), ("v", v)):
        if not 0.0 <= val <= 1.0:
            raise InvalidParameterError(f"{name} must be in [0, 1]")
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return (int(round(r * 255)), int(round(g * 255)), int(round(b * 255)))


def burrow_hue(burrow_index: int, palette: Palette) -> float:
    """Hue for the given 1-based burrow index."""
    return (palette.base_hue + (burrow_index - 1) * palette.hue_step) % 1.0


def _brightness_ramp(count: int, palette: Palette) -> np.ndarray:
    # single pellet degenerates to v_max
    if count == 1:
        return np.array([palette.v_max])
    ramp = np.arange(count, dtype=np.float64) / (count - 1)
    return palette.v_min + (palette.v_max - palette.v_min) * ramp


def _burrow_colors(count: int, burrow_index: int, palette: Palette) -> np.ndarray:
    """(count, 3) uint8 colors for one burrow's pellets in placement order.

    HSV brightness scales the unit-value RGB linearly, so the whole ramp
    is one vectorized multiply with the same rounding as hsv_to_rgb.
    """
    hue = burrow_hue(burrow_index, palette)
    unit = np.array(colorsys.hsv_to_rgb(hue, palette.saturation, 1.0))
    values = _brightness_ramp(count, palette)
    channels = values[:, None] * unit[None, :] * 255.0
    return np.round(channels).astype(np.uint8)


def colorize(pattern: Pattern, palette: Palette) -> list[tuple[Pellet, tuple[int, int, int]]]:
    """Pair every pellet with its render color, in placement order."""
    out: list[tuple[Pellet, tuple[int, int, int]]] = []
    for burrow in pattern.burrows:
        colors = _burrow_colors(burrow.pellet_count, burrow.burrow_index, palette)
        for pellet, rgb in zip(burrow.pellets, colors):
            out.append((pellet, (int(rgb[0]), int(rgb[1]), int(rgb[2]))))
    return out


def rasterize(pattern: Pattern, spec: CanvasSpec, palette: Palette) -> np.ndarray:
    """Render the pattern to an (H, W, 3) uint8 pixel buffer.

    Pellets draw in placement order (later overdraw earlier).  Discs
    straddling the window border keep their in-window pixels; pellets
    fully outside draw nothing.
    """
    image = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    image[:, :] = np.array(spec.background, dtype=np.uint8)
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    colors: list[np.ndarray] = []
    w2 = 2.0 * spec.world_half_width
    for burrow in pattern.burrows:
        if burrow.pellet_count == 0:
            continue
        wx = burrow.positions[:, 0]
        wy = burrow.positions[:, 1]
        px = np.floor((wx + spec.world_half_width) / w2 * spec.width)
        py = np.floor((spec.world_half_width - wy) / w2 * spec.height)
        # clamp to a safe integer band; stamp_discs clips per pixel
        px = np.clip(px, -1e9, 1e9).astype(np.int64)
        py = np.clip(py, -1e9, 1e9).astype(np.int64)
        xs.append(px)
        ys.append(py)
        colors.append(_burrow_colors(burrow.pellet_count, burrow.burrow_index, palette))
    if xs:
        kernels.stamp_discs(
            image,
            np.concatenate(xs),
            np.concatenate(ys),
            spec.pellet_radius,
            np.concatenate(colors),
        )
    return image
