"""Numba-accelerated kernels, byte-identical to the ``_numpy`` twins.

Floating-point expressions keep the exact grouping of the reference
implementations so outputs match bitwise, not just approximately.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def stamp_discs(
    image: np.ndarray,
    cx: np.ndarray,
    cy: np.ndarray,
    radius: int,
    colors: np.ndarray,
) -> None:
    h, w = image.shape[0], image.shape[1]
    r2 = radius * radius
    for n in range(cx.shape[0]):
        x0 = cx[n]
        y0 = cy[n]
        for dy in range(-radius, radius + 1):
            yy = y0 + dy
            if yy < 0 or yy >= h:
                continue
            for dx in range(-radius, radius + 1):
                if dx * dx + dy * dy > r2:
                    continue
                xx = x0 + dx
                if xx < 0 or xx >= w:
                    continue
                image[yy, xx, 0] = colors[n, 0]
                image[yy, xx, 1] = colors[n, 1]
                image[yy, xx, 2] = colors[n, 2]


@njit(cache=True)
def gradient_stimulus(scaled: np.ndarray) -> np.ndarray:
    h, w = scaled.shape[0], scaled.shape[1]
    out = np.empty((h - 2, w - 2), dtype=np.float64)
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            dx0 = (scaled[y, x + 1, 0] - scaled[y, x - 1, 0]) * 0.5
            dy0 = (scaled[y + 1, x, 0] - scaled[y - 1, x, 0]) * 0.5
            dx1 = (scaled[y, x + 1, 1] - scaled[y, x - 1, 1]) * 0.5
            dy1 = (scaled[y + 1, x, 1] - scaled[y - 1, x, 1]) * 0.5
            dx2 = (scaled[y, x + 1, 2] - scaled[y, x - 1, 2]) * 0.5
            dy2 = (scaled[y + 1, x, 2] - scaled[y - 1, x, 2]) * 0.5
            s = ((dx0 * dx0 + dy0 * dy0) + (dx1 * dx1 + dy1 * dy1)) + (
                dx2 * dx2 + dy2 * dy2
            )
            out[y - 1, x - 1] = np.sqrt(s)
    return out


@njit(cache=True)
def box_occupancy(foreground: np.ndarray, box_size: int) -> int:
    h, w = foreground.shape
    count = 0
    for by in range(0, h, box_size):
        for bx in range(0, w, box_size):
            hit = False
            for y in range(by, by + box_size):
                for x in range(bx, bx + box_size):
                    if foreground[y, x]:
                        hit = True
                        break
                if hit:
                    break
            if hit:
                count += 1
    return count
