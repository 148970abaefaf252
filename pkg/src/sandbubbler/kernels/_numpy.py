"""Pure-numpy kernels, the portable reference implementations.

Each function here is byte-for-byte equivalent to its accelerated twin
in ``_numba``: identical floating-point operation order, identical
overdraw semantics.  The test suite asserts the equivalence.
"""

from __future__ import annotations

import numpy as np


def _disc_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    span = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    inside = dx * dx + dy * dy <= radius * radius
    return dy[inside].ravel(), dx[inside].ravel()


def stamp_discs(
    image: np.ndarray,
    cx: np.ndarray,
    cy: np.ndarray,
    radius: int,
    colors: np.ndarray,
) -> None:
    """Draw filled discs onto image in place; later discs overdraw earlier.

    image is (H, W, 3) uint8; cx, cy are integer pixel centers in draw
    order; colors is (N, 3) uint8.  Pixels outside the canvas are
    clipped silently.
    """
    n = cx.shape[0]
    if n == 0:
        return
    h, w = image.shape[0], image.shape[1]
    off_y, off_x = _disc_offsets(radius)
    yy = (cy[:, None] + off_y[None, :]).ravel()
    xx = (cx[:, None] + off_x[None, :]).ravel()
    stamp = np.repeat(np.arange(n, dtype=np.int64), off_y.shape[0])
    keep = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
    yy, xx, stamp = yy[keep], xx[keep], stamp[keep]
    flat = yy * w + xx
    # priority scatter: highest stamp (= latest pellet) wins each pixel
    winner = np.full(h * w, -1, dtype=np.int64)
    np.maximum.at(winner, flat, stamp)
    won = stamp == winner[flat]
    image.reshape(-1, 3)[flat[won]] = colors[stamp[won]]


def gradient_stimulus(scaled: np.ndarray) -> np.ndarray:
    """Combined RGB gradient magnitude at each interior pixel.

    scaled is (H, W, 3) float64 with channels in [0, 1].  Central
    differences, then per channel dx^2 + dy^2, summed in fixed channel
    order, square-rooted.  Returns (H-2, W-2) float64.
    """
    dx = (scaled[1:-1, 2:, :] - scaled[1:-1, :-2, :]) * 0.5
    dy = (scaled[2:, 1:-1, :] - scaled[:-2, 1:-1, :]) * 0.5
    s = (
        (dx[:, :, 0] * dx[:, :, 0] + dy[:, :, 0] * dy[:, :, 0])
        + (dx[:, :, 1] * dx[:, :, 1] + dy[:, :, 1] * dy[:, :, 1])
    ) + (dx[:, :, 2] * dx[:, :, 2] + dy[:, :, 2] * dy[:, :, 2])
    return np.sqrt(s)


def box_occupancy(foreground: np.ndarray, box_size: int) -> int:
    """Count box_size x box_size grid cells containing any foreground pixel.

    foreground is a (H, W) bool array; box_size must divide both
    dimensions.
    """
    h, w = foreground.shape
    blocks = foreground.reshape(h // box_size, box_size, w // box_size, box_size)
    return int(blocks.any(axis=(1, 3)).sum())
