"""Minimal PNG I/O.

Writing uses only struct+zlib so output bytes depend on nothing but the
pixel buffer: fixed chunk layout (IHDR, one IDAT, IEND), filter 0 on
every scanline, no timestamps or ancillary chunks.  Reading goes
through Pillow, which handles arbitrary valid PNGs.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np
from PIL import Image


def _chunk(tag: bytes, payload: bytes) -> bytes:
    data = tag + payload
    return struct.pack(">I", len(payload)) + data + struct.pack(">I", zlib.crc32(data))


def png_bytes(image: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as 8-bit RGB PNG bytes."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError("expected an (H, W, 3) uint8 array")
    height, width = image.shape[:2]
    raw = b"".join(
        b"\x00" + image[row].tobytes() for row in range(height)
    )
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"".join(
        (
            b"\x89PNG\r\n\x1a\n",
            _chunk(b"IHDR", header),
            _chunk(b"IDAT", zlib.compress(raw, 9)),
            _chunk(b"IEND", b""),
        )
    )


def write_png(path: str | Path, image: np.ndarray) -> None:
    Path(path).write_bytes(png_bytes(image))


def read_png(path: str | Path) -> np.ndarray:
    """Decode any PNG (or other Pillow-readable image) to (H, W, 3) uint8."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)
