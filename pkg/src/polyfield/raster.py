"""Anti-aliased rasterization of scenes and the thresholded pixel domain.

Pixel centers sit at integer+0.5 coordinates; the image origin is the
canvas top-left with x rightward and y downward, and arrays are indexed
[row, col]. Coverage is approximated by a clamped signed-distance ramp,
which at thin stroke widths is indistinguishable from area integration.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .geometry import Scene, closest_point_many

__all__ = [
    "RasterImage",
    "pixel_centers",
    "rasterize",
    "scene_distances",
    "mask",
    "write_png",
    "read_png",
]


def pixel_centers(width: int, height: int) -> np.ndarray:
    """(height*width, 2) array of pixel-center coordinates, row-major."""
    xs = np.arange(width) + 0.5
    ys = np.arange(height) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


@dataclass(frozen=True)
class RasterImage:
    """Grayscale image with float intensities in [0, 1], shape (height, width)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.ascontiguousarray(self.pixels, dtype=float)
        if px.shape != (self.height, self.width):
            raise ValueError("pixel grid does not match declared dimensions")
        if np.any(px < 0.0) or np.any(px > 1.0):
            raise ValueError("intensities must lie in [0, 1]")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)


def scene_distances(scene: Scene, cutoff: float | None = None):
    """Per-primitive closest-point parameters and distances at all pixel centers.

    Returns (T, D) of shape (n_primitives, height*width). Distances beyond
    cutoff may overestimate (their refinement is skipped), which cannot
    change any intensity once the ramp has clamped to zero there.
    """
    pts = pixel_centers(scene.width, scene.height)
    n = len(scene.primitives)
    T = np.zeros((n, len(pts)))
    D = np.full((n, len(pts)), np.inf)
    for k, prim in enumerate(scene.primitives):
        T[k], D[k] = closest_point_many(prim, pts, refine_below=cutoff)
    return T, D


def rasterize(scene: Scene, stroke_width: float = 1.5) -> RasterImage:
    """Render the scene with the clamped distance ramp
    intensity = clamp(stroke_width/2 + 0.5 - distance, 0, 1)."""
    if stroke_width <= 0.0 or stroke_width > 4.0:
        raise ValueError("stroke width must lie in (0, 4] px")
    cutoff = stroke_width / 2.0 + 0.5
    if not scene.primitives:
        return RasterImage(scene.width, scene.height, np.zeros((scene.height, scene.width)))
    _, D = scene_distances(scene, cutoff)
    d = D.min(axis=0)
    intensity = np.clip(cutoff - d, 0.0, 1.0)
    return RasterImage(scene.width, scene.height, intensity.reshape(scene.height, scene.width))


def mask(image: RasterImage, threshold: float = 0.5) -> np.ndarray:
    """Boolean (height, width) grid of pixels at or above the threshold."""
    return image.pixels >= threshold


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def write_png(image: RasterImage, path) -> None:
    """Write 8-bit grayscale PNG, intensity quantized by round(255*v).

    Hand-rolled encoder (IHDR/IDAT/IEND, filter 0) so output bytes are a
    pure function of the pixel values.
    """
    quant = np.round(image.pixels * 255.0).astype(np.uint8)
    raw = b"".join(b"\x00" + quant[r].tobytes() for r in range(image.height))
    ihdr = struct.pack(">IIBBBBB", image.width, image.height, 8, 0, 0, 0, 0)
    data = (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(raw, 9))
        + _chunk(b"IEND", b"")
    )
    with open(path, "wb") as fh:
        fh.write(data)


def read_png(path) -> RasterImage:
    """Read a grayscale PNG back to float intensities in [0, 1]."""
    from PIL import Image

    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=float) / 255.0
    return RasterImage(arr.shape[1], arr.shape[0], arr)
