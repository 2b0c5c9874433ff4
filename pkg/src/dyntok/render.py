"""Label grids to binary PPM (P6) images."""

from __future__ import annotations

import colorsys
import os
from pathlib import Path

import numpy as np

GOLDEN = 0.6180339887498949


def label_color(label: int) -> tuple[int, int, int]:
    hue = (label * GOLDEN) % 1.0
    # cycle value slightly so far-apart labels with near hues stay apart
    value = 0.95 - 0.2 * ((label // 7) % 3)
    r, g, b = colorsys.hsv_to_rgb(hue, 0.7, value)
    return round(r * 255), round(g * 255), round(b * 255)


def colorize(labels: np.ndarray, scale: int = 1) -> np.ndarray:
    labels = np.asarray(labels)
    uniq, inverse = np.unique(labels, return_inverse=True)
    palette = np.array([label_color(int(u)) for u in uniq], dtype=np.uint8)
    rgb = palette[inverse.reshape(labels.shape)]
    if scale > 1:
        rgb = rgb.repeat(scale, axis=0).repeat(scale, axis=1)
    return rgb


def encode_ppm(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def decode_ppm(buf: bytes) -> np.ndarray:
    parts = buf.split(maxsplit=4)
    if parts[0] != b"P6" or int(parts[3]) != 255:
        raise ValueError("not an 8-bit P6 image")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8, count=w * h * 3).reshape(h, w, 3)


def tile(grids: list[list[np.ndarray]]) -> np.ndarray:
    """Lay out rows of equally sized label grids into one array."""
    return np.concatenate([np.concatenate(row, axis=1) for row in grids], axis=0)


def write_ppm(labels: np.ndarray, path: str | os.PathLike, scale: int = 1) -> None:
    Path(path).write_bytes(encode_ppm(colorize(labels, scale)))
