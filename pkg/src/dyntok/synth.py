"""Seeded synthetic token tensors for demos and tests."""

from __future__ import annotations

import numpy as np


def blob_image(rng: np.random.Generator, grid_h: int, grid_w: int, dim: int,
               n_blobs: int = 4, noise: float = 0.05) -> np.ndarray:
    """[L, D] tokens: cells take the prototype of their nearest blob seed plus noise."""
    seeds = rng.uniform(0, [grid_h, grid_w], size=(n_blobs, 2))
    protos = rng.standard_normal((n_blobs, dim))
    rows, cols = np.mgrid[0:grid_h, 0:grid_w]
    cells = np.stack([rows.ravel() + 0.5, cols.ravel() + 0.5], axis=1)
    owner = np.argmin(((cells[:, None, :] - seeds[None]) ** 2).sum(-1), axis=1)
    tokens = protos[owner] + noise * rng.standard_normal((grid_h * grid_w, dim))
    return tokens.astype(np.float32)


def phased_video(rng: np.random.Generator, num_frames: int, grid_h: int, grid_w: int,
                 dim: int, phases: int = 2, noise: float = 0.05) -> np.ndarray:
    """[M, L, D] tokens: consecutive runs of frames share one blob scene per phase."""
    scenes = [blob_image(rng, grid_h, grid_w, dim, noise=0.0) for _ in range(phases)]
    frames = []
    for m in range(num_frames):
        scene = scenes[min(m * phases // max(num_frames, 1), phases - 1)]
        frames.append(scene + noise * rng.standard_normal(scene.shape))
    return np.stack(frames).astype(np.float32)
