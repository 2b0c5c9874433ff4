"""Merging one image's token grid while tracking which patch cells each token covers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dyntok.dpc import FeatureSet, cluster
from dyntok.errors import ValidationError
from dyntok.tensor_io import TokenMeta

Cell = tuple[int, int]


@dataclass(frozen=True)
class GridToken:
    feature: np.ndarray
    cells: frozenset[Cell]


@dataclass(frozen=True)
class MergedImage:
    features: np.ndarray
    regions: tuple[frozenset[Cell], ...]
    source_grid: tuple[int, int]

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != len(self.regions):
            raise ValidationError("one region per feature row is required")

    @property
    def tokens(self) -> list[GridToken]:
        return [GridToken(f, r) for f, r in zip(self.features, self.regions)]

    def __len__(self):
        return len(self.regions)


def grid_init(tensor, meta: TokenMeta) -> MergedImage:
    """One single-cell token per patch, row-major."""
    tensor = np.asarray(tensor, dtype=np.float32)
    h, w = meta.grid_h, meta.grid_w
    if tensor.ndim != 2 or tensor.shape[0] != h * w:
        raise ValidationError(f"tensor of shape {tensor.shape} does not fit a {h}x{w} grid")
    regions = tuple(frozenset({(i // w, i % w)}) for i in range(h * w))
    return MergedImage(np.ascontiguousarray(tensor), regions, (h, w))


def merge_step(img: MergedImage, c: int, k: int | None = None) -> MergedImage:
    """Cluster the current tokens into min(c, T); each output covers the union of its members."""
    result = cluster(FeatureSet(img.features), c, k)
    regions = tuple(
        frozenset().union(*(img.regions[i] for i in members)) for members in result.members
    )
    return MergedImage(result.merged, regions, img.source_grid)


def region_map(img: MergedImage) -> np.ndarray:
    """[grid_h, grid_w] array holding, for every cell, the index of the token covering it."""
    h, w = img.source_grid
    labels = np.full((h, w), -1, dtype=np.int64)
    for t, cells in enumerate(img.regions):
        for r, c in cells:
            labels[r, c] = t
    return labels
