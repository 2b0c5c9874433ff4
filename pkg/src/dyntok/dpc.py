"""Density-peaks clustering with KNN densities (DPC-KNN).

All distances are squared Euclidean, computed in float64 from the float32
inputs. Ranking work (density comparisons, center scores) happens in the log
domain: ``log rho = -mean_knn_sqdist`` is exact where ``exp`` would underflow
for the large feature norms typical of encoder tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from dyntok.errors import DegenerateInputError, ValidationError


@dataclass(frozen=True)
class FeatureSet:
    """N feature vectors plus an opaque, unique id per vector."""

    vectors: np.ndarray
    ids: tuple = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.vectors)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError(f"expected a non-empty [N, D] array, got shape {v.shape}")
        v = np.ascontiguousarray(v, dtype=np.float32)
        ids = tuple(range(v.shape[0])) if self.ids is None else tuple(self.ids)
        if len(ids) != v.shape[0]:
            raise ValidationError(f"{len(ids)} ids for {v.shape[0]} vectors")
        if len(set(ids)) != len(ids):
            raise ValidationError("ids must be unique")
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "ids", ids)

    def __len__(self):
        return self.vectors.shape[0]


@dataclass(frozen=True)
class DensityProfile:
    rho: np.ndarray
    delta: np.ndarray
    k_used: int
    # -mean KNN squared distance; log(rho) without underflow
    log_rho: np.ndarray


@dataclass
class ClusterResult:
    centers: np.ndarray
    assignment: np.ndarray
    merged: np.ndarray
    member_ids: list[list[Hashable]]
    members: list[np.ndarray]
    profile: DensityProfile | None = None

    @property
    def num_clusters(self) -> int:
        return len(self.centers)


def default_k(n: int) -> int:
    """Neighbour count used when none is configured: round(sqrt(N)), at least 1."""
    return max(1, round(math.sqrt(n)))


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, FeatureSet):
        return x.vectors
    x = np.asarray(x, dtype=np.float32)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValidationError(f"expected [N, D] features, got shape {x.shape}")
    return x


def pairwise_sqdist(x) -> np.ndarray:
    """Symmetric [N, N] float64 matrix of squared Euclidean distances."""
    x = _as_matrix(x).astype(np.float64)
    if x.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(x, "sqeuclidean"))


def _resolve_k(n: int, k: int | None) -> int:
    if n < 2:
        raise DegenerateInputError("local density needs at least two vectors")
    if k is None:
        k = default_k(n)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    return min(k, n - 1)


def _knn_mean(d2: np.ndarray, k: int) -> np.ndarray:
    n = d2.shape[0]
    others = d2.copy()
    # exclude self by position, not by value: duplicates still count as neighbours
    others[np.arange(n), np.arange(n)] = np.inf
    nearest = np.partition(others, k - 1, axis=1)[:, :k]
    nearest.sort(axis=1)
    return nearest.sum(axis=1) / k


def _delta(d2: np.ndarray, denser: np.ndarray) -> np.ndarray:
    """``denser[i, j]`` is True when vector j has strictly higher density than i."""
    delta = np.where(denser, d2, np.inf).min(axis=1)
    peak = ~denser.any(axis=1)
    delta[peak] = d2[peak].max(axis=1)
    return delta


def _top_scores(score: np.ndarray, c: int) -> np.ndarray:
    n = len(score)
    order = np.lexsort((np.arange(n), -score))
    return np.sort(order[: min(c, n)])


def _assign(d2_to_centers: np.ndarray, centers: np.ndarray) -> np.ndarray:
    assignment = np.argmin(d2_to_centers, axis=1)
    # a duplicate of an earlier center would otherwise steal it
    assignment[centers] = np.arange(len(centers))
    return assignment


def local_density(fs, k: int | None = None) -> np.ndarray:
    """rho_i = exp(-mean squared distance to the k nearest other vectors)."""
    d2 = pairwise_sqdist(fs)
    k = _resolve_k(d2.shape[0], k)
    return np.exp(-_knn_mean(d2, k))


def distance_index(fs, rho) -> np.ndarray:
    d2 = pairwise_sqdist(fs)
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != (d2.shape[0],):
        raise ValidationError(f"rho has shape {rho.shape}, expected ({d2.shape[0]},)")
    return _delta(d2, rho[None, :] > rho[:, None])


def density_profile(fs, k: int | None = None, d2: np.ndarray | None = None) -> DensityProfile:
    if d2 is None:
        d2 = pairwise_sqdist(fs)
    k = _resolve_k(d2.shape[0], k)
    mean = _knn_mean(d2, k)
    delta = _delta(d2, mean[None, :] < mean[:, None])
    return DensityProfile(rho=np.exp(-mean), delta=delta, k_used=k, log_rho=-mean)


def select_centers(rho, delta, c: int) -> np.ndarray:
    """Indices of the c largest rho*delta scores, ties to the lower index, ascending."""
    if c < 1:
        raise ValidationError(f"cluster count must be >= 1, got {c}")
    rho = np.asarray(rho, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if rho.shape != delta.shape or rho.ndim != 1:
        raise ValidationError("rho and delta must be 1-D arrays of equal length")
    return _top_scores(rho * delta, c)


def _log_scores(profile: DensityProfile) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return profile.log_rho + np.log(profile.delta)


def assign_to_centers(fs, centers: Sequence[int]) -> np.ndarray:
    """Cluster slot (position in ``centers``) of the nearest center for each vector."""
    x = _as_matrix(fs)
    centers = np.asarray(centers, dtype=np.intp)
    if centers.ndim != 1 or len(centers) == 0:
        raise ValidationError("centers must be a non-empty list of indices")
    if centers.min() < 0 or centers.max() >= x.shape[0]:
        raise ValidationError("center index out of range")
    if len(np.unique(centers)) != len(centers):
        raise ValidationError("center indices must be distinct")
    x64 = x.astype(np.float64)
    return _assign(cdist(x64, x64[centers], "sqeuclidean"), centers)


def _identity(fs: FeatureSet) -> ClusterResult:
    n = len(fs)
    idx = np.arange(n)
    return ClusterResult(
        centers=idx,
        assignment=idx.copy(),
        merged=fs.vectors.copy(),
        member_ids=[[i] for i in fs.ids],
        members=[np.array([i]) for i in range(n)],
    )


def cluster(fs, c: int, k: int | None = None) -> ClusterResult:
    """Merge ``fs`` into min(c, N) tokens: density, distance index, centers, assignment, mean."""
    if not isinstance(fs, FeatureSet):
        fs = FeatureSet(fs)
    if c < 1:
        raise ValidationError(f"cluster count must be >= 1, got {c}")
    n = len(fs)
    if n == 1 or c >= n:
        return _identity(fs)

    d2 = pairwise_sqdist(fs)
    profile = density_profile(fs, k, d2=d2)
    centers = _top_scores(_log_scores(profile), c)
    assignment = _assign(d2[:, centers], centers)

    x64 = fs.vectors.astype(np.float64)
    order = np.argsort(assignment, kind="stable")
    bounds = np.searchsorted(assignment[order], np.arange(len(centers) + 1))
    members = [order[bounds[s] : bounds[s + 1]] for s in range(len(centers))]
    merged = np.stack([x64[m].mean(axis=0) for m in members]).astype(np.float32)
    return ClusterResult(
        centers=centers,
        assignment=assignment,
        merged=merged,
        member_ids=[[fs.ids[i] for i in m] for m in members],
        members=members,
        profile=profile,
    )
