"""Splitting a frame sequence into events and pooling tokens within each event."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dyntok.dpc import ClusterResult, FeatureSet, cluster
from dyntok.errors import ValidationError
from dyntok.tensor_io import TokenMeta


@dataclass(frozen=True)
class FrameSequence:
    tokens: np.ndarray
    meta: TokenMeta

    def __post_init__(self):
        tokens = np.ascontiguousarray(self.tokens, dtype=np.float32)
        if tokens.ndim != 3 or tokens.shape[0] < 1:
            raise ValidationError(f"expected [M, L, D] tokens with M >= 1, got {tokens.shape}")
        if tokens.shape[1] != self.meta.tokens_per_frame or tokens.shape[2] != self.meta.feature_dim:
            raise ValidationError(
                f"tokens {tokens.shape} disagree with a {self.meta.grid_h}x{self.meta.grid_w} "
                f"grid of dim {self.meta.feature_dim}"
            )
        object.__setattr__(self, "tokens", tokens)

    @property
    def num_frames(self) -> int:
        return self.tokens.shape[0]

    @classmethod
    def from_array(cls, tokens, grid_h: int, grid_w: int) -> "FrameSequence":
        tokens = np.asarray(tokens)
        meta = TokenMeta(grid_h, grid_w, tokens.shape[0], tokens.shape[-1])
        return cls(tokens, meta)


@dataclass(frozen=True)
class EventSegmentation:
    events: tuple[tuple[int, ...], ...]

    @property
    def num_events(self) -> int:
        return len(self.events)

    def validate(self, num_frames: int) -> None:
        seen = sorted(m for ev in self.events for m in ev)
        if seen != list(range(num_frames)) or any(len(ev) == 0 for ev in self.events):
            raise ValidationError(f"events {self.events} do not partition {num_frames} frames")


@dataclass(frozen=True)
class EventTokens:
    """Every token of every frame in one event, frame-major, with (frame, cell) ids."""

    frames: tuple[int, ...]
    features: np.ndarray
    ids: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.ids)


def parse_ratio(ratio) -> Fraction:
    if isinstance(ratio, str):
        r = Fraction(ratio.strip())
    elif isinstance(ratio, float):
        r = Fraction(ratio).limit_denominator(1_000_000)
    else:
        r = Fraction(ratio)
    if not 0 < r <= 1:
        raise ValidationError(f"ratio must lie in (0, 1], got {r}")
    return r


def num_events(num_frames: int, ratio) -> int:
    return max(1, math.floor(num_frames * parse_ratio(ratio)))


def frame_pool(seq: FrameSequence) -> np.ndarray:
    """Mean over the tokens of each frame, [M, D]."""
    return seq.tokens.astype(np.float64).mean(axis=1).astype(np.float32)


def segment_events(frame_feats, ratio=Fraction(1, 16), k: int | None = None) -> EventSegmentation:
    """Cluster frames into events; events are ordered by their earliest frame."""
    frame_feats = np.asarray(frame_feats, dtype=np.float32)
    if frame_feats.ndim != 2 or frame_feats.shape[0] == 0:
        raise ValidationError(f"expected [M, D] frame features with M >= 1, got {frame_feats.shape}")
    e = num_events(frame_feats.shape[0], ratio)
    result = cluster(FeatureSet(frame_feats), e, k)
    events = sorted((tuple(int(i) for i in m) for m in result.members), key=lambda ev: ev[0])
    return EventSegmentation(tuple(events))


def event_tokens(seq: FrameSequence, seg: EventSegmentation) -> list[EventTokens]:
    seg.validate(seq.num_frames)
    n_cells = seq.tokens.shape[1]
    out = []
    for ev in seg.events:
        frames = tuple(sorted(ev))
        feats = seq.tokens[list(frames)].reshape(-1, seq.tokens.shape[2])
        ids = tuple((m, i) for m in frames for i in range(n_cells))
        out.append(EventTokens(frames, np.ascontiguousarray(feats), ids))
    return out


def merge_within_event(et: EventTokens, c: int, k: int | None = None) -> ClusterResult:
    if len(et) == 0:
        raise ValidationError("event has no tokens")
    return cluster(FeatureSet(et.features, et.ids), c, k)
