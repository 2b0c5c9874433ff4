"""Progressive multi-step aggregation for images and videos, plus the optional projection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from dyntok.dpc import FeatureSet, cluster
from dyntok.errors import ValidationError
from dyntok.tensor_io import TokenMeta, read_tensor
from dyntok.temporal import (
    EventSegmentation,
    FrameSequence,
    event_tokens,
    frame_pool,
    segment_events,
)

DEFAULT_STEPS = (64, 32, 16)
DEFAULT_RATIO = Fraction(1, 16)

Origin = tuple[int, int]  # (frame, cell index); frame is 0 for images
Span = tuple[int, int]  # (start, length)


@dataclass
class MultiScaleRep:
    tokens: np.ndarray
    step_spans: list[list[Span]]
    event_spans: list[Span]
    provenance: list[frozenset[Origin]]
    grid: tuple[int, int]
    events: EventSegmentation | None = None
    steps: tuple[int, ...] = field(default=DEFAULT_STEPS)

    @property
    def num_tokens(self) -> int:
        return self.tokens.shape[0]

    def spans_json(self) -> dict:
        return {
            "events": [{"start": s, "len": n} for s, n in self.event_spans],
            "steps": [[{"start": s, "len": n} for s, n in group] for group in self.step_spans],
        }


def validate_steps(steps: Sequence[int]) -> tuple[int, ...]:
    steps = tuple(int(s) for s in steps)
    if not steps or any(s < 1 for s in steps):
        raise ValidationError(f"steps must be a non-empty list of positive counts, got {steps}")
    if any(a <= b for a, b in zip(steps, steps[1:])):
        raise ValidationError(f"steps must be strictly decreasing, got {steps}")
    return steps


def aggregate(features: np.ndarray, origins: Sequence[frozenset], steps, k: int | None = None):
    """Chain clustering steps; returns a list of (features, origins) per step.

    Each step clusters the previous step's output, so step s+1 regions are
    unions of step s regions.
    """
    out = []
    feats, regions = features, list(origins)
    for c in steps:
        result = cluster(FeatureSet(feats), c, k)
        regions = [frozenset().union(*(regions[i] for i in m)) for m in result.members]
        feats = result.merged
        out.append((feats, regions))
    return out


def _concat(levels, start: int):
    spans, feats, prov = [], [], []
    for f, r in levels:
        spans.append((start, len(r)))
        start += len(r)
        feats.append(f)
        prov.extend(r)
    return spans, feats, prov


def multiscale_image(tensor, meta: TokenMeta, steps=DEFAULT_STEPS, k: int | None = None) -> MultiScaleRep:
    steps = validate_steps(steps)
    tensor = np.ascontiguousarray(tensor, dtype=np.float32)
    if tensor.ndim != 2 or tensor.shape != (meta.tokens_per_frame, meta.feature_dim):
        raise ValidationError(f"image tensor {tensor.shape} does not match metadata")
    origins = [frozenset({(0, i)}) for i in range(tensor.shape[0])]
    spans, feats, prov = _concat(aggregate(tensor, origins, steps, k), 0)
    return MultiScaleRep(
        tokens=np.concatenate(feats),
        step_spans=[spans],
        event_spans=[],
        provenance=prov,
        grid=(meta.grid_h, meta.grid_w),
        steps=steps,
    )


def multiscale_video(
    seq: FrameSequence,
    ratio=DEFAULT_RATIO,
    steps=DEFAULT_STEPS,
    k: int | None = None,
    temporal_k: int | None = None,
) -> MultiScaleRep:
    """Segment into events, then aggregate each event's pooled tokens; events stay in order."""
    steps = validate_steps(steps)
    seg = segment_events(frame_pool(seq), ratio, temporal_k)
    step_spans, event_spans, feats, prov = [], [], [], []
    start = 0
    for et in event_tokens(seq, seg):
        origins = [frozenset({i}) for i in et.ids]
        spans, f, p = _concat(aggregate(et.features, origins, steps, k), start)
        event_len = sum(n for _, n in spans)
        event_spans.append((start, event_len))
        step_spans.append(spans)
        feats.extend(f)
        prov.extend(p)
        start += event_len
    return MultiScaleRep(
        tokens=np.concatenate(feats),
        step_spans=step_spans,
        event_spans=event_spans,
        provenance=prov,
        grid=(seq.meta.grid_h, seq.meta.grid_w),
        events=seg,
        steps=steps,
    )


def step_labels(rep: MultiScaleRep, num_frames: int) -> list[np.ndarray]:
    """Per step, a [frames, grid_h, grid_w] label array.

    Labels number the step's tokens consecutively across events, so they are
    dense in [0, tokens at that step).
    """
    h, w = rep.grid
    n_steps = len(rep.step_spans[0])
    frames = max(num_frames, 1)
    out = []
    for s in range(n_steps):
        labels = np.full((frames, h, w), -1, dtype=np.int64)
        label = 0
        for group in rep.step_spans:
            start, n = group[s]
            for t in range(start, start + n):
                for frame, cell in rep.provenance[t]:
                    labels[frame, cell // w, cell % w] = label
                label += 1
        out.append(labels)
    return out


@dataclass(frozen=True)
class Projection:
    weight: np.ndarray
    bias: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=np.float32)
        if w.ndim != 2:
            raise ValidationError(f"projection weight must be [D, D_out], got {w.shape}")
        object.__setattr__(self, "weight", w)
        if self.bias is not None:
            b = np.asarray(self.bias, dtype=np.float32).reshape(-1)
            if b.shape != (w.shape[1],):
                raise ValidationError(f"bias of shape {b.shape} does not match D_out={w.shape[1]}")
            object.__setattr__(self, "bias", b)


def load_projection(weight_path, bias_path=None) -> Projection:
    weight = read_tensor(weight_path).array()
    bias = read_tensor(bias_path).array() if bias_path is not None else None
    return Projection(weight, bias)


def apply_projection(rep, p: Projection) -> np.ndarray:
    """tokens @ weight (+ bias), evaluated in float64 and returned as float32."""
    tokens = rep.tokens if isinstance(rep, MultiScaleRep) else np.asarray(rep, dtype=np.float32)
    if tokens.ndim != 2 or tokens.shape[1] != p.weight.shape[0]:
        raise ValidationError(
            f"tokens of shape {tokens.shape} cannot be projected by weight {p.weight.shape}"
        )
    out = tokens.astype(np.float64) @ p.weight.astype(np.float64)
    if p.bias is not None:
        out += p.bias.astype(np.float64)
    return out.astype(np.float32)
