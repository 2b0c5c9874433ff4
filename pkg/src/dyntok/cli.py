"""``dyntok`` command line: merge-image, merge-video, visualize, bench, gen.

Exit codes: 0 success, 1 internal error, 2 input or validation error. Errors
are reported on stderr as a one-line JSON object ``{"error": kind, "message": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from dyntok.dpc import cluster
from dyntok.errors import DyntokError, TensorFormatError, ValidationError
from dyntok.multiscale import (
    DEFAULT_RATIO,
    DEFAULT_STEPS,
    MultiScaleRep,
    apply_projection,
    load_projection,
    multiscale_image,
    multiscale_video,
    step_labels,
    validate_steps,
)
from dyntok.render import colorize, encode_ppm, tile
from dyntok.synth import blob_image, phased_video
from dyntok.temporal import FrameSequence, parse_ratio
from dyntok.tensor_io import TensorFile, TokenMeta, load_tokens, write_meta, write_tensor


@dataclass
class RunConfig:
    input: Path | None = None
    out: Path | None = None
    mode: str = "image"
    steps: tuple[int, ...] = DEFAULT_STEPS
    knn_k: int | None = None
    temporal_k: int | None = None
    ratio: Fraction = DEFAULT_RATIO
    seed: int | None = None
    proj_weight: Path | None = None
    proj_bias: Path | None = None
    scale: int = 8


def _parse_steps(text: str) -> tuple[int, ...]:
    try:
        return validate_steps(int(s) for s in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_ratio(text: str) -> Fraction:
    try:
        return parse_ratio(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like 16x16, got {text!r}") from exc
    return h, w


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=1) + "\n")


def _write_outputs(rep: MultiScaleRep, meta: TokenMeta, cfg: RunConfig) -> None:
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    write_tensor(TensorFile.from_array(rep.tokens), out / "tokens.npy")
    _dump_json(rep.spans_json(), out / "spans.json")
    _dump_json([sorted(map(list, p)) for p in rep.provenance], out / "provenance.json")

    labels = step_labels(rep, meta.num_frames)
    steps = []
    for s, lab in enumerate(labels):
        entry = {"step": s, "clusters": int(lab.max()) + 1}
        if meta.num_frames == 0:
            entry["labels"] = lab[0].tolist()
        else:
            entry["frames"] = lab.tolist()
        steps.append(entry)
    regions = {"grid_h": meta.grid_h, "grid_w": meta.grid_w, "num_frames": meta.num_frames,
               "steps": steps}
    _dump_json(regions, out / "regions.json")

    if meta.num_frames == 0:
        for s, lab in enumerate(labels):
            (out / f"step{s}.ppm").write_bytes(encode_ppm(colorize(lab[0], cfg.scale)))
    else:
        frames_dir = out / "frames"
        frames_dir.mkdir(exist_ok=True)
        for s, lab in enumerate(labels):
            for m in range(lab.shape[0]):
                path = frames_dir / f"step{s}_frame{m:04d}.ppm"
                path.write_bytes(encode_ppm(colorize(lab[m], cfg.scale)))

    if cfg.proj_weight is not None:
        proj = load_projection(cfg.proj_weight, cfg.proj_bias)
        write_tensor(TensorFile.from_array(apply_projection(rep, proj)), out / "projected.npy")


def cmd_merge_image(cfg: RunConfig) -> int:
    tokens, meta = load_tokens(cfg.input)
    if meta.num_frames != 0:
        raise ValidationError("input has frames; use merge-video")
    rep = multiscale_image(tokens, meta, cfg.steps, cfg.knn_k)
    _write_outputs(rep, meta, cfg)
    print(f"{tokens.shape[0]} -> {rep.num_tokens}")
    return 0


def cmd_merge_video(cfg: RunConfig) -> int:
    tokens, meta = load_tokens(cfg.input)
    if meta.num_frames == 0:
        raise ValidationError("input is a single image; use merge-image")
    seq = FrameSequence(tokens, meta)
    rep = multiscale_video(seq, cfg.ratio, cfg.steps, cfg.knn_k, cfg.temporal_k)
    _write_outputs(rep, meta, cfg)
    print(f"{meta.num_frames}x{meta.tokens_per_frame} -> {rep.num_tokens} "
          f"({len(rep.event_spans)} events)")
    return 0


def bench_rows(sizes, dim: int, repeats: int = 5, seed: int = 0, cluster_frac: float = 0.25):
    """Median wall-clock of one clustering call per size."""
    rows = []
    for n in sizes:
        x = np.random.default_rng([seed, n]).standard_normal((n, dim)).astype(np.float32)
        c = max(1, int(n * cluster_frac))
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            cluster(x, c)
            times.append(time.perf_counter() - t0)
        rows.append((n, dim, repeats, statistics.median(times)))
    return rows


def cmd_bench(sizes, dim: int, out: Path, repeats: int = 5, seed: int = 0) -> int:
    rows = bench_rows(sizes, dim, repeats, seed)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "dim", "repeats", "seconds"])
        for n, d, r, t in rows:
            w.writerow([n, d, r, f"{t:.6f}"])
    for n, _, _, t in rows:
        print(f"n={n} {t:.4f}s")
    return 0


def _load_regions(path: Path) -> dict:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"{path} is not valid JSON") from exc
    if not isinstance(d, dict) or not isinstance(d.get("steps"), list) or not d["steps"]:
        raise TensorFormatError("region file needs a non-empty 'steps' list")
    return d


def _as_label_array(grid, what: str) -> np.ndarray:
    try:
        arr = np.array(grid)
    except ValueError as exc:
        raise TensorFormatError(f"{what} is ragged") from exc
    if arr.ndim < 2 or arr.size == 0 or not np.issubdtype(arr.dtype, np.integer) or arr.min() < 0:
        raise TensorFormatError(f"{what} must be a non-empty grid of non-negative integers")
    return arr


def cmd_visualize(regions: Path, out: Path, step: int | None = None,
                  frame: int | None = None, scale: int = 8) -> int:
    d = _load_regions(regions)
    chosen = d["steps"]
    if step is not None:
        if not 0 <= step < len(chosen):
            raise ValidationError(f"step {step} not in region file")
        chosen = [chosen[step]]
    columns = []
    for entry in chosen:
        if not isinstance(entry, dict):
            raise TensorFormatError("each step entry must be an object")
        if "labels" in entry:
            arr = _as_label_array(entry["labels"], "labels")[None]
        elif "frames" in entry:
            arr = _as_label_array(entry["frames"], "frames")
        else:
            raise TensorFormatError("step entry needs 'labels' or 'frames'")
        if arr.ndim != 3:
            raise TensorFormatError("label grids must be 2-D")
        if frame is not None:
            if not 0 <= frame < arr.shape[0]:
                raise ValidationError(f"frame {frame} not in region file")
            arr = arr[frame : frame + 1]
        columns.append(arr)
    if len({c.shape for c in columns}) != 1:
        raise TensorFormatError("steps have mismatched grid shapes")
    # rows are frames, columns are steps
    grid = tile([[col[m] for col in columns] for m in range(columns[0].shape[0])])
    Path(out).write_bytes(encode_ppm(colorize(grid, scale)))
    return 0


def cmd_gen(mode: str, grid: tuple[int, int], frames: int, dim: int, seed: int, out: Path,
            blobs: int = 4, phases: int = 2, noise: float = 0.05) -> int:
    h, w = grid
    rng = np.random.default_rng(seed)
    if mode == "image":
        tokens = blob_image(rng, h, w, dim, blobs, noise)
        meta = TokenMeta(h, w, 0, dim)
    else:
        if frames < 1:
            raise ValidationError("video mode needs --frames >= 1")
        tokens = phased_video(rng, frames, h, w, dim, phases, noise)
        meta = TokenMeta(h, w, frames, dim)
    write_tensor(TensorFile.from_array(tokens), out)
    write_meta(meta, out)
    print(f"wrote {out} shape={list(tokens.shape)}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.exit(_fail("usage", message, 2))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dyntok", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def merge_args(sp):
        sp.add_argument("--input", type=Path, required=True)
        sp.add_argument("--out", type=Path, required=True)
        sp.add_argument("--steps", type=_parse_steps, default=DEFAULT_STEPS)
        sp.add_argument("--knn", type=int, default=None, help="fixed K for token clustering")
        sp.add_argument("--proj-weight", type=Path, default=None)
        sp.add_argument("--proj-bias", type=Path, default=None)
        sp.add_argument("--scale", type=int, default=8, help="pixels per grid cell in PPMs")

    merge_args(sub.add_parser("merge-image", help="multi-scale merge of one [L, D] image"))
    mv = sub.add_parser("merge-video", help="event segmentation + multi-scale merge of [M, L, D]")
    merge_args(mv)
    mv.add_argument("--ratio", type=_parse_ratio, default=DEFAULT_RATIO)
    mv.add_argument("--temporal-knn", type=int, default=None, help="fixed K for frame clustering")

    vz = sub.add_parser("visualize", help="render a regions.json to PPM")
    vz.add_argument("--regions", type=Path, required=True)
    vz.add_argument("--out", type=Path, required=True)
    vz.add_argument("--step", type=int, default=None)
    vz.add_argument("--frame", type=int, default=None)
    vz.add_argument("--scale", type=int, default=8)

    bn = sub.add_parser("bench", help="time the clustering kernel over sizes")
    bn.add_argument("--sizes", type=_parse_sizes, default=[256, 512, 1024])
    bn.add_argument("--dim", type=int, default=1024)
    bn.add_argument("--repeats", type=int, default=5)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--out", type=Path, required=True)

    gn = sub.add_parser("gen", help="write a seeded synthetic token tensor + sidecar")
    gn.add_argument("--mode", choices=["image", "video"], default="image")
    gn.add_argument("--grid", type=_parse_grid, default=(16, 16))
    gn.add_argument("--frames", type=int, default=0)
    gn.add_argument("--dim", type=int, default=64)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--blobs", type=int, default=4)
    gn.add_argument("--phases", type=int, default=2)
    gn.add_argument("--noise", type=float, default=0.05)
    gn.add_argument("--out", type=Path, required=True)
    return p


def _config(args) -> RunConfig:
    return RunConfig(
        input=args.input, out=args.out,
        mode="video" if args.command == "merge-video" else "image",
        steps=args.steps, knn_k=args.knn,
        temporal_k=getattr(args, "temporal_knn", None),
        ratio=getattr(args, "ratio", DEFAULT_RATIO),
        proj_weight=args.proj_weight, proj_bias=args.proj_bias, scale=args.scale,
    )


def run(args) -> int:
    if args.command == "merge-image":
        return cmd_merge_image(_config(args))
    if args.command == "merge-video":
        return cmd_merge_video(_config(args))
    if args.command == "visualize":
        return cmd_visualize(args.regions, args.out, args.step, args.frame, args.scale)
    if args.command == "bench":
        return cmd_bench(args.sizes, args.dim, args.out, args.repeats, args.seed)
    return cmd_gen(args.mode, args.grid, args.frames, args.dim, args.seed, args.out,
                   args.blobs, args.phases, args.noise)


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except DyntokError as exc:
        return _fail(exc.kind, str(exc), 2)
    except OSError as exc:
        return _fail("io", str(exc), 2)
    except Exception as exc:  # noqa: BLE001
        return _fail("internal", f"{type(exc).__name__}: {exc}", 1)


if __name__ == "__main__":
    sys.exit(main())
