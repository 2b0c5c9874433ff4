"""Output token counts for image step settings and video lengths.

    python scripts/token_budget_sweep.py [--dim 64] [--seed 0]
"""

import argparse

import numpy as np

from dyntok.multiscale import multiscale_image, multiscale_video
from dyntok.synth import blob_image, phased_video
from dyntok.temporal import FrameSequence
from dyntok.tensor_io import TokenMeta

STEP_SETTINGS = [(16, 8, 4), (32, 16, 8), (64, 32, 16), (128, 64, 32)]
VIDEO_LENGTHS = [8, 16, 32, 48, 64, 96, 128]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ratio", default="1/16")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    x = blob_image(rng, 16, 16, args.dim, n_blobs=6)
    print("image, 16x16 grid (256 tokens)")
    print(f"{'steps':>14} {'tokens':>7}")
    for steps in STEP_SETTINGS:
        rep = multiscale_image(x, TokenMeta(16, 16, 0, args.dim), steps)
        print(f"{'/'.join(map(str, steps)):>14} {rep.num_tokens:>7}")

    print(f"\nvideo, 8x8 grid, ratio {args.ratio}, steps 32/16/8")
    print(f"{'frames':>7} {'events':>7} {'tokens':>7}  event sizes")
    for m in VIDEO_LENGTHS:
        seq = FrameSequence.from_array(phased_video(rng, m, 8, 8, args.dim, phases=4), 8, 8)
        rep = multiscale_video(seq, args.ratio, (32, 16, 8))
        sizes = [len(ev) for ev in rep.events.events]
        print(f"{m:>7} {rep.events.num_events:>7} {rep.num_tokens:>7}  {sizes}")


if __name__ == "__main__":
    main()
