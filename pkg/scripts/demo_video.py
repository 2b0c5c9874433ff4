"""Synthetic video through the full pipeline, with region maps written as PPM.

    python scripts/demo_video.py --out demo_out
"""

import argparse
from pathlib import Path

import numpy as np

from dyntok.multiscale import multiscale_video, step_labels
from dyntok.render import tile, write_ppm
from dyntok.synth import phased_video
from dyntok.temporal import FrameSequence


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("demo_out"))
    ap.add_argument("--frames", type=int, default=32)
    ap.add_argument("--phases", type=int, default=3)
    ap.add_argument("--ratio", default="1/8")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    tokens = phased_video(np.random.default_rng(args.seed), args.frames, 16, 16, 32, args.phases)
    rep = multiscale_video(FrameSequence.from_array(tokens, 16, 16), args.ratio, (64, 32, 16))
    print(f"{args.frames} frames -> {rep.events.num_events} events, {rep.num_tokens} tokens")
    for n, ev in enumerate(rep.events.events):
        print(f"  event {n}: {len(ev)} frames {list(ev)}")

    for s, labels in enumerate(step_labels(rep, args.frames)):
        # one row of frames per step image
        write_ppm(tile([list(labels)]), args.out / f"step{s}.ppm", scale=4)
    print(f"region maps in {args.out}/")


if __name__ == "__main__":
    main()
