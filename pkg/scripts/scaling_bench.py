"""Wall-clock of the clustering kernel against N, with successive doubling ratios.

    python scripts/scaling_bench.py [--sizes 128,256,512,1024,2048] [--dim 1024]
"""

import argparse

from dyntok.cli import bench_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="128,256,512,1024,2048")
    ap.add_argument("--dim", type=int, default=1024)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rows = bench_rows(sizes, args.dim, args.repeats)
    print(f"{'N':>6} {'median s':>10} {'x prev':>7}")
    prev = None
    for n, _, _, t in rows:
        ratio = f"{t / prev:.2f}" if prev else ""
        print(f"{n:>6} {t:>10.4f} {ratio:>7}")
        prev = t


if __name__ == "__main__":
    main()
