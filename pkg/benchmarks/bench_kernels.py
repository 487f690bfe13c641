"""Time the numba and numpy kernel backends on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call per kernel compiles it; that call is timed separately
and excluded from the steady-state figure.
"""
import argparse
import time

import numpy as np

from shannon2d import _kernels, presets
from shannon2d.frames import SGrid, UGrid, _flatten, default_du
from shannon2d.tiling import Window4D, _tile_boxes, enumerate_tiles, iter_points
from shannon2d.generator import GeneratorSpec


def workloads():
    rng = np.random.default_rng(0)
    spec = GeneratorSpec()
    tiles = enumerate_tiles(spec, Window4D.unit(), spec.M)
    lo, hi = (np.array([[float(v) for v in row] for row in side]) for side in _tile_boxes(tiles))
    pts = np.array([[float(v) for v in p] for p in iter_points(Window4D.unit(), 20_000, 7)])
    pts[:, 2] = np.abs(pts[:, 2])
    owner = np.arange(lo.shape[0], dtype=np.int64)
    x = rng.uniform(-100, 100, 200_000)
    bands = np.arange(1, 25, dtype=np.int64)
    phases = np.exp(2j * np.pi * rng.uniform(size=24))
    f = presets.band_e00()
    plo, phi, amp, blo, bhi = _flatten(spec, f)
    cal = (UGrid(512).nodes(default_du(f)), SGrid(384).nodes(), plo, phi, amp, blo, bhi)
    return {
        "band_space (2e5 pts)": lambda k: k.band_space(3, x),
        "mode_sum (2e5 pts x 24 bands)": lambda k: k.mode_sum(x, bands, phases),
        f"tile_hits (2e4 pts x {lo.shape[0]} tiles)": lambda k: k.tile_hits(pts, lo, hi),
        f"box_overlaps ({lo.shape[0]} boxes)": lambda k: k.box_overlaps(lo, hi, owner),
        "calderon_rows (512 u x 384 s)": lambda k: k.calderon_rows(*cal),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'kernel':40s} " + " ".join(f"{n:>12s}" for n in names) + "   speedup  first-call(numba)")
    for label, fn in workloads().items():
        times, first = {}, None
        for name in names:
            k = _kernels.get(name)
            t0 = time.perf_counter()
            fn(k)
            if name == "numba":
                first = time.perf_counter() - t0
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                fn(k)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        row = f"{label:40s} " + " ".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if "numba" in times:
            row += f"   {times['numpy'] / times['numba']:6.1f}x   {first:.2f}s"
        print(row)


if __name__ == "__main__":
    main()
