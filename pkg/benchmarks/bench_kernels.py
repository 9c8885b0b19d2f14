#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--side 512] [--repeat 5]

Times the three hot kernels on synthetic edge fields and, when both
backends are available, reports the speedup.  Also times one full
image-to-edges transform per backend (toggled via RBTE_PURE_PYTHON in a
subprocess so the import-time backend choice applies).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rbte.kernels import _fallback

try:
    from rbte.kernels import _native
except ImportError:
    _native = None


def make_field(side, seed=0):
    rng = np.random.default_rng(seed)
    base = rng.random((side, side))
    # smooth a little so suppression has ridges to chew on
    from scipy.ndimage import gaussian_filter

    s = gaussian_filter(base, 2.0)
    s = (s - s.min()) / (s.max() - s.min())
    o = rng.uniform(0.0, np.pi, size=(side, side))
    return s, o


def best_of(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def bench_kernels(side, repeat):
    s, o = make_field(side)
    mask = s > 0.55
    cases = [
        ("suppress_nonmax", lambda impl: impl.suppress_nonmax(s, o)),
        ("hysteresis_mask", lambda impl: impl.hysteresis_mask(s, 0.3, 0.6)),
        ("filter_small_components", lambda impl: impl.filter_small_components(mask, 10)),
    ]
    print(f"kernel timings on {side}x{side} (best of {repeat}):")
    header = f"{'kernel':<26} {'fallback':>12} {'native':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_fb = best_of(lambda: call(_fallback), repeat)
        if _native is not None:
            t_nat = best_of(lambda: call(_native), repeat)
            print(f"{name:<26} {t_fb * 1e3:>10.2f}ms {t_nat * 1e3:>10.2f}ms "
                  f"{t_fb / t_nat:>8.2f}x")
        else:
            print(f"{name:<26} {t_fb * 1e3:>10.2f}ms {'n/a':>12} {'':>9}")


_TRANSFORM_SNIPPET = r"""
import sys, time, tempfile
from pathlib import Path
import numpy as np
from rbte.image import save_gray
from rbte.pipeline import PipelineSpec, transform
from rbte import kernels

tmp = Path(tempfile.mkdtemp())
rng = np.random.default_rng(1)
img = 0.15 * rng.random((256, 256))
img[40:200, 50:210] = rng.uniform(0.4, 1.0, size=(160, 160))
save_gray(img, tmp / "img.png")
spec = PipelineSpec(seed=3)
transform(tmp / "img.png", spec, 0, image_id="warmup")
n = 20
t0 = time.perf_counter()
for i in range(n):
    transform(tmp / "img.png", spec, i, image_id="bench")
dt = (time.perf_counter() - t0) / n
print(f"{kernels.BACKEND}: {dt * 1e3:.1f} ms/image")
"""


def bench_transform():
    print("\nfull transform, 256x256 input (20 images each):")
    for pure in ("0", "1"):
        env = dict(os.environ, RBTE_PURE_PYTHON=pure)
        out = subprocess.run(
            [sys.executable, "-c", _TRANSFORM_SNIPPET],
            env=env,
            capture_output=True,
            text=True,
        )
        print(" ", out.stdout.strip() or out.stderr.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--side", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--skip-transform", action="store_true")
    args = parser.parse_args()
    bench_kernels(args.side, args.repeat)
    if not args.skip_transform:
        bench_transform()


if __name__ == "__main__":
    main()
